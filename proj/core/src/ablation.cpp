#include "kftrack/ablation.hpp"

#include <atomic>
#include <cstdio>
#include <optional>
#include <thread>

namespace kftrack {

std::vector<AblationCell> module_grid(const TrackerConfig& base) {
  std::vector<AblationCell> cells;
  const std::pair<const char*, std::pair<bool, bool>> toggles[] = {
      {"baseline", {false, false}},
      {"motion_only", {true, false}},
      {"memory_only", {false, true}},
      {"full", {true, true}},
  };
  for (const auto& [name, t] : toggles) {
    TrackerConfig cfg = base;
    cfg.motion_enabled = t.first;
    cfg.memory_mode = t.second ? MemoryMode::kMotionAware : MemoryMode::kFifo;
    cells.push_back({name, cfg});
  }
  return cells;
}

std::vector<AblationCell> alpha_grid(std::span<const double> alphas, const TrackerConfig& base) {
  std::vector<AblationCell> cells;
  for (double a : alphas) {
    TrackerConfig cfg = base;
    cfg.motion.alpha_kf = a;
    char name[32];
    std::snprintf(name, sizeof name, "alpha_%.2f", a);
    cells.push_back({name, cfg});
  }
  return cells;
}

std::vector<eval::FramePair> pair_with_truth(const TrackResult& result, const Sequence& seq) {
  std::vector<eval::FramePair> pairs;
  const std::size_t n = std::min(result.frames.size(), seq.num_frames());
  pairs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& truth = seq.frames[t];
    pairs.push_back({result.frames[t].chosen_box, truth.target_box(), truth.target_absent()});
  }
  return pairs;
}

SimRun run_simulated(const Scenario& scenario, const TrackerConfig& cfg) {
  const Sequence seq = generate_sequence(scenario);
  SimProposalSource source(scenario, seq);
  SimRun run;
  run.result = track(source, seq.frames.front().boxes.front(), cfg);
  run.result.sequence_id = scenario.name;
  run.result.seed = scenario.seed;
  const auto pairs = pair_with_truth(run.result, seq);
  run.report = eval::evaluate(pairs);
  return run;
}

std::vector<CellAggregate> ablate(std::span<const Scenario> scenarios,
                                  std::span<const AblationCell> cells,
                                  const AblationOptions& options) {
  struct Task {
    std::size_t scenario;
    std::optional<std::uint64_t> seed;
    std::size_t cell;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
      if (options.seeds.empty()) {
        tasks.push_back({s, std::nullopt, c});
      } else {
        for (auto seed : options.seeds) tasks.push_back({s, seed, c});
      }
    }
  }

  struct Outcome {
    std::optional<eval::MetricReport> report;
    std::string error;
  };
  std::vector<Outcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& task = tasks[i];
      Scenario sc = scenarios[task.scenario];
      if (task.seed) sc.seed = *task.seed;
      try {
        outcomes[i].report = run_simulated(sc, cells[task.cell].config).report;
      } catch (const std::exception& e) {
        outcomes[i].error = sc.name + " (seed " + std::to_string(sc.seed) + "): " + e.what();
      }
    }
  };
  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::vector<CellAggregate> out(cells.size());
  std::vector<std::vector<eval::MetricReport>> reports(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) out[c].name = cells[c].name;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& agg = out[tasks[i].cell];
    if (outcomes[i].report) {
      reports[tasks[i].cell].push_back(*outcomes[i].report);
    } else {
      agg.failures.push_back(outcomes[i].error);
    }
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& agg = out[c];
    agg.runs = reports[c].size();
    if (reports[c].empty()) continue;
    const auto mean = eval::aggregate(reports[c]);
    agg.mean_auc = mean.auc;
    agg.mean_iou = mean.ao;
    agg.mean_p_norm = mean.p_norm_auc;
    agg.mean_precision = mean.p_at_20;
  }
  return out;
}

}  // namespace kftrack
