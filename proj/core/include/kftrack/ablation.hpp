#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kftrack/eval.hpp"
#include "kftrack/simworld.hpp"
#include "kftrack/tracker.hpp"

namespace kftrack {

struct AblationCell {
  std::string name;
  TrackerConfig config;
};

/// The four module toggles: baseline, motion_only, memory_only, full.
std::vector<AblationCell> module_grid(const TrackerConfig& base = TrackerConfig{});

/// Full configuration with each motion weight, named "alpha_<value>".
std::vector<AblationCell> alpha_grid(std::span<const double> alphas,
                                     const TrackerConfig& base = TrackerConfig::full());

/// Pairs each tracker output with the target ground truth of the sequence.
std::vector<eval::FramePair> pair_with_truth(const TrackResult& result, const Sequence& seq);

struct SimRun {
  TrackResult result;
  eval::MetricReport report;
};

/// Generates the sequence, tracks from the true frame-0 box and evaluates.
SimRun run_simulated(const Scenario& scenario, const TrackerConfig& cfg);

struct CellAggregate {
  std::string name;
  double mean_auc = 0.0;
  /// Mean per-sequence average overlap.
  double mean_iou = 0.0;
  double mean_p_norm = 0.0;
  double mean_precision = 0.0;
  std::size_t runs = 0;
  std::vector<std::string> failures;
};

struct AblationOptions {
  /// Proposer seeds; when empty each scenario runs once with its own seed.
  std::vector<std::uint64_t> seeds;
  unsigned jobs = 1;
};

/// Runs every (scenario, seed, cell) combination and averages per cell.
/// Failures are recorded on their cell; the rest of the grid still runs.
/// Output is independent of `jobs`.
std::vector<CellAggregate> ablate(std::span<const Scenario> scenarios,
                                  std::span<const AblationCell> cells,
                                  const AblationOptions& options = {});

}  // namespace kftrack
