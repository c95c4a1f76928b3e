#include "kftrack/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "kftrack/ablation.hpp"
#include "kftrack/error.hpp"
#include "kftrack/io.hpp"
#include "kftrack/suites.hpp"

namespace kftrack::cli {

namespace {

using io::json;

std::string sequence_id(const std::string& name, std::uint64_t seed) {
  return name + "__seed" + std::to_string(seed);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void report_error(std::ostream& err, const std::exception& e) {
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    err << "error: invalid input\n";
    for (const auto& s : v->violations()) err << "  " << s << '\n';
  } else {
    err << "error: " << e.what() << '\n';
  }
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  if (jobs <= 1 || n <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned j = 0; j < std::min<std::size_t>(jobs, n); ++j) pool.emplace_back(worker);
}

std::vector<AblationCell> cells_for(AblationKind kind, const TrackerConfig& base,
                                    const std::vector<double>& alphas) {
  switch (kind) {
    case AblationKind::kModules:
      return module_grid(base);
    case AblationKind::kAlpha: {
      TrackerConfig full = base;
      full.motion_enabled = true;
      full.memory_mode = MemoryMode::kMotionAware;
      return alpha_grid(alphas, full);
    }
    case AblationKind::kNone:
      break;
  }
  return {{"default", base}};
}

struct SequenceInput {
  std::string id;
  std::uint64_t seed = 0;
  std::optional<Scenario> scenario;
  std::optional<io::ProposalSequence> external;
};

}  // namespace

AblationKind ablation_kind_from_string(const std::string& s) {
  if (s == "modules") return AblationKind::kModules;
  if (s == "alpha") return AblationKind::kAlpha;
  if (s.empty() || s == "none") return AblationKind::kNone;
  throw ValidationError({"--ablate expects 'modules' or 'alpha', got '" + s + "'"});
}

// --- simulate -------------------------------------------------------------------

int run_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  Scenario sc;
  try {
    sc = io::load_scenario(opt.scenario);
  } catch (const std::exception& e) {
    report_error(err, e);
    return kInputError;
  }
  if (opt.seed) sc.seed = *opt.seed;
  try {
    const Sequence seq = generate_sequence(sc);
    const std::string id = sequence_id(sc.name, sc.seed);
    const io::GroundTruth gt = io::ground_truth_of(seq);
    io::write_gt(opt.out_dir / (id + ".txt"), gt);
    std::string flags;
    for (bool a : gt.absent) flags += a ? "1\n" : "0\n";
    io::write_file(opt.out_dir / (id + ".absent.txt"), flags);

    json meta = {{"schema-version", io::kSchemaVersion},
                 {"sequence", id},
                 {"scenario", sc.name},
                 {"seed", sc.seed},
                 {"grid", {{"width", sc.grid_w}, {"height", sc.grid_h}}},
                 {"num_frames", seq.num_frames()},
                 {"num_objects", sc.num_objects()}};
    json frames = json::array();
    for (const auto& f : seq.frames) {
      json boxes = json::array();
      for (const auto& b : f.boxes) boxes.push_back({b.x(), b.y(), b.w, b.h});
      frames.push_back({{"boxes", boxes}, {"visibility", f.visibility}});
    }
    meta["frames"] = std::move(frames);
    io::write_file(opt.out_dir / (id + ".meta.json"), meta.dump(1) + "\n");
    out << "wrote " << (opt.out_dir / (id + ".txt")).string() << " (" << seq.num_frames() << " frames)\n";
  } catch (const std::exception& e) {
    report_error(err, e);
    return kInputError;
  }
  return kOk;
}

// --- track ----------------------------------------------------------------------

int run_track(const TrackOptions& opt, std::ostream& out, std::ostream& err) {
  io::RunConfig cfg;
  try {
    cfg = io::load_run_config(opt.config);
  } catch (const std::exception& e) {
    report_error(err, e);
    return kInputError;
  }
  if (!opt.seeds.empty()) cfg.seeds = opt.seeds;
  if (opt.out_dir) cfg.out_dir = *opt.out_dir;
  const auto cells = cells_for(opt.ablate, cfg.tracker, opt.alphas);

  json canonical = io::canonical_run_json(cfg);
  json cell_json = json::array();
  for (const auto& c : cells) cell_json.push_back({{"name", c.name}, {"tracker", io::tracker_config_to_json(c.config)}});
  canonical["cells"] = cell_json;
  const std::string hash = io::config_hash(canonical);

  json failures = json::array();
  std::vector<SequenceInput> inputs;
  for (const auto& path : cfg.scenarios) {
    try {
      Scenario sc = io::load_scenario(path);
      const std::vector<std::uint64_t> seeds = cfg.seeds.empty() ? std::vector<std::uint64_t>{sc.seed} : cfg.seeds;
      for (auto seed : seeds) {
        SequenceInput in;
        in.seed = seed;
        in.scenario = sc;
        in.scenario->seed = seed;
        in.id = sequence_id(sc.name, seed);
        inputs.push_back(std::move(in));
      }
    } catch (const std::exception& e) {
      failures.push_back({{"sequence", path.string()}, {"error", e.what()}});
      report_error(err, e);
    }
  }
  for (const auto& ext : cfg.proposal_sequences) {
    SequenceInput in;
    in.id = ext.name;
    in.external = ext;
    inputs.push_back(std::move(in));
  }

  const fs::path results_dir = cfg.out_dir / "results";
  const fs::path gt_dir = cfg.out_dir / "gt";

  // Ground truth per sequence, shared by all cells.
  std::vector<std::optional<Sequence>> sequences(inputs.size());
  std::vector<std::optional<io::GroundTruth>> truths(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      if (inputs[i].scenario) {
        sequences[i] = generate_sequence(*inputs[i].scenario);
        truths[i] = io::ground_truth_of(*sequences[i]);
      } else {
        const auto& ext = *inputs[i].external;
        truths[i] = ext.absence ? io::parse_gt(ext.ground_truth, *ext.absence) : io::parse_gt(ext.ground_truth);
        if (truths[i]->size() == 0 || truths[i]->absent.front())
          throw FormatError(ext.ground_truth.string() + ": frame 0 must carry the target box");
      }
      io::write_gt(gt_dir / (inputs[i].id + ".txt"), *truths[i]);
    } catch (const std::exception& e) {
      failures.push_back({{"sequence", inputs[i].id}, {"error", e.what()}});
      report_error(err, e);
      truths[i].reset();
    }
  }

  struct Task {
    std::size_t input;
    std::size_t cell;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (truths[i])
      for (std::size_t c = 0; c < cells.size(); ++c) tasks.push_back({i, c});

  std::vector<std::string> task_errors(tasks.size());
  std::vector<std::string> task_files(tasks.size());
  parallel_for(tasks.size(), opt.jobs, [&](std::size_t k) {
    const auto& task = tasks[k];
    const auto& in = inputs[task.input];
    const auto& cell = cells[task.cell];
    try {
      TrackResult result;
      if (in.scenario) {
        SimProposalSource source(*in.scenario, *sequences[task.input]);
        result = track(source, sequences[task.input]->frames.front().boxes.front(), cell.config);
      } else {
        io::FileProposalSource source(in.external->proposals, truths[task.input]->size());
        result = track(source, truths[task.input]->boxes.front(), cell.config);
      }
      result.sequence_id = in.id;
      result.cell = cell.name;
      result.seed = in.seed;
      const std::string file = in.id + "__" + cell.name + ".jsonl";
      io::save_track_result(results_dir / file, result, opt.timing);
      task_files[k] = file;
    } catch (const std::exception& e) {
      task_errors[k] = e.what();
    }
  });

  json outputs = json::array();
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const auto& in = inputs[tasks[k].input];
    const auto& cell = cells[tasks[k].cell];
    if (task_errors[k].empty()) {
      outputs.push_back({{"sequence", in.id}, {"seed", in.seed}, {"cell", cell.name},
                         {"file", "results/" + task_files[k]}, {"gt", "gt/" + in.id + ".txt"}});
    } else {
      failures.push_back({{"sequence", in.id}, {"cell", cell.name}, {"error", task_errors[k]}});
      err << "error: " << in.id << " [" << cell.name << "]: " << task_errors[k] << '\n';
    }
  }
  json manifest = {{"schema-version", io::kSchemaVersion},
                   {"command", "track"},
                   {"config_hash", hash},
                   {"config", canonical},
                   {"outputs", outputs},
                   {"failures", failures},
                   {"run_info", {{"generated_at", utc_timestamp()}}}};
  try {
    io::write_file(cfg.out_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    report_error(err, e);
    return kPartialFailure;
  }
  out << "tracked " << outputs.size() << " run(s) into " << cfg.out_dir.string() << " (config " << hash << ")\n";
  return failures.empty() ? kOk : kPartialFailure;
}

// --- eval -----------------------------------------------------------------------

int run_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(opt.results_dir)) {
    err << "error: results directory " << opt.results_dir.string() << " does not exist\n";
    return kInputError;
  }
  const fs::path out_dir = opt.out_dir ? *opt.out_dir : opt.results_dir.parent_path() / "eval";
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(opt.results_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::map<std::string, std::vector<eval::MetricReport>> by_cell;
  json per_sequence = json::array();
  json unmatched = json::array();
  for (const auto& file : files) {
    TrackResult result;
    io::GroundTruth gt;
    try {
      result = io::load_track_result(file);
    } catch (const std::exception& e) {
      report_error(err, e);
      return kInputError;
    }
    const fs::path gt_path = opt.gt_dir / (result.sequence_id + ".txt");
    const fs::path absence_path = opt.gt_dir / (result.sequence_id + ".absent.txt");
    if (!fs::exists(gt_path)) {
      unmatched.push_back({{"result", file.filename().string()}, {"sequence", result.sequence_id}});
      continue;
    }
    try {
      gt = fs::exists(absence_path) ? io::parse_gt(gt_path, absence_path) : io::parse_gt(gt_path);
    } catch (const std::exception& e) {
      report_error(err, e);
      return kInputError;
    }
    if (gt.size() != result.frames.size()) {
      err << "error: sequence " << result.sequence_id << ": result has " << result.frames.size()
          << " frames but ground truth has " << gt.size() << '\n';
      return kInputError;
    }
    std::vector<eval::FramePair> pairs;
    pairs.reserve(gt.size());
    for (std::size_t t = 0; t < gt.size(); ++t)
      pairs.push_back({result.frames[t].chosen_box, gt.boxes[t], gt.absent[t]});
    const auto report = eval::evaluate(pairs);
    const std::string stem = file.stem().string();
    io::write_file(out_dir / "sequences" / (stem + ".json"), io::metric_report_to_json(report).dump(2) + "\n");
    io::write_file(out_dir / "sequences" / (stem + ".success.csv"), io::success_curve_csv(report));
    io::write_file(out_dir / "sequences" / (stem + ".precision.csv"), io::precision_curve_csv(report));
    const std::string cell = result.cell.empty() ? "default" : result.cell;
    by_cell[cell].push_back(report);
    per_sequence.push_back({{"result", file.filename().string()}, {"sequence", result.sequence_id},
                            {"cell", cell}, {"auc", report.auc}, {"ao", report.ao}});
  }

  json cells = json::object();
  std::vector<io::Series> success_series, precision_series;
  for (const auto& [cell, reports] : by_cell) {
    const auto agg = eval::aggregate(reports);
    json j = io::metric_report_to_json(agg);
    j["n_sequences"] = reports.size();
    cells[cell] = j;
    io::write_file(out_dir / (cell + ".success.csv"), io::success_curve_csv(agg));
    io::write_file(out_dir / (cell + ".precision.csv"), io::precision_curve_csv(agg));
    success_series.push_back({cell + " [" + std::to_string(agg.auc).substr(0, 5) + "]",
                              std::vector<double>(agg.success_curve.begin(), agg.success_curve.end())});
    precision_series.push_back({cell + " [" + std::to_string(agg.p_at_20).substr(0, 5) + "]",
                                std::vector<double>(agg.precision_curve.begin(), agg.precision_curve.end())});
    out << cell << ": auc=" << agg.auc << " p=" << agg.p_at_20 << " p_norm=" << agg.p_norm_auc
        << " ao=" << agg.ao << " (" << reports.size() << " sequences)\n";
  }
  json aggregate = {{"schema-version", io::kSchemaVersion},
                    {"aggregation", "unweighted mean over sequences"},
                    {"cells", cells},
                    {"sequences", per_sequence},
                    {"unmatched", unmatched}};
  io::write_file(out_dir / "aggregate.json", aggregate.dump(2) + "\n");

  if (opt.emit_plots && !by_cell.empty()) {
    std::vector<double> sx, px;
    for (std::size_t k = 0; k < eval::kSuccessPoints; ++k) sx.push_back(eval::success_threshold(k));
    for (std::size_t k = 0; k < eval::kPrecisionPoints; ++k) px.push_back(static_cast<double>(k));
    io::write_file(out_dir / "success.svg", io::line_chart_svg("Success plot", "overlap threshold", sx, success_series));
    io::write_file(out_dir / "precision.svg",
                   io::line_chart_svg("Precision plot", "location error threshold (px)", px, precision_series));
  }
  if (!unmatched.empty()) {
    err << "error: " << unmatched.size() << " result(s) without ground truth:\n";
    for (const auto& u : unmatched) err << "  " << u.at("result").get<std::string>() << '\n';
    return kPartialFailure;
  }
  return kOk;
}

// --- ablate ---------------------------------------------------------------------

int run_ablate(const AblateOptions& opt, std::ostream& out, std::ostream& err) {
  io::RunConfig cfg;
  std::vector<Scenario> scenarios;
  try {
    cfg = io::load_run_config(opt.config);
    for (const auto& p : cfg.scenarios) scenarios.push_back(io::load_scenario(p));
  } catch (const std::exception& e) {
    report_error(err, e);
    return kInputError;
  }
  if (scenarios.empty()) {
    err << "error: ablation needs at least one scenario\n";
    return kInputError;
  }
  if (!opt.seeds.empty()) cfg.seeds = opt.seeds;
  if (opt.out_dir) cfg.out_dir = *opt.out_dir;
  const auto cells = cells_for(opt.kind == AblationKind::kNone ? AblationKind::kModules : opt.kind,
                               cfg.tracker, opt.alphas);
  AblationOptions aopt;
  aopt.seeds = cfg.seeds;
  aopt.jobs = opt.jobs;
  const auto table = ablate(scenarios, cells, aopt);

  std::string csv = "cell,mean_auc,mean_iou,mean_p_norm,mean_precision,runs,failures\n";
  json rows = json::array();
  bool any_failure = false;
  out << "cell            mean_auc  mean_iou  runs  failures\n";
  for (const auto& row : table) {
    char line[256];
    std::snprintf(line, sizeof line, "%s,%.6f,%.6f,%.6f,%.6f,%zu,%zu\n", row.name.c_str(), row.mean_auc,
                  row.mean_iou, row.mean_p_norm, row.mean_precision, row.runs, row.failures.size());
    csv += line;
    std::snprintf(line, sizeof line, "%-15s %8.4f  %8.4f  %4zu  %8zu\n", row.name.c_str(), row.mean_auc,
                  row.mean_iou, row.runs, row.failures.size());
    out << line;
    rows.push_back({{"cell", row.name}, {"mean_auc", row.mean_auc}, {"mean_iou", row.mean_iou},
                    {"mean_p_norm", row.mean_p_norm}, {"mean_precision", row.mean_precision},
                    {"runs", row.runs}, {"failures", row.failures}});
    for (const auto& f : row.failures) err << "error: [" << row.name << "] " << f << '\n';
    any_failure = any_failure || !row.failures.empty();
  }
  json canonical = io::canonical_run_json(cfg);
  json doc = {{"schema-version", io::kSchemaVersion},
              {"grid", opt.kind == AblationKind::kAlpha ? "alpha" : "modules"},
              {"config_hash", io::config_hash(canonical)},
              {"cells", rows}};
  io::write_file(cfg.out_dir / "ablation.csv", csv);
  io::write_file(cfg.out_dir / "ablation.json", doc.dump(2) + "\n");
  return any_failure ? kPartialFailure : kOk;
}

// --- report ---------------------------------------------------------------------

int run_report(const ReportOptions& opt, std::ostream& out, std::ostream& err) {
  const fs::path agg_path = opt.dir / "aggregate.json";
  const fs::path abl_path = opt.dir / "ablation.json";
  bool found = false;
  try {
    if (fs::exists(agg_path)) {
      found = true;
      const json agg = json::parse(io::read_file(agg_path));
      out << "| cell | AUC | P_norm | P@20 | AO | OP50 | OP75 | sequences |\n";
      out << "|---|---|---|---|---|---|---|---|\n";
      std::vector<io::Series> success_series;
      for (const auto& [cell, j] : agg.at("cells").items()) {
        const auto r = io::metric_report_from_json(j);
        char line[256];
        std::snprintf(line, sizeof line, "| %s | %.2f | %.2f | %.2f | %.2f | %.2f | %.2f | %zu |\n", cell.c_str(),
                      100 * r.auc, 100 * r.p_norm_auc, 100 * r.p_at_20, 100 * r.ao, 100 * r.op.at(0.5),
                      100 * r.op.at(0.75), j.value("n_sequences", std::size_t{0}));
        out << line;
        success_series.push_back({cell, std::vector<double>(r.success_curve.begin(), r.success_curve.end())});
      }
      if (opt.emit_plots && !success_series.empty()) {
        std::vector<double> sx;
        for (std::size_t k = 0; k < eval::kSuccessPoints; ++k) sx.push_back(eval::success_threshold(k));
        io::write_file(opt.dir / "report_success.svg",
                       io::line_chart_svg("Success plot", "overlap threshold", sx, success_series));
      }
    }
    if (fs::exists(abl_path)) {
      found = true;
      const json abl = json::parse(io::read_file(abl_path));
      out << "\n| cell | mean AUC | mean IoU | runs |\n|---|---|---|---|\n";
      for (const auto& row : abl.at("cells")) {
        char line[256];
        std::snprintf(line, sizeof line, "| %s | %.2f | %.2f | %zu |\n",
                      row.at("cell").get<std::string>().c_str(), 100 * row.at("mean_auc").get<double>(),
                      100 * row.at("mean_iou").get<double>(), row.at("runs").get<std::size_t>());
        out << line;
      }
    }
  } catch (const std::exception& e) {
    report_error(err, e);
    return kInputError;
  }
  if (!found) {
    err << "error: " << opt.dir.string() << " has neither aggregate.json nor ablation.json\n";
    return kInputError;
  }
  return kOk;
}

// --- make-suite -----------------------------------------------------------------

int run_make_suite(const SuiteOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<Scenario> scenarios;
  if (opt.suite == "crossing") {
    scenarios = suites::crossing_suite(opt.count ? opt.count : 200, opt.seed);
  } else if (opt.suite == "fast") {
    scenarios = suites::fast_motion_suite(opt.count ? opt.count : 100, opt.seed);
  } else if (opt.suite == "poisoning") {
    scenarios = {suites::poisoning_scenario()};
  } else if (opt.suite == "crossing-demo") {
    scenarios = {suites::crossing_scenario()};
  } else {
    err << "error: unknown suite '" << opt.suite << "' (crossing, fast, poisoning, crossing-demo)\n";
    return kInputError;
  }
  json run = {{"schema-version", io::kSchemaVersion}, {"scenarios", json::array()}, {"out_dir", "out"}};
  for (const auto& sc : scenarios) {
    const std::string file = "scenarios/" + sc.name + ".json";
    io::save_scenario(opt.out_dir / file, sc);
    run["scenarios"].push_back(file);
  }
  io::write_file(opt.out_dir / "run.json", run.dump(2) + "\n");
  out << "wrote " << scenarios.size() << " scenario(s) and run.json to " << opt.out_dir.string() << '\n';
  return kOk;
}

}  // namespace kftrack::cli
