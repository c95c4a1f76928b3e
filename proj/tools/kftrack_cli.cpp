#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "kftrack/cli.hpp"
#include "kftrack/error.hpp"

namespace kc = kftrack::cli;

int main(int argc, char** argv) {
  CLI::App app{"kftrack: Kalman-guided mask tracking on synthetic and file-based proposals"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kftrack 0.1.0");

  const unsigned default_jobs = std::max(1u, std::thread::hardware_concurrency());

  kc::SimulateOptions sim;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Render a scenario into ground-truth and metadata files");
  simulate->add_option("--config,scenario", sim.scenario, "Scenario JSON")->required();
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Override the scenario's seed");
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();

  kc::TrackOptions trk;
  std::string trk_ablate, trk_out;
  auto* track = app.add_subcommand("track", "Run the tracker over every sequence in a run config");
  track->add_option("--config", trk.config, "Run config JSON")->required();
  track->add_option("--seed", trk.seeds, "Seed (repeatable); overrides the config's seeds");
  auto* trk_out_opt = track->add_option("--out", trk_out, "Output directory; overrides the config's out_dir");
  track->add_option("--ablate", trk_ablate, "Produce tagged result sets for a grid")
      ->check(CLI::IsMember({"modules", "alpha"}));
  track->add_option("--alphas", trk.alphas, "Motion weights for --ablate alpha")->delimiter(',');
  track->add_option("--jobs", trk.jobs, "Worker threads")->default_val(default_jobs);
  track->add_flag("--timing", trk.timing, "Record per-frame wall time (breaks byte-identical reruns)");

  kc::EvalOptions ev;
  std::string ev_out;
  auto* eval = app.add_subcommand("eval", "Score result files against ground truth");
  eval->add_option("results", ev.results_dir, "Directory of .jsonl results")->required();
  eval->add_option("gt", ev.gt_dir, "Directory of ground-truth files")->required();
  auto* ev_out_opt = eval->add_option("--out", ev_out, "Output directory (default: <results>/../eval)");
  eval->add_flag("--emit-plots", ev.emit_plots, "Write SVG success and precision plots");

  kc::AblateOptions abl;
  std::string abl_ablate = "modules", abl_out;
  auto* ablate = app.add_subcommand("ablate", "Run an ablation grid and write a summary table");
  ablate->add_option("--config", abl.config, "Run config JSON")->required();
  ablate->add_option("--seed", abl.seeds, "Seed (repeatable); overrides the config's seeds");
  auto* abl_out_opt = ablate->add_option("--out", abl_out, "Output directory; overrides the config's out_dir");
  ablate->add_option("--ablate", abl_ablate, "Grid to run")->check(CLI::IsMember({"modules", "alpha"}))
      ->capture_default_str();
  ablate->add_option("--alphas", abl.alphas, "Motion weights for the alpha grid")->delimiter(',');
  ablate->add_option("--jobs", abl.jobs, "Worker threads")->default_val(default_jobs);

  kc::ReportOptions rep;
  auto* report = app.add_subcommand("report", "Print markdown tables from eval or ablate output");
  report->add_option("dir", rep.dir, "Directory holding aggregate.json or ablation.json")->required();
  report->add_flag("--emit-plots", rep.emit_plots, "Write an SVG success plot");

  kc::SuiteOptions suite;
  auto* make_suite = app.add_subcommand("make-suite", "Write a built-in scenario suite plus a run config");
  make_suite->add_option("suite", suite.suite, "crossing, fast, poisoning or crossing-demo")->required();
  make_suite->add_option("--count", suite.count, "Number of scenarios (suites only)");
  make_suite->add_option("--seed", suite.seed, "Suite generation seed")->capture_default_str();
  make_suite->add_option("--out", suite.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kc::kInputError;
  }

  try {
    if (simulate->parsed()) {
      if (*sim_seed_opt) sim.seed = sim_seed;
      return kc::run_simulate(sim, std::cout, std::cerr);
    }
    if (track->parsed()) {
      trk.ablate = kc::ablation_kind_from_string(trk_ablate);
      if (*trk_out_opt) trk.out_dir = trk_out;
      return kc::run_track(trk, std::cout, std::cerr);
    }
    if (eval->parsed()) {
      if (*ev_out_opt) ev.out_dir = ev_out;
      return kc::run_eval(ev, std::cout, std::cerr);
    }
    if (ablate->parsed()) {
      abl.kind = kc::ablation_kind_from_string(abl_ablate);
      if (*abl_out_opt) abl.out_dir = abl_out;
      return kc::run_ablate(abl, std::cout, std::cerr);
    }
    if (report->parsed()) return kc::run_report(rep, std::cout, std::cerr);
    if (make_suite->parsed()) return kc::run_make_suite(suite, std::cout, std::cerr);
  } catch (const kftrack::ValidationError& e) {
    std::cerr << "error: invalid input\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
    return kc::kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kc::kPartialFailure;
  }
  return kc::kInputError;
}
