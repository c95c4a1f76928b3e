#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "kftrack/ablation.hpp"
#include "kftrack/cli.hpp"
#include "kftrack/error.hpp"
#include "kftrack/io.hpp"
#include "kftrack/suites.hpp"
#include "support.hpp"

using namespace kftrack;
namespace cli = kftrack::cli;
namespace io = kftrack::io;
namespace fs = std::filesystem;

namespace {

struct Streams {
  std::ostringstream out, err;
};

void write_run(const fs::path& path, const std::vector<std::string>& scenarios, const std::vector<std::uint64_t>& seeds) {
  io::json j = {{"schema-version", 1}, {"scenarios", scenarios}, {"seeds", seeds}, {"out_dir", "out"}};
  io::write_file(path, j.dump(2));
}

std::vector<std::string> files_in(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

TEST_CASE("simulate writes ground truth with one line per frame") {
  testing::TempDir dir("cli_sim");
  io::save_scenario(dir / "poison.json", suites::poisoning_scenario());
  Streams s;
  cli::SimulateOptions opt{dir / "poison.json", dir / "sim", std::nullopt};
  REQUIRE(cli::run_simulate(opt, s.out, s.err) == cli::kOk);
  const auto gt = io::parse_gt(dir / "sim/poisoning__seed7.txt", dir / "sim/poisoning__seed7.absent.txt");
  CHECK(gt.size() == 120);
  const std::string first = io::read_file(dir / "sim/poisoning__seed7.txt");
  REQUIRE(cli::run_simulate(opt, s.out, s.err) == cli::kOk);
  CHECK(io::read_file(dir / "sim/poisoning__seed7.txt") == first);
  CHECK(fs::exists(dir / "sim/poisoning__seed7.meta.json"));

  opt.seed = 99;
  REQUIRE(cli::run_simulate(opt, s.out, s.err) == cli::kOk);
  CHECK(fs::exists(dir / "sim/poisoning__seed99.txt"));
}

TEST_CASE("simulate rejects a bad scenario with exit code 2") {
  testing::TempDir dir("cli_bad");
  io::json j = io::scenario_to_json(suites::poisoning_scenario());
  j["target"]["appearance"] = {1, 1};
  io::write_file(dir / "bad.json", j.dump());
  Streams s;
  CHECK(cli::run_simulate({dir / "bad.json", dir / "sim", std::nullopt}, s.out, s.err) == cli::kInputError);
  CHECK(s.err.str().find("target: appearance has 2 components") != std::string::npos);
  CHECK(cli::run_simulate({dir / "missing.json", dir / "sim", std::nullopt}, s.out, s.err) == cli::kInputError);
}

TEST_CASE("track, eval and report end to end") {
  testing::TempDir dir("cli_e2e");
  io::save_scenario(dir / "scenarios/crossing.json", suites::crossing_scenario());
  write_run(dir / "run.json", {"scenarios/crossing.json"}, {11});
  Streams s;

  cli::TrackOptions t;
  t.config = dir / "run.json";
  REQUIRE(cli::run_track(t, s.out, s.err) == cli::kOk);
  CHECK(files_in(dir / "out/results") == std::vector<std::string>{"crossing__seed11__default.jsonl"});
  const auto manifest = io::json::parse(io::read_file(dir / "out/manifest.json"));
  CHECK(manifest.at("outputs").size() == 1);
  CHECK(manifest.at("failures").empty());
  CHECK(manifest.at("config_hash").get<std::string>().size() == 16);
  CHECK(manifest.at("run_info").contains("generated_at"));

  // Module grid: four tagged result sets in a separate directory.
  t.ablate = cli::AblationKind::kModules;
  t.out_dir = dir / "grid";
  t.jobs = 2;
  REQUIRE(cli::run_track(t, s.out, s.err) == cli::kOk);
  CHECK(files_in(dir / "grid/results").size() == 4);

  cli::EvalOptions e;
  e.results_dir = dir / "grid/results";
  e.gt_dir = dir / "grid/gt";
  e.emit_plots = true;
  REQUIRE(cli::run_eval(e, s.out, s.err) == cli::kOk);
  const auto agg = io::json::parse(io::read_file(dir / "grid/eval/aggregate.json"));
  CHECK(agg.at("cells").size() == 4);
  CHECK(agg.at("cells").at("full").at("auc").get<double>() > agg.at("cells").at("baseline").at("auc").get<double>());
  CHECK(fs::exists(dir / "grid/eval/success.svg"));
  CHECK(fs::exists(dir / "grid/eval/full.success.csv"));

  Streams r;
  REQUIRE(cli::run_report({dir / "grid/eval", false}, r.out, r.err) == cli::kOk);
  CHECK(r.out.str().find("| full |") != std::string::npos);
  CHECK(cli::run_report({dir / "nowhere", false}, r.out, r.err) == cli::kInputError);
}

TEST_CASE("track reruns are byte identical") {
  testing::TempDir dir("cli_det");
  std::vector<std::string> names;
  for (const auto& sc : suites::crossing_suite(2, 77)) {
    io::save_scenario(dir / (sc.name + ".json"), sc);
    names.push_back(sc.name + ".json");
  }
  write_run(dir / "run.json", names, {5, 6});
  Streams s;
  cli::TrackOptions t;
  t.config = dir / "run.json";
  t.out_dir = dir / "a";
  const int rc = cli::run_track(t, s.out, s.err);
  INFO(s.err.str());
  REQUIRE(rc == cli::kOk);
  t.out_dir = dir / "b";
  t.jobs = 3;
  REQUIRE(cli::run_track(t, s.out, s.err) == cli::kOk);
  const auto results = files_in(dir / "a/results");
  CHECK(results.size() == 4);
  CHECK(results == files_in(dir / "b/results"));
  for (const auto& n : results) CHECK(io::read_file(dir / "a/results" / n) == io::read_file(dir / "b/results" / n));
  const auto ma = io::json::parse(io::read_file(dir / "a/manifest.json"));
  const auto mb = io::json::parse(io::read_file(dir / "b/manifest.json"));
  CHECK(ma.at("config_hash") == mb.at("config_hash"));
  CHECK(ma.at("outputs") == mb.at("outputs"));
}

TEST_CASE("track records unreadable sequences and exits 1") {
  testing::TempDir dir("cli_partial");
  io::save_scenario(dir / "ok.json", suites::crossing_scenario());
  io::write_file(dir / "broken.json", "{ not json");
  write_run(dir / "run.json", {"ok.json", "broken.json"}, {});
  Streams s;
  cli::TrackOptions t;
  t.config = dir / "run.json";
  CHECK(cli::run_track(t, s.out, s.err) == cli::kPartialFailure);
  const auto manifest = io::json::parse(io::read_file(dir / "out/manifest.json"));
  CHECK(manifest.at("outputs").size() == 1);
  REQUIRE(manifest.at("failures").size() == 1);
  CHECK(manifest.at("failures")[0].at("sequence").get<std::string>().find("broken.json") != std::string::npos);

  t.config = dir / "absent.json";
  CHECK(cli::run_track(t, s.out, s.err) == cli::kInputError);
}

TEST_CASE("eval of a perfect result and its failure modes") {
  testing::TempDir dir("cli_eval");
  const Scenario sc = suites::crossing_scenario();
  const Sequence seq = generate_sequence(sc);
  const auto gt = io::ground_truth_of(seq);
  TrackResult perfect;
  perfect.sequence_id = "perfect";
  perfect.cell = "oracle";
  for (std::size_t t = 0; t < gt.size(); ++t) {
    FrameRecord rec;
    rec.frame = static_cast<int>(t);
    rec.chosen_box = gt.boxes[t];
    rec.target_absent = gt.absent[t];
    perfect.frames.push_back(rec);
  }
  io::save_track_result(dir / "results/perfect.jsonl", perfect);
  io::write_gt(dir / "gt/perfect.txt", gt);
  Streams s;
  cli::EvalOptions e{dir / "results", dir / "gt", dir / "eval", false};
  REQUIRE(cli::run_eval(e, s.out, s.err) == cli::kOk);
  const auto agg = io::json::parse(io::read_file(dir / "eval/aggregate.json"));
  CHECK(std::abs(agg.at("cells").at("oracle").at("auc").get<double>() - 20.0 / 21.0) <= 1e-12);

  // A result without ground truth is listed and fails the run.
  TrackResult orphan = perfect;
  orphan.sequence_id = "orphan";
  io::save_track_result(dir / "results/orphan.jsonl", orphan);
  REQUIRE(cli::run_eval(e, s.out, s.err) == cli::kPartialFailure);
  const auto agg2 = io::json::parse(io::read_file(dir / "eval/aggregate.json"));
  CHECK(agg2.at("unmatched").size() == 1);
  fs::remove(dir / "results/orphan.jsonl");

  // Frame-count mismatch names the sequence.
  auto shorter = gt;
  shorter.boxes.pop_back();
  shorter.absent.pop_back();
  io::write_gt(dir / "gt/perfect.txt", shorter);
  Streams m;
  CHECK(cli::run_eval(e, m.out, m.err) == cli::kInputError);
  CHECK(m.err.str().find("perfect") != std::string::npos);
}

TEST_CASE("eval aggregates two sequences with an unweighted mean") {
  testing::TempDir dir("cli_mean");
  std::vector<double> aucs;
  for (const auto& sc : suites::crossing_suite(2, 3)) {
    const auto run = run_simulated(sc, TrackerConfig::baseline());
    TrackResult r = run.result;
    r.sequence_id = sc.name;
    r.cell = "baseline";
    io::save_track_result(dir / "results" / (sc.name + ".jsonl"), r);
    io::write_gt(dir / "gt" / (sc.name + ".txt"), io::ground_truth_of(generate_sequence(sc)));
    aucs.push_back(run.report.auc);
  }
  Streams s;
  REQUIRE(cli::run_eval({dir / "results", dir / "gt", std::nullopt, false}, s.out, s.err) == cli::kOk);
  const auto agg = io::json::parse(io::read_file(dir / "eval/aggregate.json"));
  CHECK(agg.at("cells").at("baseline").at("auc").get<double>() == doctest::Approx((aucs[0] + aucs[1]) / 2).epsilon(1e-12));
}

TEST_CASE("ablate and make-suite") {
  testing::TempDir dir("cli_ablate");
  Streams s;
  cli::SuiteOptions suite;
  suite.suite = "crossing";
  suite.count = 4;
  suite.out_dir = dir / "suite";
  REQUIRE(cli::run_make_suite(suite, s.out, s.err) == cli::kOk);
  CHECK(files_in(dir / "suite/scenarios").size() == 4);

  cli::AblateOptions a;
  a.config = dir / "suite/run.json";
  REQUIRE(cli::run_ablate(a, s.out, s.err) == cli::kOk);
  const auto table = io::json::parse(io::read_file(dir / "suite/out/ablation.json"));
  CHECK(table.at("cells").size() == 4);
  CHECK(io::read_file(dir / "suite/out/ablation.csv").rfind("cell,mean_auc", 0) == 0);

  a.kind = cli::AblationKind::kAlpha;
  a.alphas = {0.0, 0.5};
  a.out_dir = dir / "alpha";
  REQUIRE(cli::run_ablate(a, s.out, s.err) == cli::kOk);
  const auto alpha = io::json::parse(io::read_file(dir / "alpha/ablation.json"));
  CHECK(alpha.at("cells")[1].at("cell") == "alpha_0.50");

  suite.suite = "nope";
  CHECK(cli::run_make_suite(suite, s.out, s.err) == cli::kInputError);
  CHECK_THROWS_AS(cli::ablation_kind_from_string("grid"), ValidationError);
}
