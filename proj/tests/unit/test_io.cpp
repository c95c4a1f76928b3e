#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "kftrack/ablation.hpp"
#include "kftrack/error.hpp"
#include "kftrack/io.hpp"
#include "kftrack/suites.hpp"
#include "support.hpp"

using namespace kftrack;
using testing::Gen;
namespace io = kftrack::io;

namespace {

std::vector<std::string> violations_of(const io::json& j) {
  try {
    io::scenario_from_json(j);
  } catch (const ValidationError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("ground-truth lines convert to centre format") {
  const auto gt = io::parse_gt_text("10,20,30,40\n0,0,0,0\n");
  REQUIRE(gt.size() == 2);
  CHECK(gt.boxes[0] == BBox::from_center(24.5, 39.5, 30, 40));
  CHECK_FALSE(gt.absent[0]);
  CHECK(gt.absent[1]);
  CHECK(gt.boxes[1].empty);
}

TEST_CASE("ground-truth parser tolerance") {
  const auto gt = io::parse_gt_text("1,2,3,4 \r\n 5, 6 ,7,8\t\r\n1.5,2.5,3,4\n\n\n");
  REQUIRE(gt.size() == 3);
  CHECK(gt.boxes[1] == BBox::from_top_left(5, 6, 7, 8));
  CHECK(gt.boxes[2].x() == 1.5);
  CHECK(io::parse_gt_text("").size() == 0);
}

TEST_CASE("ground-truth parse errors carry the line number") {
  auto message = [](const std::string& text) {
    try {
      io::parse_gt_text(text);
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("1,2,3,4\n1,2,x,4\n").find("line 2") != std::string::npos);
  CHECK(message("1,2,3\n").find("line 1") != std::string::npos);
  CHECK(message("1,2,3,4,5\n").find("4 comma-separated") != std::string::npos);
  CHECK(message("1,2,3,4\n\n1,2,3,4\n").find("line 2") != std::string::npos);
  CHECK(message("1,2,-3,4\n").find("negative") != std::string::npos);
  CHECK(message("1,2,,4\n") != "no error");
  CHECK(message("1,2,3,nan\n") != "no error");
}

TEST_CASE("absence flags mark frames absent") {
  auto gt = io::parse_gt_text("1,2,3,4\n1,2,3,4\n1,2,3,4\n");
  io::apply_absence(gt, "0,1\n0\n");
  CHECK(gt.absent == std::vector<bool>{false, true, false});
  CHECK(gt.boxes[1].empty);
  CHECK_THROWS_AS(io::apply_absence(gt, "0 1"), FormatError);
  CHECK_THROWS_AS(io::apply_absence(gt, "0 1 2"), FormatError);
}

TEST_CASE("random ground-truth files round-trip") {
  Gen g(51);
  for (int i = 0; i < 300; ++i) {
    std::string text;
    const int n = testing::uniform_int(g, 1, 60);
    for (int k = 0; k < n; ++k) {
      if (testing::uniform(g, 0, 1) < 0.1) {
        text += "0,0,0,0";
      } else {
        text += std::to_string(testing::uniform_int(g, -50, 2000)) + "," +
                std::to_string(testing::uniform_int(g, -50, 2000)) + "," +
                std::to_string(testing::uniform_int(g, 1, 900)) + "," + std::to_string(testing::uniform_int(g, 1, 900));
      }
      text += testing::uniform(g, 0, 1) < 0.3 ? "\r\n" : "\n";
    }
    const auto first = io::parse_gt_text(text);
    const auto written = io::format_gt(first);
    const auto second = io::parse_gt_text(written);
    REQUIRE(second.boxes == first.boxes);
    REQUIRE(second.absent == first.absent);
    REQUIRE(io::format_gt(second) == written);
  }
}

TEST_CASE("scenario json round trip") {
  for (const auto& sc : {suites::poisoning_scenario(), suites::crossing_suite(3, 4)[1], suites::fast_motion_suite(1, 9)[0]}) {
    const io::json j = io::scenario_to_json(sc);
    const Scenario back = io::scenario_from_json(j);
    CHECK(io::scenario_to_json(back) == j);
    CHECK(back.seed == sc.seed);
    CHECK(back.target.box == sc.target.box);
    CHECK(back.distractors.size() == sc.distractors.size());
  }
}

TEST_CASE("scenario diagnostics name the offending fields") {
  io::json j = io::scenario_to_json(suites::poisoning_scenario());
  j["num_frames"] = "many";
  j["colour"] = 3;
  j["target"]["box"] = {1, 2, 3};
  j["distractors"][0]["motion"][0]["velocity"] = {1};
  const auto v = violations_of(j);
  CHECK(mentions(v, "num_frames: expected"));
  CHECK(mentions(v, "colour: unknown field"));
  CHECK(mentions(v, "target.box: expected 4 numbers"));
  CHECK(mentions(v, "distractors[0].motion[0]"));

  io::json missing = io::scenario_to_json(suites::poisoning_scenario());
  missing.erase("schema-version");
  CHECK(mentions(violations_of(missing), "schema-version: missing"));
  missing["schema-version"] = 2;
  CHECK(mentions(violations_of(missing), "unsupported version"));

  io::json bad_app = io::scenario_to_json(suites::poisoning_scenario());
  bad_app["target"]["appearance"][0] = 3.0;
  CHECK(mentions(violations_of(bad_app), "unit-norm"));
}

TEST_CASE("scenario files report json syntax errors with a line") {
  testing::TempDir dir("io");
  io::write_file(dir / "broken.json", "{\n  \"schema-version\": 1,\n  \"name\": oops\n}\n");
  try {
    io::load_scenario(dir / "broken.json");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("broken.json:3") != std::string::npos);
  }
  io::json j = io::scenario_to_json(suites::poisoning_scenario());
  j.erase("name");
  io::write_file(dir / "unnamed.json", j.dump());
  CHECK(io::load_scenario(dir / "unnamed.json").name == "unnamed");
}

TEST_CASE("config hash follows semantic content") {
  testing::TempDir dir("hash");
  io::RunConfig a;
  a.scenarios = {"a.json"};
  a.seeds = {1, 2};
  const std::string h = io::config_hash(io::canonical_run_json(a));
  CHECK(h.size() == 16);

  io::RunConfig b = a;
  b.out_dir = "elsewhere";
  b.emit_plots = true;
  CHECK(io::config_hash(io::canonical_run_json(b)) == h);

  io::RunConfig c = a;
  c.tracker.motion.alpha_kf = 0.2;
  CHECK(io::config_hash(io::canonical_run_json(c)) != h);
  c = a;
  c.seeds = {2, 1};
  CHECK(io::config_hash(io::canonical_run_json(c)) != h);
  c = a;
  c.tracker.gate.n_max = 65;
  CHECK(io::config_hash(io::canonical_run_json(c)) != h);

  // Key order and formatting of the source file do not matter.
  const io::json j1 = io::json::parse(R"({"schema-version": 1, "scenarios": ["a.json"], "seeds": [1, 2], "tracker": {"memory_mode": "fifo", "motion_enabled": false}})");
  const io::json j2 = io::json::parse(R"({"tracker":{"motion_enabled":false,"memory_mode":"fifo"},"schema-version":1,"seeds":[1,2],"scenarios":["a.json"]})");
  CHECK(io::config_hash(io::canonical_run_json(io::run_config_from_json(j1, dir.path()))) ==
        io::config_hash(io::canonical_run_json(io::run_config_from_json(j2, dir.path()))));
}

TEST_CASE("tracker config json") {
  TrackerConfig cfg = TrackerConfig::baseline();
  cfg.motion.alpha_kf = 0.3;
  cfg.gate.n_mem = 4;
  const TrackerConfig back = io::tracker_config_from_json(io::tracker_config_to_json(cfg));
  CHECK(io::tracker_config_to_json(back) == io::tracker_config_to_json(cfg));
  CHECK_THROWS_AS(io::tracker_config_from_json(io::json{{"memory_mode", "lru"}}), ValidationError);
  CHECK_THROWS_AS(io::tracker_config_from_json(io::json{{"motion", 3}}), ValidationError);
  CHECK_THROWS_AS(io::tracker_config_from_json(io::json{{"gate", {{"n_mem", 0}}}}), ValidationError);
  CHECK_THROWS_AS(io::tracker_config_from_json(io::json{{"bogus", 1}}), ValidationError);
}

TEST_CASE("track results round trip through json lines") {
  const SimRun run = run_simulated(suites::crossing_scenario(), TrackerConfig::full());
  TrackResult r = run.result;
  r.sequence_id = "crossing__seed11";
  r.cell = "full";
  r.seed = 11;
  std::stringstream ss;
  io::write_track_result(ss, r);
  const std::string text = ss.str();
  CHECK(text.find("wall_ns") == std::string::npos);
  std::stringstream in(text);
  const TrackResult back = io::read_track_result(in);
  CHECK(back.sequence_id == r.sequence_id);
  CHECK(back.cell == "full");
  CHECK(back.seed == 11);
  REQUIRE(back.frames.size() == r.frames.size());
  for (std::size_t t = 0; t < r.frames.size(); ++t) {
    REQUIRE(back.frames[t].chosen_box == r.frames[t].chosen_box);
    REQUIRE(back.frames[t].bank_frames == r.frames[t].bank_frames);
    REQUIRE(back.frames[t].s_mask == r.frames[t].s_mask);
    REQUIRE(back.frames[t].target_absent == r.frames[t].target_absent);
  }
  std::stringstream again;
  io::write_track_result(again, back);
  CHECK(again.str() == text);

  // A result missing its last frame line is rejected.
  std::string cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  std::stringstream short_in(cut);
  CHECK_THROWS(io::read_track_result(short_in));
}

TEST_CASE("file proposals drive the tracker and truncation is reported") {
  testing::TempDir dir("proposals");
  const Scenario sc = suites::crossing_scenario();
  const Sequence seq = generate_sequence(sc);
  // Replay the simulator's proposals for the first 30 frames with the target memory.
  SimProposer proposer(sc, seq);
  MemoryEntry prompt;
  prompt.appearance = sc.target.appearance;
  const MemoryBank bank = {&prompt};
  std::string lines;
  for (int t = 1; t < 30; ++t) lines += io::proposals_to_json(t, proposer.propose(t, bank)).dump() + "\n";
  io::write_file(dir / "props.jsonl", lines);

  io::FileProposalSource partial(dir / "props.jsonl", 30);
  const TrackResult r = track(partial, seq.frames[0].boxes[0], TrackerConfig::full());
  CHECK(r.frames.size() == 30);
  CHECK(iou(r.frames[29].chosen_box, seq.frames[29].boxes[0]) > 0.5);

  io::FileProposalSource longer(dir / "props.jsonl", seq.num_frames());
  try {
    track(longer, seq.frames[0].boxes[0], TrackerConfig::full());
    FAIL("expected TruncatedError");
  } catch (const TruncatedError& e) {
    CHECK(e.partial().frames.size() == 30);
  }

  const auto p = io::proposals_from_json(io::json::parse(lines.substr(0, lines.find('\n'))));
  CHECK(p.candidates.size() == 2);
  CHECK_THROWS(io::proposals_from_json(io::json{{"frame", 1}, {"candidates", {{{"mask", "2 2: 9"}}}}}));
}

TEST_CASE("metric reports and curves serialize") {
  eval::MetricReport r;
  r.auc = 0.5;
  r.ao = 0.25;
  r.op[0.5] = 0.4;
  r.op[0.75] = 0.1;
  r.success_curve[3] = 0.7;
  r.precision_curve[20] = 0.9;
  r.p_at_20 = 0.9;
  r.n_frames = 12;
  const auto back = io::metric_report_from_json(io::metric_report_to_json(r));
  CHECK(back.auc == r.auc);
  CHECK(back.op == r.op);
  CHECK(back.success_curve == r.success_curve);
  CHECK(back.precision_curve == r.precision_curve);
  CHECK(back.n_frames == 12);
  const std::string csv = io::success_curve_csv(r);
  CHECK(csv.rfind("threshold,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
  CHECK(io::precision_curve_csv(r).find("\n20,0.9000000000\n") != std::string::npos);

  const std::string svg = io::line_chart_svg("t", "x", {0, 1}, {{"a", {0, 1}}});
  CHECK(svg.rfind("<svg", 0) == 0);
}
