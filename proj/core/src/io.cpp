#include "kftrack/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "kftrack/error.hpp"

namespace kftrack::io {

namespace {

// Collects field-level violations while reading a JSON document.
class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string>& errors) : errors_(errors) {}

  void fail(const std::string& path, const std::string& what) { errors_.push_back(path + ": " + what); }

  template <typename T>
  void number(const json& obj, const std::string& key, const std::string& path, T& out, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(path + key, "missing required field");
      return;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(path + key, "expected a number");
      return;
    }
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        fail(path + key, "expected an integer");
        return;
      }
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) {
          out = v.get<T>();
        } else if (v.get<std::int64_t>() >= 0) {
          out = static_cast<T>(v.get<std::int64_t>());
        } else {
          fail(path + key, "expected a non-negative integer");
        }
      } else {
        out = v.get<T>();
      }
    } else {
      out = v.get<T>();
    }
  }

  void boolean(const json& obj, const std::string& key, const std::string& path, bool& out) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_boolean()) {
      fail(path + key, "expected true or false");
      return;
    }
    out = obj.at(key).get<bool>();
  }

  std::vector<double> numbers(const json& v, const std::string& path, std::optional<std::size_t> size) {
    std::vector<double> out;
    if (!v.is_array()) {
      fail(path, "expected an array of numbers");
      return out;
    }
    for (const auto& x : v) {
      if (!x.is_number()) {
        fail(path, "expected an array of numbers");
        return {};
      }
      out.push_back(x.get<double>());
    }
    if (size && out.size() != *size) {
      fail(path, "expected " + std::to_string(*size) + " numbers, got " + std::to_string(out.size()));
      return {};
    }
    return out;
  }

  void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& [key, _] : obj.items()) {
      bool ok = false;
      for (const char* k : known) ok = ok || key == k;
      if (!ok) fail(path + key, "unknown field");
    }
  }

 private:
  std::vector<std::string>& errors_;
};

json object_to_json(const ObjectSpec& o) {
  json j;
  j["box"] = {o.box.x(), o.box.y(), o.box.w, o.box.h};
  j["appearance"] = o.appearance;
  j["motion"] = json::array();
  for (const auto& s : o.motion) j["motion"].push_back({{"velocity", {s.vx, s.vy}}, {"frames", s.frames}});
  j["occlusions"] = json::array();
  for (const auto& r : o.occlusions) j["occlusions"].push_back({r.begin, r.end});
  return j;
}

ObjectSpec object_from_json(const json& j, const std::string& path, FieldReader& rd) {
  ObjectSpec o;
  if (!j.is_object()) {
    rd.fail(path, "expected an object");
    return o;
  }
  rd.reject_unknown(j, path + ".", {"box", "appearance", "motion", "occlusions"});
  if (!j.contains("box")) {
    rd.fail(path + ".box", "missing required field");
  } else {
    const auto b = rd.numbers(j.at("box"), path + ".box", 4);
    if (b.size() == 4) {
      o.box = BBox::from_top_left(b[0], b[1], b[2], b[3]);
      if (o.box.empty) rd.fail(path + ".box", "width and height must be positive");
    }
  }
  if (!j.contains("appearance")) {
    rd.fail(path + ".appearance", "missing required field");
  } else {
    o.appearance = rd.numbers(j.at("appearance"), path + ".appearance", std::nullopt);
  }
  if (j.contains("motion")) {
    const json& m = j.at("motion");
    if (!m.is_array()) {
      rd.fail(path + ".motion", "expected an array");
    } else {
      for (std::size_t i = 0; i < m.size(); ++i) {
        const std::string p = path + ".motion[" + std::to_string(i) + "]";
        if (!m[i].is_object()) {
          rd.fail(p, "expected an object");
          continue;
        }
        rd.reject_unknown(m[i], p + ".", {"velocity", "frames"});
        MotionSegment seg;
        if (m[i].contains("velocity")) {
          const auto v = rd.numbers(m[i].at("velocity"), p + ".velocity", 2);
          if (v.size() == 2) {
            seg.vx = v[0];
            seg.vy = v[1];
          }
        } else {
          rd.fail(p + ".velocity", "missing required field");
        }
        rd.number(m[i], "frames", p + ".", seg.frames, true);
        o.motion.push_back(seg);
      }
    }
  }
  if (j.contains("occlusions")) {
    const json& occ = j.at("occlusions");
    if (!occ.is_array()) {
      rd.fail(path + ".occlusions", "expected an array");
    } else {
      for (std::size_t i = 0; i < occ.size(); ++i) {
        const std::string p = path + ".occlusions[" + std::to_string(i) + "]";
        const auto r = rd.numbers(occ[i], p, 2);
        if (r.size() == 2) {
          if (r[0] != std::floor(r[0]) || r[1] != std::floor(r[1])) {
            rd.fail(p, "frame bounds must be integers");
          } else {
            o.occlusions.push_back({static_cast<int>(r[0]), static_cast<int>(r[1])});
          }
        }
      }
    }
  }
  return o;
}

double null_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<double>();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json box_json(const BBox& b) {
  if (b.empty) return nullptr;
  return json::array({b.cx, b.cy, b.w, b.h});
}

BBox box_from_json(const json& j) {
  if (j.is_null()) return BBox::none();
  return BBox::from_center(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
                           j.at(3).get<double>());
}

std::string format_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) return std::to_string(static_cast<long long>(v));
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

// --- scenarios ---------------------------------------------------------------

json scenario_to_json(const Scenario& sc) {
  json j;
  j["schema-version"] = kSchemaVersion;
  j["name"] = sc.name;
  j["grid"] = {{"width", sc.grid_w}, {"height", sc.grid_h}};
  j["num_frames"] = sc.num_frames;
  j["seed"] = sc.seed;
  j["d_app"] = sc.d_app;
  j["noise"] = {{"affinity_sigma", sc.noise.affinity_sigma}, {"jitter_sigma", sc.noise.jitter_sigma}};
  j["hallucination_rate"] = sc.hallucination_rate;
  j["target"] = object_to_json(sc.target);
  j["distractors"] = json::array();
  for (const auto& d : sc.distractors) j["distractors"].push_back(object_to_json(d));
  return j;
}

Scenario scenario_from_json(const json& j) {
  std::vector<std::string> errors;
  FieldReader rd(errors);
  Scenario sc;
  if (!j.is_object()) throw ValidationError({"scenario: expected a JSON object"});
  rd.reject_unknown(j, "", {"schema-version", "name", "grid", "num_frames", "seed", "d_app", "noise",
                            "hallucination_rate", "target", "distractors"});
  int version = 0;
  rd.number(j, "schema-version", "", version, true);
  if (j.contains("schema-version") && version != kSchemaVersion)
    rd.fail("schema-version", "unsupported version " + std::to_string(version));
  if (j.contains("name")) {
    if (j.at("name").is_string())
      sc.name = j.at("name").get<std::string>();
    else
      rd.fail("name", "expected a string");
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!g.is_object()) {
      rd.fail("grid", "expected an object with width and height");
    } else {
      rd.reject_unknown(g, "grid.", {"width", "height"});
      rd.number(g, "width", "grid.", sc.grid_w, true);
      rd.number(g, "height", "grid.", sc.grid_h, true);
    }
  }
  rd.number(j, "num_frames", "", sc.num_frames, true);
  rd.number(j, "seed", "", sc.seed, false);
  rd.number(j, "d_app", "", sc.d_app, false);
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    if (!n.is_object()) {
      rd.fail("noise", "expected an object");
    } else {
      rd.reject_unknown(n, "noise.", {"affinity_sigma", "jitter_sigma"});
      rd.number(n, "affinity_sigma", "noise.", sc.noise.affinity_sigma, false);
      rd.number(n, "jitter_sigma", "noise.", sc.noise.jitter_sigma, false);
    }
  }
  rd.number(j, "hallucination_rate", "", sc.hallucination_rate, false);
  if (!j.contains("target"))
    rd.fail("target", "missing required field");
  else
    sc.target = object_from_json(j.at("target"), "target", rd);
  if (j.contains("distractors")) {
    const json& ds = j.at("distractors");
    if (!ds.is_array()) {
      rd.fail("distractors", "expected an array");
    } else {
      for (std::size_t i = 0; i < ds.size(); ++i)
        sc.distractors.push_back(object_from_json(ds[i], "distractors[" + std::to_string(i) + "]", rd));
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  sc.validate();
  return sc;
}

namespace {

json parse_json_file(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Report the line of the failing byte.
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) line += text[i] == '\n';
    throw FormatError(path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
}

}  // namespace

Scenario load_scenario(const fs::path& path) {
  const json j = parse_json_file(path);
  try {
    Scenario sc = scenario_from_json(j);
    if (!j.contains("name")) sc.name = path.stem().string();
    return sc;
  } catch (const ValidationError& e) {
    std::vector<std::string> v;
    for (const auto& s : e.violations()) v.push_back(path.string() + ": " + s);
    throw ValidationError(std::move(v));
  }
}

void save_scenario(const fs::path& path, const Scenario& sc) {
  write_file(path, scenario_to_json(sc).dump(2) + "\n");
}

// --- tracker and run configuration ------------------------------------------

json tracker_config_to_json(const TrackerConfig& cfg) {
  return {
      {"motion_enabled", cfg.motion_enabled},
      {"memory_mode", to_string(cfg.memory_mode)},
      {"motion",
       {{"process_noise_pos", cfg.motion.process_noise_pos},
        {"process_noise_vel", cfg.motion.process_noise_vel},
        {"measure_noise", cfg.motion.measure_noise},
        {"tau_stab", cfg.motion.tau_stab},
        {"alpha_kf", cfg.motion.alpha_kf}}},
      {"gate",
       {{"tau_mask", cfg.gate.tau_mask},
        {"tau_obj", cfg.gate.tau_obj},
        {"tau_kf_mem", cfg.gate.tau_kf_mem},
        {"n_mem", cfg.gate.n_mem},
        {"n_max", cfg.gate.n_max}}},
  };
}

TrackerConfig tracker_config_from_json(const json& j) {
  std::vector<std::string> errors;
  FieldReader rd(errors);
  TrackerConfig cfg;
  if (!j.is_object()) throw ValidationError({"tracker: expected an object"});
  rd.reject_unknown(j, "tracker.", {"motion_enabled", "memory_mode", "motion", "gate"});
  rd.boolean(j, "motion_enabled", "tracker.", cfg.motion_enabled);
  if (j.contains("memory_mode")) {
    try {
      cfg.memory_mode = memory_mode_from_string(j.at("memory_mode").get<std::string>());
    } catch (const std::exception&) {
      rd.fail("tracker.memory_mode", "expected \"fifo\" or \"motion_aware\"");
    }
  }
  if (j.contains("motion") && !j.at("motion").is_object()) rd.fail("tracker.motion", "expected an object");
  if (j.contains("gate") && !j.at("gate").is_object()) rd.fail("tracker.gate", "expected an object");
  if (j.contains("motion") && j.at("motion").is_object()) {
    const json& m = j.at("motion");
    rd.reject_unknown(m, "tracker.motion.",
                      {"process_noise_pos", "process_noise_vel", "measure_noise", "tau_stab", "alpha_kf"});
    rd.number(m, "process_noise_pos", "tracker.motion.", cfg.motion.process_noise_pos, false);
    rd.number(m, "process_noise_vel", "tracker.motion.", cfg.motion.process_noise_vel, false);
    rd.number(m, "measure_noise", "tracker.motion.", cfg.motion.measure_noise, false);
    rd.number(m, "tau_stab", "tracker.motion.", cfg.motion.tau_stab, false);
    rd.number(m, "alpha_kf", "tracker.motion.", cfg.motion.alpha_kf, false);
  }
  if (j.contains("gate") && j.at("gate").is_object()) {
    const json& g = j.at("gate");
    rd.reject_unknown(g, "tracker.gate.", {"tau_mask", "tau_obj", "tau_kf_mem", "n_mem", "n_max"});
    rd.number(g, "tau_mask", "tracker.gate.", cfg.gate.tau_mask, false);
    rd.number(g, "tau_obj", "tracker.gate.", cfg.gate.tau_obj, false);
    rd.number(g, "tau_kf_mem", "tracker.gate.", cfg.gate.tau_kf_mem, false);
    rd.number(g, "n_mem", "tracker.gate.", cfg.gate.n_mem, false);
    rd.number(g, "n_max", "tracker.gate.", cfg.gate.n_max, false);
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  cfg.validate();
  return cfg;
}

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
  std::vector<std::string> errors;
  FieldReader rd(errors);
  RunConfig cfg;
  if (!j.is_object()) throw ValidationError({"run config: expected a JSON object"});
  rd.reject_unknown(j, "", {"schema-version", "scenarios", "sequences", "tracker", "seeds", "out_dir", "emit_plots"});
  int version = 0;
  rd.number(j, "schema-version", "", version, true);
  if (j.contains("schema-version") && version != kSchemaVersion)
    rd.fail("schema-version", "unsupported version " + std::to_string(version));
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  if (j.contains("scenarios")) {
    if (!j.at("scenarios").is_array()) {
      rd.fail("scenarios", "expected an array of paths");
    } else {
      for (const auto& s : j.at("scenarios")) {
        if (s.is_string())
          cfg.scenarios.push_back(resolve(s.get<std::string>()));
        else
          rd.fail("scenarios", "expected an array of paths");
      }
    }
  }
  if (j.contains("sequences")) {
    const json& seqs = j.at("sequences");
    for (std::size_t i = 0; seqs.is_array() && i < seqs.size(); ++i) {
      const std::string p = "sequences[" + std::to_string(i) + "].";
      const json& s = seqs[i];
      if (!s.is_object() || !s.contains("proposals") || !s.contains("ground_truth") ||
          !s.at("proposals").is_string() || !s.at("ground_truth").is_string()) {
        rd.fail(p.substr(0, p.size() - 1), "expected {name, proposals, ground_truth[, absence]}");
        continue;
      }
      ProposalSequence ps;
      ps.proposals = resolve(s.at("proposals").get<std::string>());
      ps.ground_truth = resolve(s.at("ground_truth").get<std::string>());
      ps.name = s.contains("name") && s.at("name").is_string() ? s.at("name").get<std::string>()
                                                              : ps.proposals.stem().string();
      if (s.contains("absence") && s.at("absence").is_string()) ps.absence = resolve(s.at("absence").get<std::string>());
      cfg.proposal_sequences.push_back(std::move(ps));
    }
    if (!seqs.is_array()) rd.fail("sequences", "expected an array");
  }
  if (j.contains("seeds")) {
    const json& s = j.at("seeds");
    if (!s.is_array()) {
      rd.fail("seeds", "expected an array of non-negative integers");
    } else {
      for (const auto& x : s) {
        if (x.is_number_unsigned() || (x.is_number_integer() && x.get<std::int64_t>() >= 0))
          cfg.seeds.push_back(x.get<std::uint64_t>());
        else
          rd.fail("seeds", "expected an array of non-negative integers");
      }
    }
  }
  if (j.contains("out_dir")) {
    if (j.at("out_dir").is_string())
      cfg.out_dir = resolve(j.at("out_dir").get<std::string>());
    else
      rd.fail("out_dir", "expected a path string");
  }
  rd.boolean(j, "emit_plots", "", cfg.emit_plots);
  if (j.contains("tracker")) {
    try {
      cfg.tracker = tracker_config_from_json(j.at("tracker"));
    } catch (const ValidationError& e) {
      errors.insert(errors.end(), e.violations().begin(), e.violations().end());
    }
  }
  if (cfg.scenarios.empty() && cfg.proposal_sequences.empty())
    rd.fail("scenarios", "at least one scenario or sequence is required");
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  const json j = parse_json_file(path);
  try {
    return run_config_from_json(j, path.parent_path());
  } catch (const ValidationError& e) {
    std::vector<std::string> v;
    for (const auto& s : e.violations()) v.push_back(path.string() + ": " + s);
    throw ValidationError(std::move(v));
  }
}

json canonical_run_json(const RunConfig& cfg) {
  json j;
  j["schema-version"] = kSchemaVersion;
  j["scenarios"] = json::array();
  for (const auto& s : cfg.scenarios) j["scenarios"].push_back(s.lexically_normal().generic_string());
  j["sequences"] = json::array();
  for (const auto& s : cfg.proposal_sequences) {
    j["sequences"].push_back({{"name", s.name},
                              {"proposals", s.proposals.lexically_normal().generic_string()},
                              {"ground_truth", s.ground_truth.lexically_normal().generic_string()},
                              {"absence", s.absence ? json(s.absence->lexically_normal().generic_string()) : json(nullptr)}});
  }
  j["seeds"] = cfg.seeds;
  j["tracker"] = tracker_config_to_json(cfg.tracker);
  return j;
}

std::string config_hash(const json& canonical) {
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  const std::string text = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// --- ground truth -------------------------------------------------------------

GroundTruth parse_gt_text(std::string_view text) {
  GroundTruth gt;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    if (line.empty()) {
      // Blank lines are only allowed as trailing padding.
      const auto rest = pos < text.size() ? text.substr(pos) : std::string_view{};
      if (std::all_of(rest.begin(), rest.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
        break;
      throw FormatError("line " + std::to_string(line_no) + ": empty line");
    }
    double v[4];
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view tok = line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start);
      while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
      while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
      if (field >= 4) throw FormatError("line " + std::to_string(line_no) + ": expected 4 comma-separated fields");
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v[field]);
      if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v[field]))
        throw FormatError("line " + std::to_string(line_no) + ": non-numeric token '" + std::string(tok) + "'");
      ++field;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != 4) throw FormatError("line " + std::to_string(line_no) + ": expected 4 comma-separated fields");
    if (v[2] < 0.0 || v[3] < 0.0) throw FormatError("line " + std::to_string(line_no) + ": negative box size");
    const bool absent = v[2] == 0.0 || v[3] == 0.0;
    gt.boxes.push_back(absent ? BBox::none() : BBox::from_top_left(v[0], v[1], v[2], v[3]));
    gt.absent.push_back(absent);
  }
  return gt;
}

GroundTruth parse_gt(const fs::path& path) {
  try {
    return parse_gt_text(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void apply_absence(GroundTruth& gt, std::string_view flags_text) {
  std::vector<bool> flags;
  for (char c : flags_text) {
    if (c == '0' || c == '1')
      flags.push_back(c == '1');
    else if (!(c == ',' || std::isspace(static_cast<unsigned char>(c))))
      throw FormatError(std::string("absence file: unexpected character '") + c + "'");
  }
  if (flags.size() != gt.size())
    throw FormatError("absence file has " + std::to_string(flags.size()) + " flags for " +
                      std::to_string(gt.size()) + " frames");
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) {
      gt.absent[i] = true;
      gt.boxes[i] = BBox::none();
    }
  }
}

GroundTruth parse_gt(const fs::path& path, const fs::path& absence_path) {
  GroundTruth gt = parse_gt(path);
  try {
    apply_absence(gt, read_file(absence_path));
  } catch (const FormatError& e) {
    throw FormatError(absence_path.string() + ": " + e.what());
  }
  return gt;
}

std::string format_gt(const GroundTruth& gt) {
  std::string out;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const BBox& b = gt.boxes[i];
    if (gt.absent[i] || b.empty) {
      out += "0,0,0,0\n";
      continue;
    }
    out += format_number(b.x()) + "," + format_number(b.y()) + "," + format_number(b.w) + "," +
           format_number(b.h) + "\n";
  }
  return out;
}

void write_gt(const fs::path& path, const GroundTruth& gt) { write_file(path, format_gt(gt)); }

GroundTruth ground_truth_of(const Sequence& seq) {
  GroundTruth gt;
  for (const auto& f : seq.frames) {
    gt.boxes.push_back(f.target_box());
    gt.absent.push_back(f.target_absent());
  }
  return gt;
}

// --- track results ------------------------------------------------------------

void write_track_result(std::ostream& os, const TrackResult& r, bool include_timing) {
  json header = {{"type", "header"},
                 {"schema-version", kSchemaVersion},
                 {"sequence", r.sequence_id},
                 {"cell", r.cell},
                 {"seed", r.seed},
                 {"num_frames", r.frames.size()},
                 {"config", tracker_config_to_json(r.config)}};
  os << header.dump() << '\n';
  for (std::size_t i = 0; i < r.frames.size(); ++i) {
    const FrameRecord& f = r.frames[i];
    json j = {{"frame", f.frame},
              {"box", box_json(f.chosen_box)},
              {"absent", f.target_absent},
              {"s_mask", finite_or_null(f.s_mask)},
              {"s_obj", finite_or_null(f.s_obj)},
              {"s_kf", finite_or_null(f.s_kf)},
              {"hybrid", finite_or_null(f.hybrid_score)},
              {"bank", f.bank_frames}};
    if (include_timing && i < r.wall_ns.size()) j["wall_ns"] = r.wall_ns[i];
    os << j.dump() << '\n';
  }
}

void save_track_result(const fs::path& path, const TrackResult& result, bool include_timing) {
  std::ostringstream os;
  write_track_result(os, result, include_timing);
  write_file(path, os.str());
}

TrackResult read_track_result(std::istream& is) {
  TrackResult r;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t declared = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError("result line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!have_header) {
        if (j.value("type", "") != "header") throw FormatError("result line 1: missing header");
        r.sequence_id = j.at("sequence").get<std::string>();
        r.cell = j.value("cell", "");
        r.seed = j.value("seed", std::uint64_t{0});
        declared = j.at("num_frames").get<std::size_t>();
        if (j.contains("config")) r.config = tracker_config_from_json(j.at("config"));
        have_header = true;
        continue;
      }
      FrameRecord f;
      f.frame = j.at("frame").get<int>();
      f.chosen_box = box_from_json(j.at("box"));
      f.target_absent = j.at("absent").get<bool>();
      f.s_mask = null_or(j, "s_mask", 0.0);
      f.s_obj = null_or(j, "s_obj", -std::numeric_limits<double>::infinity());
      f.s_kf = null_or(j, "s_kf", 0.0);
      f.hybrid_score = null_or(j, "hybrid", 0.0);
      f.bank_frames = j.value("bank", std::vector<int>{});
      if (j.contains("wall_ns")) r.wall_ns.push_back(j.at("wall_ns").get<std::int64_t>());
      if (f.frame != static_cast<int>(r.frames.size()))
        throw FormatError("result line " + std::to_string(line_no) + ": frame indices must be contiguous from 0");
      r.frames.push_back(std::move(f));
    } catch (const json::exception& e) {
      throw FormatError("result line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw FormatError("result file is empty");
  if (declared != r.frames.size())
    throw FormatError("result header declares " + std::to_string(declared) + " frames, found " +
                      std::to_string(r.frames.size()));
  return r;
}

TrackResult load_track_result(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return read_track_result(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// --- proposals ------------------------------------------------------------------

FrameProposals proposals_from_json(const json& j) {
  FrameProposals p;
  for (const auto& c : j.at("candidates")) {
    CandidateMask m;
    m.mask = RleMask::parse(c.at("mask").get<std::string>());
    m.s_mask = c.at("s_mask").get<double>();
    m.s_obj = c.at("s_obj").get<double>();
    if (!(m.s_mask >= 0.0 && m.s_mask <= 1.0)) throw FormatError("s_mask must lie in [0, 1]");
    m.appearance = c.value("appearance", std::vector<double>{});
    p.candidates.push_back(std::move(m));
  }
  return p;
}

json proposals_to_json(int frame, const FrameProposals& p) {
  json j = {{"frame", frame}, {"candidates", json::array()}};
  for (const auto& c : p.candidates) {
    json cj = {{"mask", c.mask.to_string()}, {"s_mask", c.s_mask}, {"s_obj", c.s_obj}};
    if (!c.appearance.empty()) cj["appearance"] = c.appearance;
    j["candidates"].push_back(std::move(cj));
  }
  return j;
}

FileProposalSource::FileProposalSource(const fs::path& path, std::size_t expected_frames)
    : frames_(expected_frames), expected_frames_(expected_frames) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const auto frame = j.at("frame").get<std::int64_t>();
      if (frame < 0) throw FormatError("negative frame index");
      if (static_cast<std::size_t>(frame) < expected_frames_)
        frames_[static_cast<std::size_t>(frame)] = proposals_from_json(j);
    } catch (const std::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

FrameProposals FileProposalSource::propose(int frame, const MemoryBank&) {
  if (frame < 0 || static_cast<std::size_t>(frame) >= frames_.size() || !frames_[static_cast<std::size_t>(frame)])
    throw SourceExhausted("no proposals for frame " + std::to_string(frame));
  return *frames_[static_cast<std::size_t>(frame)];
}

// --- metrics --------------------------------------------------------------------

json metric_report_to_json(const eval::MetricReport& r) {
  json op = json::object();
  for (const auto& [t, v] : r.op) {
    char key[16];
    std::snprintf(key, sizeof key, "%.2f", t);
    op[key] = v;
  }
  return {{"auc", r.auc},
          {"p_at_20", r.p_at_20},
          {"p_norm_auc", r.p_norm_auc},
          {"ao", r.ao},
          {"op", op},
          {"success_curve", r.success_curve},
          {"precision_curve", r.precision_curve},
          {"n_frames", r.n_frames}};
}

eval::MetricReport metric_report_from_json(const json& j) {
  eval::MetricReport r;
  r.auc = j.at("auc").get<double>();
  r.p_at_20 = j.at("p_at_20").get<double>();
  r.p_norm_auc = j.at("p_norm_auc").get<double>();
  r.ao = j.at("ao").get<double>();
  for (const auto& [k, v] : j.at("op").items()) r.op[std::stod(k)] = v.get<double>();
  const auto sc = j.at("success_curve").get<std::vector<double>>();
  const auto pc = j.at("precision_curve").get<std::vector<double>>();
  if (sc.size() != r.success_curve.size() || pc.size() != r.precision_curve.size())
    throw FormatError("metric report curves have unexpected length");
  std::copy(sc.begin(), sc.end(), r.success_curve.begin());
  std::copy(pc.begin(), pc.end(), r.precision_curve.begin());
  r.n_frames = j.at("n_frames").get<std::size_t>();
  return r;
}

std::string success_curve_csv(const eval::MetricReport& r) {
  std::string out = "threshold,value\n";
  for (std::size_t k = 0; k < r.success_curve.size(); ++k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f,%.10f\n", eval::success_threshold(k), r.success_curve[k]);
    out += buf;
  }
  return out;
}

std::string precision_curve_csv(const eval::MetricReport& r) {
  std::string out = "threshold,value\n";
  for (std::size_t k = 0; k < r.precision_curve.size(); ++k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.10f\n", k, r.precision_curve[k]);
    out += buf;
  }
  return out;
}

// --- misc -------------------------------------------------------------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace kftrack::io
