#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kftrack/eval.hpp"
#include "kftrack/simworld.hpp"
#include "kftrack/tracker.hpp"

namespace kftrack::io {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kSchemaVersion = 1;

// --- scenarios ---------------------------------------------------------------

json scenario_to_json(const Scenario& sc);
/// Throws ValidationError whose violations name the offending field paths.
Scenario scenario_from_json(const json& j);
Scenario load_scenario(const fs::path& path);
void save_scenario(const fs::path& path, const Scenario& sc);

// --- tracker and run configuration ------------------------------------------

json tracker_config_to_json(const TrackerConfig& cfg);
/// Missing fields take their defaults; unknown fields are rejected.
TrackerConfig tracker_config_from_json(const json& j);

/// A sequence supplied by an external proposer instead of the simulator.
struct ProposalSequence {
  std::string name;
  fs::path proposals;
  fs::path ground_truth;
  std::optional<fs::path> absence;
};

struct RunConfig {
  std::vector<fs::path> scenarios;
  std::vector<ProposalSequence> proposal_sequences;
  TrackerConfig tracker;
  std::vector<std::uint64_t> seeds;
  fs::path out_dir = "out";
  bool emit_plots = false;
};

/// Relative paths are resolved against `base_dir`.
RunConfig run_config_from_json(const json& j, const fs::path& base_dir = {});
RunConfig load_run_config(const fs::path& path);

/// Canonical JSON of the fields that affect results (paths, seeds, tracker).
json canonical_run_json(const RunConfig& cfg);
/// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const json& canonical);

// --- ground truth -------------------------------------------------------------

struct GroundTruth {
  std::vector<BBox> boxes;
  std::vector<bool> absent;

  std::size_t size() const { return boxes.size(); }
};

/// Parses "x,y,w,h" lines in top-left format. Trailing whitespace and CRLF are
/// accepted; w = h = 0 marks an absent target. Throws FormatError with the
/// line number on malformed input.
GroundTruth parse_gt_text(std::string_view text);
GroundTruth parse_gt(const fs::path& path);
/// Applies a companion 0/1 absence file (comma or newline separated).
void apply_absence(GroundTruth& gt, std::string_view flags_text);
GroundTruth parse_gt(const fs::path& path, const fs::path& absence_path);

std::string format_gt(const GroundTruth& gt);
void write_gt(const fs::path& path, const GroundTruth& gt);
GroundTruth ground_truth_of(const Sequence& seq);

// --- track results ------------------------------------------------------------

/// JSON-lines: one header object, then one object per frame.
void write_track_result(std::ostream& os, const TrackResult& result, bool include_timing = false);
void save_track_result(const fs::path& path, const TrackResult& result, bool include_timing = false);
TrackResult read_track_result(std::istream& is);
TrackResult load_track_result(const fs::path& path);

// --- proposals from an external segmenter ------------------------------------

/// Reads proposals from JSON-lines, one object per frame:
/// {"frame": t, "candidates": [{"mask": "W H: runs...", "s_mask": .., "s_obj": .., "appearance": [..]}]}
class FileProposalSource final : public ProposalSource {
 public:
  /// `expected_frames` is the sequence length; frames missing from the file
  /// raise SourceExhausted when requested.
  FileProposalSource(const fs::path& path, std::size_t expected_frames);
  std::size_t num_frames() const override { return expected_frames_; }
  FrameProposals propose(int frame, const MemoryBank& bank) override;

 private:
  std::vector<std::optional<FrameProposals>> frames_;
  std::size_t expected_frames_;
};

FrameProposals proposals_from_json(const json& j);
json proposals_to_json(int frame, const FrameProposals& p);

// --- metrics --------------------------------------------------------------------

json metric_report_to_json(const eval::MetricReport& r);
eval::MetricReport metric_report_from_json(const json& j);
/// "threshold,value" rows for the success curve.
std::string success_curve_csv(const eval::MetricReport& r);
/// "threshold,value" rows for the precision curve (radius in pixels).
std::string precision_curve_csv(const eval::MetricReport& r);

// --- misc -------------------------------------------------------------------------

std::string read_file(const fs::path& path);
/// Creates missing parent directories and truncates an existing file.
void write_file(const fs::path& path, std::string_view contents);

struct Series {
  std::string label;
  std::vector<double> y;
};

/// Minimal SVG line chart used for success and precision plots.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::vector<double>& x, const std::vector<Series>& series);

}  // namespace kftrack::io
