#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kftrack/geometry.hpp"
#include "kftrack/memory.hpp"
#include "kftrack/selection.hpp"

namespace kftrack {

/// Constant velocity (pixels/frame) held for `frames` steps.
struct MotionSegment {
  double vx = 0.0;
  double vy = 0.0;
  int frames = 0;
};

/// Half-open frame range [begin, end) of full occlusion.
struct FrameRange {
  int begin = 0;
  int end = 0;
};

struct ObjectSpec {
  BBox box;
  std::vector<double> appearance;
  /// Applied in order; the object is static once every segment is used up.
  std::vector<MotionSegment> motion;
  std::vector<FrameRange> occlusions;
};

struct NoiseSpec {
  double affinity_sigma = 0.0;
  double jitter_sigma = 0.0;
};

/// Synthetic world description. Object 0 is always the target.
struct Scenario {
  std::string name = "scenario";
  int grid_w = 256;
  int grid_h = 256;
  int num_frames = 100;
  std::uint64_t seed = 0;
  int d_app = 8;
  ObjectSpec target;
  std::vector<ObjectSpec> distractors;
  NoiseSpec noise;
  double hallucination_rate = 0.0;

  std::size_t num_objects() const { return 1 + distractors.size(); }
  const ObjectSpec& object(std::size_t i) const { return i == 0 ? target : distractors[i - 1]; }

  /// Throws ValidationError listing every violation.
  void validate() const;
};

/// Ground truth of one frame; index 0 of each vector is the target.
struct FrameTruth {
  std::vector<BBox> boxes;
  std::vector<double> visibility;

  bool target_absent() const { return visibility.front() <= 0.0; }
  BBox target_box() const { return target_absent() ? BBox::none() : boxes.front(); }
};

struct Sequence {
  std::string name;
  int grid_w = 0;
  int grid_h = 0;
  std::vector<FrameTruth> frames;

  std::size_t num_frames() const { return frames.size(); }
};

struct FrameProposals {
  std::vector<CandidateMask> candidates;
};

/// Visibility of an object at frame t given its occlusion intervals: 0 inside
/// an interval, ramping 1/4, 2/4, 3/4 over the three frames on either side.
double visibility_at(const std::vector<FrameRange>& occlusions, int t);

/// Integrates piecewise-constant velocities with reflection at the grid border.
Sequence generate_sequence(const Scenario& sc);

/// Memory-conditioned mask proposer standing in for a promptable segmenter.
///
/// Every object yields one rectangular candidate from its jittered true box.
/// Affinity is the cosine similarity between the object's latent appearance
/// and the mean appearance of the memory bank, scaled by visibility, plus
/// noise. The presence logit is 4 * (visibility - 0.5). Random draws come
/// from streams keyed by (seed, frame, object), so the memory bank is the
/// only input that differs between tracker configurations.
class SimProposer {
 public:
  SimProposer(const Scenario& scenario, const Sequence& sequence);

  std::size_t num_frames() const { return sequence_->num_frames(); }
  FrameProposals propose(int t, const MemoryBank& bank) const;
  /// Latent of the object whose frame-0 box overlaps `box` the most.
  std::vector<double> encode_prompt(const BBox& box) const;

 private:
  const Scenario* scenario_;
  const Sequence* sequence_;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace kftrack
