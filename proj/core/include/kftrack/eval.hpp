#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "kftrack/geometry.hpp"

namespace kftrack::eval {

/// Prediction and ground truth for one frame.
struct FramePair {
  BBox pred;
  BBox gt;
  bool gt_absent = false;
};

inline constexpr std::size_t kSuccessPoints = 21;     // thresholds 0.00, 0.05, ..., 1.00
inline constexpr std::size_t kNormPrecisionPoints = 101;  // thresholds 0.000, 0.005, ..., 0.500
inline constexpr std::size_t kPrecisionPoints = 51;   // radii 0..50 px
inline constexpr double kPrecisionRadius = 20.0;

double success_threshold(std::size_t k);
double norm_precision_threshold(std::size_t k);

struct SuccessResult {
  std::array<double, kSuccessPoints> curve{};
  double auc = 0.0;
};

struct MetricReport {
  double auc = 0.0;
  double p_at_20 = 0.0;
  double p_norm_auc = 0.0;
  double ao = 0.0;
  std::map<double, double> op;  // keys 0.5 and 0.75
  std::array<double, kSuccessPoints> success_curve{};
  std::array<double, kPrecisionPoints> precision_curve{};
  std::size_t n_frames = 0;
};

/// Overlap with absence handling: a correct absence call scores 1.
double frame_overlap(const FramePair& p);

/// Fraction of frames whose overlap strictly exceeds each threshold, and its mean.
/// Throws DomainError on empty input.
SuccessResult success_auc(std::span<const FramePair> pairs);

/// Fraction of present-target frames with centre error <= radius pixels.
/// Frames with an empty prediction count as misses. Returns 0 if no frame has a target.
double precision_at(std::span<const FramePair> pairs, double radius = kPrecisionRadius);

/// Mean over 101 thresholds of the normalised-precision curve.
double norm_precision_auc(std::span<const FramePair> pairs);

struct OverlapSummary {
  double ao = 0.0;
  double op50 = 0.0;
  double op75 = 0.0;
};

OverlapSummary ao_and_op(std::span<const FramePair> pairs);

/// Every metric for one sequence.
MetricReport evaluate(std::span<const FramePair> pairs);

/// Unweighted per-sequence mean of reports (curves averaged pointwise).
MetricReport aggregate(std::span<const MetricReport> reports);

}  // namespace kftrack::eval
