#include "kftrack/eval.hpp"

#include <algorithm>
#include <limits>

#include "kftrack/error.hpp"

namespace kftrack::eval {

double success_threshold(std::size_t k) { return static_cast<double>(k) / 20.0; }
double norm_precision_threshold(std::size_t k) { return static_cast<double>(k) / 200.0; }

double frame_overlap(const FramePair& p) {
  if (p.gt_absent) return p.pred.empty ? 1.0 : 0.0;
  return iou(p.pred, p.gt);
}

SuccessResult success_auc(std::span<const FramePair> pairs) {
  if (pairs.empty()) throw DomainError("success_auc needs at least one frame");
  std::vector<double> overlaps;
  overlaps.reserve(pairs.size());
  for (const auto& p : pairs) overlaps.push_back(frame_overlap(p));
  std::sort(overlaps.begin(), overlaps.end());

  SuccessResult r;
  const double n = static_cast<double>(overlaps.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < kSuccessPoints; ++k) {
    const auto above = overlaps.end() - std::upper_bound(overlaps.begin(), overlaps.end(),
                                                         success_threshold(k));
    r.curve[k] = static_cast<double>(above) / n;
    sum += r.curve[k];
  }
  r.auc = sum / static_cast<double>(kSuccessPoints);
  return r;
}

namespace {

// Centre errors of frames with a present target; +inf for empty predictions.
template <typename DistanceFn>
std::vector<double> present_errors(std::span<const FramePair> pairs, DistanceFn dist) {
  std::vector<double> errors;
  errors.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.gt_absent) continue;
    errors.push_back(p.pred.empty ? std::numeric_limits<double>::infinity() : dist(p.pred, p.gt));
  }
  std::sort(errors.begin(), errors.end());
  return errors;
}

double fraction_within(const std::vector<double>& sorted, double limit) {
  if (sorted.empty()) return 0.0;
  const auto within = std::upper_bound(sorted.begin(), sorted.end(), limit) - sorted.begin();
  return static_cast<double>(within) / static_cast<double>(sorted.size());
}

}  // namespace

double precision_at(std::span<const FramePair> pairs, double radius) {
  return fraction_within(present_errors(pairs, center_distance), radius);
}

double norm_precision_auc(std::span<const FramePair> pairs) {
  const auto errors = present_errors(pairs, normalized_center_distance);
  if (errors.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < kNormPrecisionPoints; ++k)
    sum += fraction_within(errors, norm_precision_threshold(k));
  return sum / static_cast<double>(kNormPrecisionPoints);
}

OverlapSummary ao_and_op(std::span<const FramePair> pairs) {
  if (pairs.empty()) throw DomainError("ao_and_op needs at least one frame");
  OverlapSummary s;
  std::size_t above50 = 0, above75 = 0;
  for (const auto& p : pairs) {
    const double o = frame_overlap(p);
    s.ao += o;
    above50 += o > 0.5;
    above75 += o > 0.75;
  }
  const double n = static_cast<double>(pairs.size());
  s.ao /= n;
  s.op50 = static_cast<double>(above50) / n;
  s.op75 = static_cast<double>(above75) / n;
  return s;
}

MetricReport evaluate(std::span<const FramePair> pairs) {
  MetricReport r;
  const auto success = success_auc(pairs);
  r.auc = success.auc;
  r.success_curve = success.curve;
  const auto errors = present_errors(pairs, center_distance);
  for (std::size_t k = 0; k < kPrecisionPoints; ++k)
    r.precision_curve[k] = fraction_within(errors, static_cast<double>(k));
  r.p_at_20 = fraction_within(errors, kPrecisionRadius);
  r.p_norm_auc = norm_precision_auc(pairs);
  const auto ov = ao_and_op(pairs);
  r.ao = ov.ao;
  r.op[0.5] = ov.op50;
  r.op[0.75] = ov.op75;
  r.n_frames = pairs.size();
  return r;
}

MetricReport aggregate(std::span<const MetricReport> reports) {
  if (reports.empty()) throw DomainError("aggregate needs at least one report");
  MetricReport a;
  const double n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    a.auc += r.auc / n;
    a.p_at_20 += r.p_at_20 / n;
    a.p_norm_auc += r.p_norm_auc / n;
    a.ao += r.ao / n;
    for (const auto& [t, v] : r.op) a.op[t] += v / n;
    for (std::size_t k = 0; k < kSuccessPoints; ++k) a.success_curve[k] += r.success_curve[k] / n;
    for (std::size_t k = 0; k < kPrecisionPoints; ++k) a.precision_curve[k] += r.precision_curve[k] / n;
    a.n_frames += r.n_frames;
  }
  return a;
}

}  // namespace kftrack::eval
