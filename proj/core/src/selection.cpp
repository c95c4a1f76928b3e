#include "kftrack/selection.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "kftrack/error.hpp"

namespace kftrack {

namespace {

SelectionOutcome absent_outcome(std::span<const CandidateMask> candidates) {
  SelectionOutcome out;
  out.target_absent = true;
  out.chosen_box = BBox::none();
  // Keep the strongest observed presence logit so the memory gate sees it.
  out.s_obj = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) out.s_obj = std::max(out.s_obj, c.s_obj);
  return out;
}

template <typename ScoreFn>
SelectionOutcome argmax_present(std::span<const CandidateMask> candidates, ScoreFn score) {
  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!(candidates[i].s_obj > 0.0)) continue;
    const double s = score(i);
    if (!best || s > best_score) {
      best = i;
      best_score = s;
    }
  }
  if (!best) return absent_outcome(candidates);

  const auto& c = candidates[*best];
  SelectionOutcome out;
  out.chosen_index = best;
  out.chosen_box = mask_to_bbox(c.mask);
  out.s_mask = c.s_mask;
  out.s_obj = c.s_obj;
  out.hybrid_score = best_score;
  out.target_absent = out.chosen_box.empty;
  if (out.target_absent) out.chosen_index.reset();
  return out;
}

}  // namespace

std::vector<double> kf_iou_score(const BBox& predicted, std::span<const BBox> candidate_boxes) {
  std::vector<double> scores;
  scores.reserve(candidate_boxes.size());
  for (const auto& b : candidate_boxes) scores.push_back(iou(predicted, b));
  return scores;
}

std::vector<double> kf_iou_score(const BBox& predicted, std::span<const CandidateMask> candidates) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(iou(predicted, mask_to_bbox(c.mask)));
  return scores;
}

SelectionOutcome select_baseline(std::span<const CandidateMask> candidates) {
  return argmax_present(candidates, [&](std::size_t i) { return candidates[i].s_mask; });
}

SelectionOutcome select_hybrid(std::span<const CandidateMask> candidates,
                               std::span<const double> kf_scores, double alpha_kf,
                               bool motion_is_active) {
  if (kf_scores.size() != candidates.size()) {
    throw ValidationError({"kf_scores has " + std::to_string(kf_scores.size()) +
                           " entries for " + std::to_string(candidates.size()) + " candidates"});
  }
  if (!(alpha_kf >= 0.0 && alpha_kf <= 1.0)) throw ValidationError({"alpha_kf must lie in [0, 1]"});
  const double alpha = motion_is_active ? alpha_kf : 0.0;
  auto out = argmax_present(candidates, [&](std::size_t i) {
    return alpha * kf_scores[i] + (1.0 - alpha) * candidates[i].s_mask;
  });
  if (out.chosen_index) out.s_kf = kf_scores[*out.chosen_index];
  return out;
}

}  // namespace kftrack
