#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kftrack/geometry.hpp"

namespace kftrack {

/// One proposer output: a mask with its affinity and object-presence scores.
struct CandidateMask {
  RleMask mask;
  /// Mask-quality (affinity) score in [0, 1].
  double s_mask = 0.0;
  /// Object-presence logit; positive means the target is present.
  double s_obj = 0.0;
  /// Latent appearance of the source object. Empty for external proposers.
  std::vector<double> appearance;
};

struct SelectionOutcome {
  std::optional<std::size_t> chosen_index;
  BBox chosen_box;
  double s_mask = 0.0;
  double s_obj = 0.0;
  double s_kf = 0.0;
  double hybrid_score = 0.0;
  bool target_absent = true;
};

/// IoU between the predicted box and each candidate's tight bounding box.
std::vector<double> kf_iou_score(const BBox& predicted, std::span<const CandidateMask> candidates);

/// Same as kf_iou_score with candidate boxes already computed.
std::vector<double> kf_iou_score(const BBox& predicted, std::span<const BBox> candidate_boxes);

/// Highest affinity among candidates whose object logit is positive.
SelectionOutcome select_baseline(std::span<const CandidateMask> candidates);

/// Highest alpha * s_kf + (1 - alpha) * s_mask among present candidates.
/// alpha collapses to 0 while the motion model is not yet stable. Ties go to
/// the lowest index. Throws ValidationError when kf_scores is misaligned.
SelectionOutcome select_hybrid(std::span<const CandidateMask> candidates,
                               std::span<const double> kf_scores, double alpha_kf,
                               bool motion_is_active);

}  // namespace kftrack
