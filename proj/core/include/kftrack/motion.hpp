#pragma once

#include <Eigen/Core>

#include "kftrack/geometry.hpp"

namespace kftrack {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateMatrix = Eigen::Matrix<double, 8, 8>;

/// Noise model and gating parameters for the box Kalman filter.
///
/// All noise terms are standard deviations expressed as a fraction of the
/// current box height, so the filter behaves the same at every object scale.
struct MotionConfig {
  double process_noise_pos = 1.0 / 20.0;
  double process_noise_vel = 1.0 / 160.0;
  double measure_noise = 1.0 / 20.0;
  /// Consecutive successful updates required before motion scores are trusted.
  int tau_stab = 3;
  /// Weight of the motion score in the hybrid selection score.
  double alpha_kf = 0.15;

  /// Throws ValidationError listing every violated constraint.
  void validate() const;
};

/// Constant-velocity state [cx, cy, w, h, vcx, vcy, vw, vh] with covariance.
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateMatrix cov = StateMatrix::Identity();
  int frames_since_init = 0;
  int consecutive_updates = 0;

  BBox box() const;
};

struct Prediction {
  KalmanState state;
  BBox box;
};

KalmanState kf_init(const BBox& box, const MotionConfig& cfg);

/// One frame of constant-velocity propagation.
Prediction kf_predict(const KalmanState& s, const MotionConfig& cfg);

/// Joseph-form correction with the measured box. Throws on non-finite or empty
/// measurements; the input state is never modified.
KalmanState kf_update(const KalmanState& s, const BBox& z, const MotionConfig& cfg);

/// Records a frame without a measurement: the stability counter restarts.
KalmanState kf_mark_missed(const KalmanState& s);

/// True once the filter has been updated tau_stab frames in a row.
bool motion_active(const KalmanState& s, const MotionConfig& cfg);

}  // namespace kftrack
