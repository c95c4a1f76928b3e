#include "kftrack/motion.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kftrack/error.hpp"

namespace kftrack {

namespace {

using MeasVector = Eigen::Matrix<double, 4, 1>;
using MeasMatrix = Eigen::Matrix<double, 4, 4>;
using GainMatrix = Eigen::Matrix<double, 8, 4>;

constexpr double kMinSize = 1.0;

StateMatrix transition() {
  StateMatrix F = StateMatrix::Identity();
  for (int i = 0; i < 4; ++i) F(i, 4 + i) = 1.0;
  return F;
}

}  // namespace

void MotionConfig::validate() const {
  std::vector<std::string> v;
  if (!(process_noise_pos > 0.0)) v.emplace_back("process_noise_pos must be > 0");
  if (!(process_noise_vel > 0.0)) v.emplace_back("process_noise_vel must be > 0");
  if (!(measure_noise > 0.0)) v.emplace_back("measure_noise must be > 0");
  if (tau_stab < 0) v.emplace_back("tau_stab must be >= 0");
  if (!(alpha_kf >= 0.0 && alpha_kf <= 1.0)) v.emplace_back("alpha_kf must lie in [0, 1]");
  if (!v.empty()) throw ValidationError(std::move(v));
}

BBox KalmanState::box() const {
  return BBox::from_center(mean(0), mean(1), mean(2), mean(3));
}

KalmanState kf_init(const BBox& box, const MotionConfig& cfg) {
  if (box.empty) throw DomainError("cannot initialise the Kalman filter from an empty box");
  KalmanState s;
  s.mean << box.cx, box.cy, box.w, box.h, 0.0, 0.0, 0.0, 0.0;
  const double pos_std = 2.0 * cfg.measure_noise * box.h;
  const double vel_std = 10.0 * cfg.measure_noise * box.h;
  StateVector diag;
  diag << pos_std, pos_std, pos_std, pos_std, vel_std, vel_std, vel_std, vel_std;
  s.cov = diag.array().square().matrix().asDiagonal();
  return s;
}

Prediction kf_predict(const KalmanState& s, const MotionConfig& cfg) {
  static const StateMatrix F = transition();
  const double h = std::max(s.mean(3), kMinSize);
  const double pos_std = cfg.process_noise_pos * h;
  const double vel_std = cfg.process_noise_vel * h;
  StateVector q;
  q << pos_std, pos_std, pos_std, pos_std, vel_std, vel_std, vel_std, vel_std;

  Prediction p;
  p.state = s;
  p.state.mean = F * s.mean;
  p.state.cov = F * s.cov * F.transpose();
  p.state.cov.diagonal() += q.array().square().matrix();
  p.state.frames_since_init = s.frames_since_init + 1;
  p.box = BBox::from_center(p.state.mean(0), p.state.mean(1), std::max(p.state.mean(2), kMinSize),
                            std::max(p.state.mean(3), kMinSize));
  return p;
}

KalmanState kf_update(const KalmanState& s, const BBox& z, const MotionConfig& cfg) {
  if (z.empty) throw DomainError("cannot update the Kalman filter with an empty box");
  if (!std::isfinite(z.cx) || !std::isfinite(z.cy) || !std::isfinite(z.w) ||
      !std::isfinite(z.h)) {
    throw DomainError("non-finite Kalman measurement");
  }

  // H selects the first four state components.
  const double r_std = cfg.measure_noise * z.h;
  MeasVector measured;
  measured << z.cx, z.cy, z.w, z.h;
  const MeasVector innovation = measured - s.mean.head<4>();
  MeasMatrix S = s.cov.topLeftCorner<4, 4>();
  S.diagonal().array() += r_std * r_std;
  const Eigen::Matrix<double, 8, 4> PHt = s.cov.leftCols<4>();
  const GainMatrix K = S.llt().solve(PHt.transpose()).transpose();

  KalmanState out = s;
  out.mean = s.mean + K * innovation;
  // Joseph form: (I - KH) P (I - KH)^T + K R K^T.
  StateMatrix IKH = StateMatrix::Identity();
  IKH.leftCols<4>() -= K;
  out.cov = IKH * s.cov * IKH.transpose() + (r_std * r_std) * (K * K.transpose());
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  out.mean(2) = std::max(out.mean(2), kMinSize);
  out.mean(3) = std::max(out.mean(3), kMinSize);
  out.consecutive_updates = s.consecutive_updates + 1;
  return out;
}

KalmanState kf_mark_missed(const KalmanState& s) {
  KalmanState out = s;
  out.consecutive_updates = 0;
  return out;
}

bool motion_active(const KalmanState& s, const MotionConfig& cfg) {
  return s.consecutive_updates >= cfg.tau_stab;
}

}  // namespace kftrack
