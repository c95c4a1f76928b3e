#include "kftrack/suites.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace kftrack::suites {

namespace {

constexpr int kGrid = 256;
constexpr int kDim = 8;

std::vector<double> basis(int d, int axis) {
  std::vector<double> v(static_cast<std::size_t>(d), 0.0);
  v[static_cast<std::size_t>(axis)] = 1.0;
  return v;
}

ObjectSpec make_object(double x, double y, double size, std::vector<double> appearance) {
  ObjectSpec o;
  o.box = BBox::from_top_left(std::round(x), std::round(y), size, size);
  o.appearance = std::move(appearance);
  return o;
}

double clamp_pos(double v, double size) { return std::clamp(v, 0.0, kGrid - size); }

// Random walk of constant-velocity segments with the given speed range.
std::vector<MotionSegment> wander(Rng& rng, int frames, double speed_lo, double speed_hi,
                                  int seg_lo, int seg_hi) {
  std::vector<MotionSegment> segs;
  int used = 0;
  while (used < frames) {
    const double speed = rng.uniform(speed_lo, speed_hi);
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const int len = seg_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(seg_hi - seg_lo + 1)));
    segs.push_back({speed * std::cos(angle), speed * std::sin(angle), len});
    used += len;
  }
  return segs;
}

Scenario base_scenario(std::string name, int frames, std::uint64_t seed) {
  Scenario sc;
  sc.name = std::move(name);
  sc.grid_w = kGrid;
  sc.grid_h = kGrid;
  sc.num_frames = frames;
  sc.seed = seed;
  sc.d_app = kDim;
  return sc;
}

// Target and distractor meet at `meet` (centre point) at frame t_meet; the
// distractor passes in front of the target.
Scenario crossing_case(Rng& rng, std::size_t index, std::uint64_t seed) {
  Scenario sc = base_scenario("crossing_" + std::to_string(index), 110, seed);
  const double size = std::round(rng.uniform(18.0, 30.0));
  const int t_meet = 30 + static_cast<int>(rng.below(16));
  const double speed_t = rng.uniform(1.2, 2.2);
  const double speed_d = rng.uniform(1.2, 2.2);
  const double angle_t = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double angle_d = angle_t + std::numbers::pi + rng.uniform(-0.9, 0.9);
  const double mx = rng.uniform(110.0, 146.0), my = rng.uniform(110.0, 146.0);

  const double vtx = speed_t * std::cos(angle_t), vty = speed_t * std::sin(angle_t);
  const double vdx = speed_d * std::cos(angle_d), vdy = speed_d * std::sin(angle_d);
  const auto tgt = basis(kDim, 0);
  sc.target = make_object(clamp_pos(mx - vtx * t_meet - (size - 1) / 2, size),
                          clamp_pos(my - vty * t_meet - (size - 1) / 2, size), size, tgt);
  sc.target.motion = {{vtx, vty, sc.num_frames}};
  sc.target.occlusions = {{t_meet - 2, t_meet + 3}};

  ObjectSpec d = make_object(clamp_pos(mx - vdx * t_meet - (size - 1) / 2, size),
                             clamp_pos(my - vdy * t_meet - (size - 1) / 2, size), size,
                             appearance_like(tgt, rng.uniform(0.2, 0.5), rng));
  d.motion = {{vdx, vdy, sc.num_frames}};
  sc.distractors.push_back(std::move(d));
  sc.noise = {rng.uniform(0.03, 0.08), rng.uniform(0.3, 0.8)};
  return sc;
}

// A look-alike distractor roams the scene; no occlusion.
Scenario lookalike_case(Rng& rng, std::size_t index, std::uint64_t seed) {
  Scenario sc = base_scenario("lookalike_" + std::to_string(index), 110, seed);
  const double size = std::round(rng.uniform(18.0, 30.0));
  const auto tgt = basis(kDim, 0);
  sc.target = make_object(rng.uniform(40.0, 190.0), rng.uniform(40.0, 190.0), size, tgt);
  sc.target.motion = wander(rng, sc.num_frames, 0.8, 2.2, 20, 50);
  ObjectSpec d = make_object(rng.uniform(40.0, 190.0), rng.uniform(40.0, 190.0), size,
                             appearance_like(tgt, rng.uniform(0.82, 0.92), rng));
  d.motion = wander(rng, sc.num_frames, 0.8, 2.2, 20, 50);
  sc.distractors.push_back(std::move(d));
  sc.noise = {rng.uniform(0.08, 0.14), rng.uniform(0.3, 0.8)};
  return sc;
}

Scenario fast_case(Rng& rng, std::size_t index, std::uint64_t seed) {
  Scenario sc = base_scenario("fast_" + std::to_string(index), 150, seed);
  const double size = std::round(rng.uniform(20.0, 32.0));
  const auto tgt = basis(kDim, 0);
  sc.target = make_object(rng.uniform(40.0, 190.0), rng.uniform(40.0, 190.0), size, tgt);
  sc.target.motion = wander(rng, sc.num_frames, 4.0, 7.0, 8, 20);
  const std::size_t n_look = 1 + rng.below(2);
  for (std::size_t k = 0; k < n_look; ++k) {
    ObjectSpec d = make_object(rng.uniform(40.0, 190.0), rng.uniform(40.0, 190.0), size,
                               appearance_like(tgt, rng.uniform(0.8, 0.92), rng));
    d.motion = wander(rng, sc.num_frames, 4.0, 7.0, 8, 20);
    sc.distractors.push_back(std::move(d));
  }
  sc.noise = {rng.uniform(0.08, 0.12), rng.uniform(0.3, 0.8)};
  sc.hallucination_rate = 0.1;
  return sc;
}

}  // namespace

std::vector<double> random_appearance(int d, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(d));
  double n2 = 0.0;
  for (auto& x : v) {
    x = rng.normal();
    n2 += x * x;
  }
  const double n = std::sqrt(n2);
  for (auto& x : v) x /= n;
  return v;
}

std::vector<double> appearance_like(const std::vector<double>& anchor, double similarity, Rng& rng) {
  // Gram-Schmidt a random direction against the anchor, then blend.
  std::vector<double> u = random_appearance(static_cast<int>(anchor.size()), rng);
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * anchor[i];
  double n2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] -= dot * anchor[i];
    n2 += u[i] * u[i];
  }
  const double n = std::sqrt(n2);
  const double ortho = std::sqrt(std::max(0.0, 1.0 - similarity * similarity));
  std::vector<double> out(anchor.size());
  double m2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = similarity * anchor[i] + ortho * (n > 0.0 ? u[i] / n : 0.0);
    m2 += out[i] * out[i];
  }
  const double m = std::sqrt(m2);
  for (auto& x : out) x /= m;
  return out;
}

Scenario poisoning_scenario() {
  Scenario sc = base_scenario("poisoning", 120, 7);
  sc.target = make_object(40.0, 60.0, 24.0, basis(kDim, 0));
  sc.target.motion = {{1.0, 0.5, sc.num_frames}};
  sc.target.occlusions = {{40, 56}};
  ObjectSpec d = make_object(170.0, 190.0, 24.0, basis(kDim, 1));
  d.motion = {{-0.5, 0.0, sc.num_frames}};
  sc.distractors.push_back(std::move(d));
  sc.noise = {0.02, 0.5};
  return sc;
}

Scenario crossing_scenario() {
  Scenario sc = base_scenario("crossing", 100, 11);
  const auto tgt = basis(kDim, 0);
  Rng rng = Rng::stream(11, {0});
  sc.target = make_object(40.0, 116.0, 24.0, tgt);
  sc.target.motion = {{2.0, 0.0, sc.num_frames}};
  sc.target.occlusions = {{38, 43}};
  ObjectSpec d = make_object(200.0, 120.0, 24.0, appearance_like(tgt, 0.4, rng));
  d.motion = {{-2.0, 0.0, sc.num_frames}};
  sc.distractors.push_back(std::move(d));
  sc.noise = {0.03, 0.5};
  return sc;
}

std::vector<Scenario> crossing_suite(std::size_t count, std::uint64_t seed) {
  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = Rng::stream(seed, {0xC055, i});
    const std::uint64_t run_seed = mix64(seed ^ (0x1000 + i));
    out.push_back(i % 2 == 0 ? crossing_case(rng, i, run_seed) : lookalike_case(rng, i, run_seed));
  }
  return out;
}

std::vector<Scenario> fast_motion_suite(std::size_t count, std::uint64_t seed) {
  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = Rng::stream(seed, {0xFA57, i});
    out.push_back(fast_case(rng, i, mix64(seed ^ (0x2000 + i))));
  }
  return out;
}

}  // namespace kftrack::suites
