#include "kftrack/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kftrack/error.hpp"
#include "kftrack/rng.hpp"

namespace kftrack {

namespace {

constexpr std::uint64_t kHallucinationKey = 0xA11CE;
constexpr std::uint64_t kShuffleKey = 0x5EED;
constexpr int kRampFrames = 3;

void validate_object(const Scenario& sc, const ObjectSpec& o, const std::string& label,
                     std::vector<std::string>& v) {
  if (o.box.empty) {
    v.push_back(label + ": box must have positive width and height");
  } else {
    if (o.box.x() < 0.0 || o.box.y() < 0.0 || o.box.x() + o.box.w > sc.grid_w ||
        o.box.y() + o.box.h > sc.grid_h) {
      v.push_back(label + ": box lies outside the grid at frame 0");
    }
  }
  if (static_cast<int>(o.appearance.size()) != sc.d_app) {
    v.push_back(label + ": appearance has " + std::to_string(o.appearance.size()) +
                " components, expected d_app = " + std::to_string(sc.d_app));
  } else {
    double norm2 = 0.0;
    for (double a : o.appearance) norm2 += a * a;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6) v.push_back(label + ": appearance must be unit-norm");
  }
  for (std::size_t i = 0; i < o.motion.size(); ++i) {
    const auto& seg = o.motion[i];
    if (seg.frames < 0) v.push_back(label + ": motion[" + std::to_string(i) + "] has negative frames");
    if (!std::isfinite(seg.vx) || !std::isfinite(seg.vy))
      v.push_back(label + ": motion[" + std::to_string(i) + "] velocity must be finite");
  }
  for (std::size_t i = 0; i < o.occlusions.size(); ++i) {
    const auto& r = o.occlusions[i];
    if (r.begin < 0 || r.end > sc.num_frames || r.begin >= r.end)
      v.push_back(label + ": occlusions[" + std::to_string(i) + "] must satisfy 0 <= begin < end <= num_frames");
  }
}

void advance(double& pos, double& sign, double velocity, double limit) {
  pos += sign * velocity;
  // Reflect until inside; handles velocities larger than the free range.
  for (int guard = 0; guard < 8 && (pos < 0.0 || pos > limit); ++guard) {
    if (pos < 0.0) {
      pos = -pos;
      sign = -sign;
    } else if (pos > limit) {
      pos = 2.0 * limit - pos;
      sign = -sign;
    }
  }
  pos = std::clamp(pos, 0.0, std::max(limit, 0.0));
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void Scenario::validate() const {
  std::vector<std::string> v;
  if (grid_w <= 0 || grid_h <= 0) v.emplace_back("grid dimensions must be positive");
  if (num_frames < 1) v.emplace_back("num_frames must be >= 1");
  if (d_app < 1) v.emplace_back("d_app must be >= 1");
  if (!(noise.affinity_sigma >= 0.0)) v.emplace_back("noise.affinity_sigma must be >= 0");
  if (!(noise.jitter_sigma >= 0.0)) v.emplace_back("noise.jitter_sigma must be >= 0");
  if (!(hallucination_rate >= 0.0 && hallucination_rate <= 1.0))
    v.emplace_back("hallucination_rate must lie in [0, 1]");
  if (v.empty()) {
    validate_object(*this, target, "target", v);
    for (std::size_t i = 0; i < distractors.size(); ++i)
      validate_object(*this, distractors[i], "distractors[" + std::to_string(i) + "]", v);
  }
  if (!v.empty()) throw ValidationError(std::move(v));
}

double visibility_at(const std::vector<FrameRange>& occlusions, int t) {
  double vis = 1.0;
  for (const auto& r : occlusions) {
    double here = 1.0;
    if (t >= r.begin && t < r.end) {
      here = 0.0;
    } else if (t < r.begin && r.begin - t <= kRampFrames) {
      here = static_cast<double>(r.begin - t) / (kRampFrames + 1);
    } else if (t >= r.end && t - r.end + 1 <= kRampFrames) {
      here = static_cast<double>(t - r.end + 1) / (kRampFrames + 1);
    }
    vis = std::min(vis, here);
  }
  return vis;
}

Sequence generate_sequence(const Scenario& sc) {
  sc.validate();
  Sequence seq;
  seq.name = sc.name;
  seq.grid_w = sc.grid_w;
  seq.grid_h = sc.grid_h;
  seq.frames.resize(static_cast<std::size_t>(sc.num_frames));

  for (std::size_t k = 0; k < sc.num_objects(); ++k) {
    const ObjectSpec& o = sc.object(k);
    double x = o.box.x(), y = o.box.y();
    double sx = 1.0, sy = 1.0;
    const double xlim = sc.grid_w - o.box.w, ylim = sc.grid_h - o.box.h;
    std::size_t seg = 0;
    int seg_used = 0;
    for (int t = 0; t < sc.num_frames; ++t) {
      if (t > 0) {
        while (seg < o.motion.size() && seg_used >= o.motion[seg].frames) {
          ++seg;
          seg_used = 0;
        }
        if (seg < o.motion.size()) {
          advance(x, sx, o.motion[seg].vx, xlim);
          advance(y, sy, o.motion[seg].vy, ylim);
          ++seg_used;
        }
      }
      auto& f = seq.frames[static_cast<std::size_t>(t)];
      f.boxes.push_back(BBox::from_top_left(x, y, o.box.w, o.box.h));
      f.visibility.push_back(visibility_at(o.occlusions, t));
    }
  }
  return seq;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

SimProposer::SimProposer(const Scenario& scenario, const Sequence& sequence)
    : scenario_(&scenario), sequence_(&sequence) {}

std::vector<double> SimProposer::encode_prompt(const BBox& box) const {
  const auto& first = sequence_->frames.front();
  std::size_t best = 0;
  double best_iou = -1.0;
  for (std::size_t k = 0; k < first.boxes.size(); ++k) {
    const double o = iou(box, first.boxes[k]);
    if (o > best_iou) {
      best_iou = o;
      best = k;
    }
  }
  return scenario_->object(best).appearance;
}

FrameProposals SimProposer::propose(int t, const MemoryBank& bank) const {
  const Scenario& sc = *scenario_;
  if (t < 0 || static_cast<std::size_t>(t) >= sequence_->num_frames())
    throw DomainError("frame " + std::to_string(t) + " outside the sequence");
  if (bank.empty()) throw DomainError("proposer needs a non-empty memory bank");

  std::vector<double> context(static_cast<std::size_t>(sc.d_app), 0.0);
  for (const MemoryEntry* e : bank) {
    if (e->appearance.size() != context.size()) continue;
    for (std::size_t i = 0; i < context.size(); ++i) context[i] += e->appearance[i];
  }

  const auto& truth = sequence_->frames[static_cast<std::size_t>(t)];
  const auto W = static_cast<std::uint32_t>(sc.grid_w);
  const auto H = static_cast<std::uint32_t>(sc.grid_h);
  const auto frame_key = static_cast<std::uint64_t>(t);

  auto make_mask = [&](const BBox& b, Rng& rng) {
    const double j = sc.noise.jitter_sigma;
    double x0 = b.x(), y0 = b.y(), x1 = b.x() + b.w - 1.0, y1 = b.y() + b.h - 1.0;
    if (j > 0.0) {
      x0 += rng.normal(0.0, j);
      y0 += rng.normal(0.0, j);
      x1 += rng.normal(0.0, j);
      y1 += rng.normal(0.0, j);
    }
    auto ix0 = static_cast<std::int64_t>(std::lround(x0));
    auto iy0 = static_cast<std::int64_t>(std::lround(y0));
    auto ix1 = std::max(ix0, static_cast<std::int64_t>(std::lround(x1)));
    auto iy1 = std::max(iy0, static_cast<std::int64_t>(std::lround(y1)));
    return RleMask::rectangle(W, H, ix0, iy0, ix1, iy1);
  };

  FrameProposals out;
  out.candidates.reserve(sc.num_objects() + 1);
  for (std::size_t k = 0; k < sc.num_objects(); ++k) {
    Rng rng = Rng::stream(sc.seed, {frame_key, static_cast<std::uint64_t>(k)});
    const ObjectSpec& o = sc.object(k);
    const double vis = truth.visibility[k];
    CandidateMask c;
    c.mask = make_mask(truth.boxes[k], rng);
    const double affinity_noise = sc.noise.affinity_sigma > 0.0 ? rng.normal(0.0, sc.noise.affinity_sigma) : 0.0;
    c.s_mask = clamp01(cosine_similarity(o.appearance, context) * vis + affinity_noise);
    c.s_obj = 4.0 * (vis - 0.5);
    c.appearance = o.appearance;
    out.candidates.push_back(std::move(c));
  }

  Rng hrng = Rng::stream(sc.seed, {frame_key, kHallucinationKey});
  if (sc.hallucination_rate > 0.0 && hrng.bernoulli(sc.hallucination_rate)) {
    const BBox& ref = sc.target.box;
    const double w = std::clamp(std::round(ref.w * hrng.uniform(0.6, 1.4)), 1.0, double(W));
    const double h = std::clamp(std::round(ref.h * hrng.uniform(0.6, 1.4)), 1.0, double(H));
    const double x = std::floor(hrng.uniform(0.0, W - w + 1.0));
    const double y = std::floor(hrng.uniform(0.0, H - h + 1.0));
    std::vector<double> app(static_cast<std::size_t>(sc.d_app));
    double n2 = 0.0;
    for (auto& a : app) {
      a = hrng.normal();
      n2 += a * a;
    }
    const double n = std::sqrt(n2);
    for (auto& a : app) a = n > 0.0 ? a / n : 0.0;
    CandidateMask c;
    c.mask = make_mask(BBox::from_top_left(x, y, w, h), hrng);
    const double affinity_noise = sc.noise.affinity_sigma > 0.0 ? hrng.normal(0.0, sc.noise.affinity_sigma) : 0.0;
    c.s_mask = clamp01(cosine_similarity(app, context) + affinity_noise);
    c.s_obj = 2.0;
    c.appearance = std::move(app);
    out.candidates.push_back(std::move(c));
  }

  Rng srng = Rng::stream(sc.seed, {frame_key, kShuffleKey});
  for (std::size_t i = out.candidates.size(); i > 1; --i) {
    const std::size_t j = srng.below(i);
    std::swap(out.candidates[i - 1], out.candidates[j]);
  }
  return out;
}

}  // namespace kftrack
