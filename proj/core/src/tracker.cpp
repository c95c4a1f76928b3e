#include "kftrack/tracker.hpp"

#include <chrono>

namespace kftrack {

const char* to_string(MemoryMode mode) {
  return mode == MemoryMode::kFifo ? "fifo" : "motion_aware";
}

MemoryMode memory_mode_from_string(const std::string& s) {
  if (s == "fifo") return MemoryMode::kFifo;
  if (s == "motion_aware") return MemoryMode::kMotionAware;
  throw ValidationError({"unknown memory_mode '" + s + "' (expected fifo or motion_aware)"});
}

void TrackerConfig::validate() const {
  std::vector<std::string> v;
  try {
    motion.validate();
  } catch (const ValidationError& e) {
    v.insert(v.end(), e.violations().begin(), e.violations().end());
  }
  try {
    gate.validate();
  } catch (const ValidationError& e) {
    v.insert(v.end(), e.violations().begin(), e.violations().end());
  }
  if (!v.empty()) throw ValidationError(std::move(v));
}

TrackerConfig TrackerConfig::baseline() { return cell(false, false); }
TrackerConfig TrackerConfig::full() { return cell(true, true); }

TrackerConfig TrackerConfig::cell(bool motion, bool motion_aware_memory) {
  TrackerConfig cfg;
  cfg.motion_enabled = motion;
  cfg.memory_mode = motion_aware_memory ? MemoryMode::kMotionAware : MemoryMode::kFifo;
  return cfg;
}

TrackResult track(ProposalSource& source, const BBox& first_frame_box, const TrackerConfig& cfg) {
  cfg.validate();
  if (first_frame_box.empty) throw DomainError("tracker needs a non-empty first-frame box");

  using Clock = std::chrono::steady_clock;
  const std::size_t n = source.num_frames();
  if (n == 0) throw DomainError("proposal source has no frames");
  TrackResult result;
  result.config = cfg;
  result.frames.reserve(n);
  result.wall_ns.reserve(n);

  auto t0 = Clock::now();
  KalmanState state = kf_init(first_frame_box, cfg.motion);
  MemoryHistory history;
  {
    // The prompt is trusted by definition and always passes the gate.
    MemoryEntry prompt;
    prompt.frame_index = 0;
    prompt.appearance = source.encode_prompt(first_frame_box);
    prompt.s_mask = 1.0;
    prompt.s_obj = 4.0;
    prompt.s_kf = 1.0;
    history.append(std::move(prompt));
  }
  FrameRecord first;
  first.frame = 0;
  first.chosen_box = first_frame_box;
  first.s_mask = 1.0;
  first.s_obj = 4.0;
  first.s_kf = 1.0;
  first.hybrid_score = 1.0;
  result.frames.push_back(std::move(first));
  result.wall_ns.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());

  std::vector<BBox> boxes;
  for (std::size_t t = 1; t < n; ++t) {
    const auto start = Clock::now();
    const int frame = static_cast<int>(t);
    Prediction pred = kf_predict(state, cfg.motion);

    const MemoryBank bank = cfg.memory_mode == MemoryMode::kFifo
                                ? build_bank_fifo(history.entries(), cfg.gate.n_mem)
                                : build_bank_motion_aware(history.entries(), cfg.gate);

    FrameProposals proposals;
    try {
      proposals = source.propose(frame, bank);
    } catch (const SourceExhausted& e) {
      throw TruncatedError("proposal source exhausted at frame " + std::to_string(frame) + ": " +
                               e.what(),
                           std::move(result));
    }
    const auto& cands = proposals.candidates;

    boxes.clear();
    for (const auto& c : cands) boxes.push_back(mask_to_bbox(c.mask));
    const std::vector<double> kf_scores = kf_iou_score(pred.box, boxes);

    SelectionOutcome outcome =
        cfg.motion_enabled
            ? select_hybrid(cands, kf_scores, cfg.motion.alpha_kf, motion_active(pred.state, cfg.motion))
            : select_baseline(cands);
    if (outcome.chosen_index) outcome.s_kf = kf_scores[*outcome.chosen_index];

    FrameRecord rec;
    rec.frame = frame;
    rec.chosen_box = outcome.chosen_box;
    rec.target_absent = outcome.target_absent;
    rec.s_mask = outcome.s_mask;
    rec.s_obj = outcome.s_obj;
    rec.s_kf = outcome.s_kf;
    rec.hybrid_score = outcome.hybrid_score;
    rec.bank_frames.reserve(bank.size());
    for (const MemoryEntry* e : bank) rec.bank_frames.push_back(e->frame_index);

    if (outcome.target_absent) {
      state = kf_mark_missed(pred.state);
    } else {
      state = kf_update(pred.state, outcome.chosen_box, cfg.motion);
      history.record(frame, outcome, cands[*outcome.chosen_index].appearance);
    }
    result.frames.push_back(std::move(rec));
    result.wall_ns.push_back(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
  }
  return result;
}

}  // namespace kftrack
