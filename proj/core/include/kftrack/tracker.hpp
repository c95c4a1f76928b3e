#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kftrack/error.hpp"
#include "kftrack/memory.hpp"
#include "kftrack/motion.hpp"
#include "kftrack/simworld.hpp"

namespace kftrack {

enum class MemoryMode { kFifo, kMotionAware };

const char* to_string(MemoryMode mode);
MemoryMode memory_mode_from_string(const std::string& s);

struct TrackerConfig {
  /// Use the hybrid motion/affinity score for mask selection.
  bool motion_enabled = true;
  MemoryMode memory_mode = MemoryMode::kMotionAware;
  MotionConfig motion;
  MemoryGate gate;

  void validate() const;

  /// Affinity-only selection with a FIFO bank.
  static TrackerConfig baseline();
  /// Hybrid selection with the gated bank.
  static TrackerConfig full();
  static TrackerConfig cell(bool motion, bool motion_aware_memory);
};

/// Supplies candidate masks frame by frame. The bank is passed so that
/// memory-conditioned proposers can react to it; others may ignore it.
class ProposalSource {
 public:
  virtual ~ProposalSource() = default;
  virtual std::size_t num_frames() const = 0;
  virtual FrameProposals propose(int frame, const MemoryBank& bank) = 0;
  /// Appearance latent of the prompt region; empty when the source has none.
  virtual std::vector<double> encode_prompt(const BBox&) { return {}; }
};

/// Thrown by a ProposalSource that has no data for the requested frame.
class SourceExhausted : public Error {
 public:
  using Error::Error;
};

/// Adapter exposing a SimProposer as a ProposalSource.
class SimProposalSource final : public ProposalSource {
 public:
  SimProposalSource(const Scenario& scenario, const Sequence& sequence)
      : proposer_(scenario, sequence) {}
  std::size_t num_frames() const override { return proposer_.num_frames(); }
  FrameProposals propose(int frame, const MemoryBank& bank) override {
    return proposer_.propose(frame, bank);
  }
  std::vector<double> encode_prompt(const BBox& box) override {
    return proposer_.encode_prompt(box);
  }

 private:
  SimProposer proposer_;
};

struct FrameRecord {
  int frame = 0;
  BBox chosen_box;
  bool target_absent = false;
  double s_mask = 0.0;
  double s_obj = 0.0;
  double s_kf = 0.0;
  double hybrid_score = 0.0;
  std::vector<int> bank_frames;
};

struct TrackResult {
  std::string sequence_id;
  std::string cell;
  std::uint64_t seed = 0;
  TrackerConfig config;
  std::vector<FrameRecord> frames;
  /// Wall time spent per frame in nanoseconds; excluded from serialized results.
  std::vector<std::int64_t> wall_ns;
};

/// Raised when the proposal source runs dry before the expected frame count.
class TruncatedError : public Error {
 public:
  TruncatedError(const std::string& what, TrackResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const TrackResult& partial() const { return partial_; }

 private:
  TrackResult partial_;
};

/// Runs one pass over the sequence. Frame 0 is the prompt: its record is
/// the given box with perfect scores and it seeds both the filter and the
/// memory. Every later frame predicts, builds the bank, asks the source for
/// candidates, selects, then updates the filter and memory.
TrackResult track(ProposalSource& source, const BBox& first_frame_box, const TrackerConfig& cfg);

}  // namespace kftrack
