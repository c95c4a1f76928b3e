#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kftrack/selection.hpp"

namespace kftrack {

/// Per-frame appearance record with the scores observed when it was made.
struct MemoryEntry {
  int frame_index = 0;
  std::vector<double> appearance;
  double s_mask = 0.0;
  double s_obj = 0.0;
  double s_kf = 0.0;
  bool is_prompt_frame = false;
};

/// Admission thresholds and capacity of the motion-aware memory bank.
struct MemoryGate {
  double tau_mask = 0.6;
  double tau_obj = 0.0;
  double tau_kf_mem = 0.3;
  int n_mem = 7;
  /// Number of most recent recorded entries examined when building the bank.
  int n_max = 64;

  void validate() const;
};

/// Entries conditioning the next frame, oldest first. Pointers refer into the
/// owning MemoryHistory and are invalidated by the next record().
using MemoryBank = std::vector<const MemoryEntry*>;

/// Append-only, frame-ordered record of past outputs.
class MemoryHistory {
 public:
  /// Appends an entry for `frame`. Frame 0 is the prompt frame. Absent
  /// outcomes are stored with zero mask and motion scores so they never pass
  /// a gate. Throws ValidationError when frame does not exceed the last one.
  const MemoryEntry& record(int frame, const SelectionOutcome& outcome,
                            std::vector<double> appearance);

  /// Appends a prepared entry under the same ordering rule.
  const MemoryEntry& append(MemoryEntry entry);

  const std::vector<MemoryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<MemoryEntry> entries_;
};

/// True iff every score meets its threshold; the prompt frame always passes.
bool gate(const MemoryEntry& entry, const MemoryGate& g);

/// The n_mem most recent non-prompt entries plus the prompt frame.
MemoryBank build_bank_fifo(const std::vector<MemoryEntry>& history, int n_mem);

/// Scans backward over at most n_max recent entries collecting up to n_mem
/// that pass the gate. The prompt is always kept. When nothing qualifies the
/// most recent entry is kept regardless of its scores.
MemoryBank build_bank_motion_aware(const std::vector<MemoryEntry>& history, const MemoryGate& g);

}  // namespace kftrack
