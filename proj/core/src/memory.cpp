#include "kftrack/memory.hpp"

#include <algorithm>
#include <string>

#include "kftrack/error.hpp"

namespace kftrack {

void MemoryGate::validate() const {
  std::vector<std::string> v;
  if (n_mem < 1) v.emplace_back("n_mem must be >= 1");
  if (n_max < n_mem) v.emplace_back("n_max must be >= n_mem");
  if (!(tau_mask <= 1.0)) v.emplace_back("tau_mask must be <= 1");
  if (!(tau_kf_mem <= 1.0)) v.emplace_back("tau_kf_mem must be <= 1");
  if (!v.empty()) throw ValidationError(std::move(v));
}

const MemoryEntry& MemoryHistory::append(MemoryEntry entry) {
  if (!entries_.empty() && entry.frame_index <= entries_.back().frame_index) {
    throw ValidationError({"memory entry for frame " + std::to_string(entry.frame_index) +
                           " is not after frame " +
                           std::to_string(entries_.back().frame_index)});
  }
  if (entry.frame_index < 0) throw ValidationError({"negative frame index"});
  entry.is_prompt_frame = entry.frame_index == 0;
  entries_.push_back(std::move(entry));
  return entries_.back();
}

const MemoryEntry& MemoryHistory::record(int frame, const SelectionOutcome& outcome,
                                         std::vector<double> appearance) {
  MemoryEntry e;
  e.frame_index = frame;
  e.appearance = std::move(appearance);
  e.s_obj = outcome.s_obj;
  if (!outcome.target_absent) {
    e.s_mask = outcome.s_mask;
    e.s_kf = outcome.s_kf;
  }
  return append(std::move(e));
}

bool gate(const MemoryEntry& entry, const MemoryGate& g) {
  if (entry.is_prompt_frame) return true;
  return entry.s_mask >= g.tau_mask && entry.s_obj >= g.tau_obj && entry.s_kf >= g.tau_kf_mem;
}

namespace {

const MemoryEntry* prompt_of(const std::vector<MemoryEntry>& history) {
  if (!history.empty() && history.front().is_prompt_frame) return &history.front();
  return nullptr;
}

}  // namespace

MemoryBank build_bank_fifo(const std::vector<MemoryEntry>& history, int n_mem) {
  MemoryBank bank;
  const MemoryEntry* prompt = prompt_of(history);
  const std::size_t first_recent = prompt ? 1 : 0;
  const std::size_t available = history.size() - first_recent;
  const std::size_t take = std::min<std::size_t>(available, static_cast<std::size_t>(std::max(n_mem, 0)));
  bank.reserve(take + 1);
  if (prompt) bank.push_back(prompt);
  for (std::size_t i = history.size() - take; i < history.size(); ++i) bank.push_back(&history[i]);
  return bank;
}

MemoryBank build_bank_motion_aware(const std::vector<MemoryEntry>& history, const MemoryGate& g) {
  MemoryBank bank;
  const MemoryEntry* prompt = prompt_of(history);
  const std::size_t first_recent = prompt ? 1 : 0;
  if (prompt) bank.push_back(prompt);
  if (history.size() <= first_recent) return bank;

  const std::size_t want = static_cast<std::size_t>(std::max(g.n_mem, 0));
  std::size_t scanned = 0;
  std::vector<const MemoryEntry*> picked;
  picked.reserve(want);
  for (std::size_t i = history.size(); i-- > first_recent;) {
    if (picked.size() >= want || scanned >= static_cast<std::size_t>(std::max(g.n_max, 0))) break;
    ++scanned;
    if (gate(history[i], g)) picked.push_back(&history[i]);
  }
  if (picked.empty()) picked.push_back(&history.back());
  bank.insert(bank.end(), picked.rbegin(), picked.rend());
  return bank;
}

}  // namespace kftrack
