#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "braid/core.hpp"

namespace braid {

enum class ExtremeMode { Max, Min };

// Exact tracker of the top-k streams by Max or Min item value. Holds at most
// k entries in a binary heap keyed by the weakest retained stream, plus an
// id -> slot index so repeat arrivals update in place. An evicted stream can
// re-enter later: the competing item carries its own value, and best-so-far
// is only maintained for retained entries.
class ExtremeTracker {
 public:
  ExtremeTracker(std::size_t k, ExtremeMode mode) : k_(k), mode_(mode) {
    if (k < 1) throw DomainError("tracker requires k >= 1");
  }

  void ingest(const BraidItem& item) { ingest(item.stream_id, static_cast<double>(item.value)); }

  void ingest(StreamId id, double value) {
    auto it = pos_.find(id);
    if (it != pos_.end()) {
      Entry& e = heap_[it->second];
      bool improves = mode_ == ExtremeMode::Max ? value > e.value : value < e.value;
      ++comparisons_;
      if (improves) {
        e.value = value;
        sift_down(it->second);
      }
      return;
    }
    if (heap_.size() < k_) {
      heap_.push_back({value, id});
      pos_[id] = heap_.size() - 1;
      sift_up(heap_.size() - 1);
      return;
    }
    if (stronger(Entry{value, id}, heap_[0])) {
      pos_.erase(heap_[0].id);
      heap_[0] = {value, id};
      pos_[id] = 0;
      sift_down(0);
    }
  }

  // Retained entries, strongest first (value desc for Max, asc for Min),
  // ties by smaller id.
  std::vector<TopkEntry> topk() const {
    std::vector<Entry> entries = heap_;
    std::sort(entries.begin(), entries.end(),
              [this](const Entry& a, const Entry& b) { return stronger_const(a, b); });
    std::vector<TopkEntry> out;
    out.reserve(entries.size());
    for (const Entry& e : entries) out.push_back({e.id, e.value});
    return out;
  }

  std::size_t size() const { return heap_.size(); }
  std::size_t capacity() const { return k_; }
  ExtremeMode mode() const { return mode_; }
  std::uint64_t comparison_count() const { return comparisons_; }

 private:
  struct Entry {
    double value;
    StreamId id;
  };

  bool stronger_const(const Entry& a, const Entry& b) const {
    if (a.value != b.value) {
      return mode_ == ExtremeMode::Max ? a.value > b.value : a.value < b.value;
    }
    return a.id < b.id;
  }

  bool stronger(const Entry& a, const Entry& b) {
    ++comparisons_;
    return stronger_const(a, b);
  }

  void swap_slots(std::size_t i, std::size_t j) {
    std::swap(heap_[i], heap_[j]);
    pos_[heap_[i].id] = i;
    pos_[heap_[j].id] = j;
  }

  // heap_[0] is the weakest retained entry; parents are weaker than children.
  void sift_up(std::size_t i) {
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (stronger(heap_[parent], heap_[i])) {
        swap_slots(i, parent);
        i = parent;
      } else {
        break;
      }
    }
  }

  void sift_down(std::size_t i) {
    for (;;) {
      std::size_t weakest = i;
      std::size_t l = 2 * i + 1, r = 2 * i + 2;
      if (l < heap_.size() && stronger(heap_[weakest], heap_[l])) weakest = l;
      if (r < heap_.size() && stronger(heap_[weakest], heap_[r])) weakest = r;
      if (weakest == i) break;
      swap_slots(i, weakest);
      i = weakest;
    }
  }

  std::size_t k_;
  ExtremeMode mode_;
  std::vector<Entry> heap_;
  std::unordered_map<StreamId, std::size_t> pos_;
  std::uint64_t comparisons_ = 0;
};

}  // namespace braid
