#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "braid/core.hpp"

namespace braid {

// Deterministic quantile summary over [1, U] (U a power of two). Buckets are
// nodes of the complete binary tree over the value range: level 0 holds the
// singletons [v, v], level l holds [(i-1)*2^l + 1, i*2^l] for i = 1..U/2^l,
// and the root spans [1, U]. A bucket set with total count n maintains, with
// threshold t = floor(n*rho/log2(U)):
//
//   (1) count(b) <= t for every non-leaf bucket, and
//   (2) count(b) + count(parent) + count(sibling) >= t for every non-root
//       bucket (absent relatives count 0).
//
// Compression merges a sibling pair into its parent whenever the triple sum
// is strictly below t, so triples equal to t survive; (2) is therefore the
// non-strict form. While t is 0 nothing merges and all leaves are retained.
//
// An explicit compress() sweeps bottom-up until no pair merges, after which
// both properties hold everywhere. The automatic compression that runs
// during inserts takes a cheaper single pass (only the dirty leaves' chains
// when the threshold has not moved); it never violates (1), which is the
// property the quantile error bound rests on, but (2) may lag until the next
// explicit compress or threshold change.
class QDigest {
 public:
  enum class Cadence {
    PerInsert,  // compress whenever the inserted leaf's triple violates (2)
    Batched,    // compress every ceil(1/(2*rho)) inserts
  };

  QDigest(double rho, std::uint64_t u, Cadence cadence = Cadence::PerInsert);

  void insert(std::uint64_t value) {
    insert_with(value, [](std::uint64_t, std::uint64_t) {});
  }

  // Same as insert(); on_merge(from_key, to_key) fires once per child bucket
  // folded into its parent, in the order merges happen.
  template <class OnMerge>
  void insert_with(std::uint64_t value, OnMerge&& on_merge);

  void compress() {
    compress_with([](std::uint64_t, std::uint64_t) {});
  }

  template <class OnMerge>
  void compress_with(OnMerge&& on_merge);

  // phi-quantile by post-order traversal: returns the hi edge of the bucket
  // where the running count first reaches ceil(phi * n).
  std::uint64_t quantile(double phi) const;
  std::uint64_t quantile_at_rank(std::uint64_t target_rank) const;

  std::uint64_t total_count() const { return n_; }
  double rho() const { return rho_; }
  std::uint64_t value_range() const { return u_; }
  std::uint32_t log_u() const { return log_u_; }
  std::uint64_t threshold() const {
    return static_cast<std::uint64_t>(static_cast<double>(n_) * rho_ / log_u_);
  }
  std::size_t bucket_count() const;

  // Buckets as (packed key, count), sorted by (level, index).
  std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted_buckets() const;
  // Keys in post-order of the bucket tree (ascending hi edge, leaves first).
  std::vector<std::uint64_t> postorder_keys() const;

  // One line per bucket: "level index lo hi count", sorted by (level, index).
  std::string dump() const;

  // Verifies both bucket properties, count conservation, and key sanity.
  // Meaningful right after an explicit compress().
  bool check_invariants(std::string* why = nullptr) const;

  static constexpr std::uint64_t pack(std::uint32_t level, std::uint64_t index) {
    return (static_cast<std::uint64_t>(level) << 40) | index;
  }
  static constexpr std::uint32_t level_of(std::uint64_t key) {
    return static_cast<std::uint32_t>(key >> 40);
  }
  static constexpr std::uint64_t index_of(std::uint64_t key) {
    return key & ((std::uint64_t{1} << 40) - 1);
  }
  static constexpr std::uint64_t bucket_lo(std::uint64_t key) {
    return ((index_of(key) - 1) << level_of(key)) + 1;
  }
  static constexpr std::uint64_t bucket_hi(std::uint64_t key) {
    return index_of(key) << level_of(key);
  }

 private:
  using Level = std::unordered_map<std::uint64_t, std::uint64_t>;  // index -> count

  std::uint64_t count_at(std::uint32_t level, std::uint64_t index) const {
    const Level& lv = levels_[level];
    auto it = lv.find(index);
    return it == lv.end() ? 0 : it->second;
  }

  bool leaf_triple_violates(std::uint64_t leaf_index, std::uint64_t thr) const;

  // Single maintenance pass used on the insert path.
  template <class OnMerge>
  void maintain(OnMerge&& on_merge);
  template <class OnMerge>
  bool full_sweep(std::uint64_t thr, OnMerge&& on_merge);
  template <class OnMerge>
  void dirty_sweep(std::uint64_t thr, OnMerge&& on_merge);
  // Merge check for the canonical pair containing `index`; true when merged.
  template <class OnMerge>
  bool try_merge_pair(std::uint32_t level, std::uint64_t index, std::uint64_t thr,
                      OnMerge&& on_merge);

  double rho_;
  std::uint64_t u_;
  std::uint32_t log_u_;
  Cadence cadence_;
  std::uint64_t batch_interval_;
  std::uint64_t n_ = 0;
  std::uint64_t inserts_since_compress_ = 0;
  // Threshold at the last full sweep; the sentinel forces the first sweep to
  // be full. Between full sweeps only the dirty leaves' ancestor chains can
  // newly violate (2), so maintenance walks just those.
  std::uint64_t last_full_threshold_ = ~std::uint64_t{0};
  std::vector<std::uint64_t> dirty_leaves_;
  std::vector<Level> levels_;  // levels_[l]: index -> count
};

template <class OnMerge>
void QDigest::insert_with(std::uint64_t value, OnMerge&& on_merge) {
  if (value < 1 || value > u_) throw DomainError("value outside [1, U]");
  ++levels_[0][value];
  ++n_;
  ++inserts_since_compress_;
  if (dirty_leaves_.empty() || dirty_leaves_.back() != value) {
    dirty_leaves_.push_back(value);
    // Cap the dirty list; an overflow just demotes the next maintenance
    // pass to a full sweep (a superset of the dirty one).
    if (dirty_leaves_.size() > std::size_t{1} << 16) {
      dirty_leaves_.clear();
      last_full_threshold_ = ~std::uint64_t{0};
    }
  }
  if (cadence_ == Cadence::Batched) {
    if (inserts_since_compress_ >= batch_interval_) maintain(on_merge);
    return;
  }
  std::uint64_t thr = threshold();
  if (thr > 0 && leaf_triple_violates(value, thr)) maintain(on_merge);
}

template <class OnMerge>
void QDigest::maintain(OnMerge&& on_merge) {
  inserts_since_compress_ = 0;
  std::uint64_t thr = threshold();
  if (thr == 0) return;
  if (thr != last_full_threshold_) {
    full_sweep(thr, on_merge);
    last_full_threshold_ = thr;
  } else {
    dirty_sweep(thr, on_merge);
  }
  dirty_leaves_.clear();
}

template <class OnMerge>
void QDigest::compress_with(OnMerge&& on_merge) {
  inserts_since_compress_ = 0;
  std::uint64_t thr = threshold();
  if (thr == 0) return;
  // Merging a pair can orphan buckets below the absorbed parent, so sweep
  // until stable; chains rise one level per sweep, bounding the loop.
  while (full_sweep(thr, on_merge)) {
  }
  last_full_threshold_ = thr;
  dirty_leaves_.clear();
}

template <class OnMerge>
bool QDigest::try_merge_pair(std::uint32_t level, std::uint64_t index, std::uint64_t thr,
                             OnMerge&& on_merge) {
  std::uint64_t sibling = (index % 2 == 1) ? index + 1 : index - 1;
  std::uint64_t left = std::min(index, sibling);
  std::uint64_t right = left + 1;
  std::uint64_t c_left = count_at(level, left);
  std::uint64_t c_right = count_at(level, right);
  if (c_left == 0 && c_right == 0) return false;
  std::uint64_t parent = (left + 1) / 2;
  std::uint64_t c_parent = count_at(level + 1, parent);
  if (c_left + c_right + c_parent >= thr) return false;
  levels_[level + 1][parent] = c_parent + c_left + c_right;
  std::uint64_t parent_key = pack(level + 1, parent);
  if (c_left > 0) {
    levels_[level].erase(left);
    on_merge(pack(level, left), parent_key);
  }
  if (c_right > 0) {
    levels_[level].erase(right);
    on_merge(pack(level, right), parent_key);
  }
  return true;
}

template <class OnMerge>
bool QDigest::full_sweep(std::uint64_t thr, OnMerge&& on_merge) {
  bool merged_any = false;
  std::vector<std::uint64_t> snapshot;
  for (std::uint32_t level = 0; level < log_u_; ++level) {
    snapshot.clear();
    snapshot.reserve(levels_[level].size());
    for (const auto& [index, count] : levels_[level]) {
      (void)count;
      snapshot.push_back(index);
    }
    for (std::uint64_t index : snapshot) {
      std::uint64_t sibling = (index % 2 == 1) ? index + 1 : index - 1;
      // Visit each pair once: the even index defers to a present sibling.
      if (index > sibling && levels_[level].count(sibling)) continue;
      if (!levels_[level].count(index)) continue;
      merged_any |= try_merge_pair(level, index, thr, on_merge);
    }
  }
  return merged_any;
}

template <class OnMerge>
void QDigest::dirty_sweep(std::uint64_t thr, OnMerge&& on_merge) {
  std::vector<std::uint64_t> pending = dirty_leaves_;
  std::vector<std::uint64_t> next;
  for (std::uint32_t level = 0; level < log_u_ && !pending.empty(); ++level) {
    std::sort(pending.begin(), pending.end());
    pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
    next.clear();
    for (std::uint64_t index : pending) {
      std::uint64_t sibling = (index % 2 == 1) ? index + 1 : index - 1;
      if (!levels_[level].count(index) && !levels_[level].count(sibling)) continue;
      if (try_merge_pair(level, index, thr, on_merge)) {
        next.push_back((std::min(index, sibling) + 1) / 2);
      }
    }
    pending.swap(next);
  }
}

}  // namespace braid
