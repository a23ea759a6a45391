#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "braid/core.hpp"

namespace braid {

// Exact ranking of every observed stream under one weight function, best
// first, ties by smaller id. rank_of is 1-based.
struct Ranking {
  std::vector<TopkEntry> ordered;
  std::unordered_map<StreamId, std::size_t> rank_of;
};

// Fully materialized braid: one sorted value multiset per stream. This is
// the O(n)-memory ground truth every approximation is measured against.
// Values are doubles so the real-valued adversarial constructions fit; the
// integer braid path loads losslessly.
class MaterializedBraid {
 public:
  MaterializedBraid() = default;

  static MaterializedBraid from_items(std::span<const BraidItem> items);
  static MaterializedBraid from_records(
      std::span<const std::pair<StreamId, double>> records);

  void add(StreamId id, double value);
  // Sorts the per-stream multisets; add() after finalize() is an error.
  void finalize();

  std::size_t stream_count() const { return streams_.size(); }
  std::uint64_t total_items() const { return total_; }
  const std::vector<StreamId>& ids() const { return sorted_ids_; }
  std::span<const double> values(StreamId id) const;

  double weight(StreamId id, const WeightFunction& weight) const;
  Ranking ranking(const WeightFunction& weight) const;
  std::vector<TopkEntry> topk(const WeightFunction& weight, std::size_t k) const;

  // Value storage only: 8 bytes per item.
  std::size_t memory_bytes() const { return 8 * total_; }

 private:
  std::unordered_map<StreamId, std::vector<double>> streams_;
  std::vector<StreamId> sorted_ids_;
  std::uint64_t total_ = 0;
  bool finalized_ = false;
};

}  // namespace braid
