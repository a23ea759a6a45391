#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "braid/cm_sketch.hpp"
#include "braid/core.hpp"

namespace braid {

// Fixed geometric value buckets, each owning a Count-Min sketch keyed by
// stream id. Bucket b covers [(1+rho)^b, (1+rho)^(b+1)), left-closed, with
// the last bucket closed at U. Value-error oriented: quantile answers are
// bucket left edges, so they carry relative value error at most rho but no
// rank guarantee.
class ExponentialBucketSynopsis {
 public:
  ExponentialBucketSynopsis(double rho, std::uint64_t u, const CmConfig& cm);

  void ingest(const BraidItem& item);

  // Estimated stream size: sum of per-bucket point queries (overestimate).
  std::uint64_t stream_size(StreamId id) const;
  // Left edge (1+rho)^B of the bucket bracketing rank ceil(phi * n_i).
  double quantile(StreamId id, double phi) const;
  double median(StreamId id) const;
  // Weighted mean of bucket representatives; rep(b) is the geometric mean of
  // the bucket edges, (1+rho)^(b+1/2).
  double average(StreamId id) const;
  // Routes Average/Median/Quantile; other weights raise CapabilityError.
  double estimate(StreamId id, const WeightFunction& weight) const;
  std::vector<TopkEntry> topk(const WeightFunction& weight, std::size_t k) const;

  std::size_t bucket_index(std::uint64_t value) const;
  double bucket_left_edge(std::size_t b) const;
  std::size_t bucket_count() const { return counts_.size(); }
  std::uint64_t bucket_items(std::size_t b) const { return counts_[b]; }
  std::uint64_t total_items() const { return total_; }
  const CountMinSketch& bucket_sketch(std::size_t b) const { return sketches_[b]; }
  std::vector<StreamId> observed_ids() const;

  // Snapshot: "EBS1", rho, U, cm config, bucket count, per-bucket items +
  // sketch, then the sorted id set.
  void serialize(std::vector<std::uint8_t>& out) const;
  std::size_t counter_bytes() const;
  std::size_t idset_bytes() const;
  std::size_t snapshot_bytes() const { return counter_bytes() + idset_bytes(); }

 private:
  std::uint64_t estimated_size_or_throw(StreamId id,
                                        std::vector<std::uint64_t>& per_bucket) const;

  double rho_;
  std::uint64_t u_;
  double log_ratio_;  // ln(1 + rho)
  CmConfig cm_;
  std::vector<std::uint64_t> counts_;  // items per bucket, exact
  std::vector<CountMinSketch> sketches_;
  std::uint64_t total_ = 0;
  std::unordered_set<StreamId> ids_;
};

}  // namespace braid
