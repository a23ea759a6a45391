#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "braid/cm_sketch.hpp"
#include "braid/core.hpp"
#include "braid/qdigest.hpp"

namespace braid {

// How per-stream prefix counts are read off the bucket sketches during
// quantile traversal and size estimation.
enum class VbQueryMode {
  // Sum of per-bucket point queries. Each bucket's row minimum is taken
  // before summing, so the estimate stays one-sided but tracks the true
  // count far more tightly when bucket key support is small.
  PerBucketSum,
  // Literal running union: one accumulator sketch merged bucket by bucket,
  // point-queried after each merge. Kept for comparison; every row of the
  // accumulator carries the whole prefix's collision mass.
  UnionAccumulator,
};

// q-digest bucket structure where every bucket carries a Count-Min sketch
// keyed by stream id. Bucket boundaries adapt to the data; quantile answers
// are bucket hi edges with rank error at most 2*eps*n + rho*n.
class VariableBucketSynopsis {
 public:
  VariableBucketSynopsis(const ApproxParams& params, const CmConfig& cm,
                         QDigest::Cadence cadence = QDigest::Cadence::PerInsert,
                         VbQueryMode mode = VbQueryMode::PerBucketSum);
  // Sketch geometry derived from params (width from eps, depth from delta).
  VariableBucketSynopsis(const ApproxParams& params, std::uint64_t sketch_seed,
                         QDigest::Cadence cadence = QDigest::Cadence::PerInsert,
                         VbQueryMode mode = VbQueryMode::PerBucketSum);

  void ingest(const BraidItem& item);
  void compress();

  std::uint64_t stream_size(StreamId id) const;
  // Hi edge of the bucket where the running per-stream count first reaches
  // ceil(phi * n_i).
  std::uint64_t quantile(StreamId id, double phi) const;
  std::uint64_t median(StreamId id) const;
  // Sum over buckets of rep(b) * q_i(b) / n_i with rep(b) the bucket range
  // midpoint.
  double average(StreamId id) const;
  double estimate(StreamId id, const WeightFunction& weight) const;
  std::vector<TopkEntry> topk(const WeightFunction& weight, std::size_t k) const;

  const QDigest& digest() const { return digest_; }
  const ApproxParams& params() const { return params_; }
  const CmConfig& cm_config() const { return cm_; }
  VbQueryMode query_mode() const { return mode_; }
  std::vector<StreamId> observed_ids() const;
  const CountMinSketch& bucket_sketch(std::uint64_t packed_key) const;

  // Snapshot: "VBS1", params, cm config, buckets sorted by (level, index)
  // as (key, count, sketch), then the sorted id set.
  void serialize(std::vector<std::uint8_t>& out) const;
  std::size_t counter_bytes() const;
  std::size_t idset_bytes() const;
  std::size_t snapshot_bytes() const { return counter_bytes() + idset_bytes(); }

 private:
  std::uint64_t quantile_at_rank_target(StreamId id, std::uint64_t n_hat,
                                        std::uint64_t target) const;
  void on_merge(std::uint64_t from_key, std::uint64_t to_key);

  ApproxParams params_;
  CmConfig cm_;
  VbQueryMode mode_;
  QDigest digest_;
  std::unordered_map<std::uint64_t, CountMinSketch> sketches_;  // packed key -> sketch
  std::unordered_set<StreamId> ids_;
};

}  // namespace braid
