#include "braid/var_bucket.hpp"

#include <algorithm>

#include "braid/wire.hpp"

namespace braid {

VariableBucketSynopsis::VariableBucketSynopsis(const ApproxParams& params,
                                               const CmConfig& cm, QDigest::Cadence cadence,
                                               VbQueryMode mode)
    : params_(params), cm_(cm), mode_(mode), digest_(params.rho, params.u, cadence) {
  params_.validate();
  if (cm_.width < 1 || cm_.depth < 1) throw DomainError("invalid Count-Min config");
}

VariableBucketSynopsis::VariableBucketSynopsis(const ApproxParams& params,
                                               std::uint64_t sketch_seed,
                                               QDigest::Cadence cadence, VbQueryMode mode)
    : VariableBucketSynopsis(params,
                             CmConfig::from_error(params.eps, params.delta, sketch_seed),
                             cadence, mode) {}

void VariableBucketSynopsis::on_merge(std::uint64_t from_key, std::uint64_t to_key) {
  auto node = sketches_.extract(from_key);
  if (node.empty()) throw Error("bucket merged without a backing sketch");
  auto it = sketches_.find(to_key);
  if (it == sketches_.end()) {
    sketches_.emplace(to_key, std::move(node.mapped()));
  } else {
    it->second.merge(node.mapped());
  }
}

void VariableBucketSynopsis::ingest(const BraidItem& item) {
  if (item.value < 1 || item.value > params_.u) throw DomainError("value outside [1, U]");
  std::uint64_t leaf_key = QDigest::pack(0, item.value);
  auto it = sketches_.try_emplace(leaf_key, cm_).first;
  it->second.insert(item.stream_id);
  ids_.insert(item.stream_id);
  digest_.insert_with(item.value,
                      [this](std::uint64_t from, std::uint64_t to) { on_merge(from, to); });
}

void VariableBucketSynopsis::compress() {
  digest_.compress_with(
      [this](std::uint64_t from, std::uint64_t to) { on_merge(from, to); });
}

const CountMinSketch& VariableBucketSynopsis::bucket_sketch(std::uint64_t packed_key) const {
  auto it = sketches_.find(packed_key);
  if (it == sketches_.end()) throw DomainError("no sketch for that bucket");
  return it->second;
}

std::uint64_t VariableBucketSynopsis::stream_size(StreamId id) const {
  if (mode_ == VbQueryMode::UnionAccumulator) {
    if (sketches_.empty()) return 0;
    CountMinSketch acc(cm_);
    for (const auto& [key, sk] : sketches_) {
      (void)key;
      acc.merge(sk);
    }
    return acc.point_query(id);
  }
  std::uint64_t sum = 0;
  for (const auto& [key, sk] : sketches_) {
    (void)key;
    sum += sk.point_query(id);
  }
  return sum;
}

std::uint64_t VariableBucketSynopsis::quantile_at_rank_target(StreamId id,
                                                              std::uint64_t n_hat,
                                                              std::uint64_t target) const {
  if (n_hat == 0) throw EmptyStreamError("stream has no estimated items");
  target = std::clamp<std::uint64_t>(target, 1, n_hat);
  auto order = digest_.postorder_keys();
  std::uint64_t last_hi = params_.u;
  if (mode_ == VbQueryMode::UnionAccumulator) {
    CountMinSketch acc(cm_);
    for (std::uint64_t key : order) {
      acc.merge(sketches_.at(key));
      last_hi = QDigest::bucket_hi(key);
      if (acc.point_query(id) >= target) return last_hi;
    }
    return last_hi;
  }
  std::uint64_t running = 0;
  for (std::uint64_t key : order) {
    running += sketches_.at(key).point_query(id);
    last_hi = QDigest::bucket_hi(key);
    if (running >= target) return last_hi;
  }
  return last_hi;
}

std::uint64_t VariableBucketSynopsis::quantile(StreamId id, double phi) const {
  if (!(phi > 0.0 && phi < 1.0)) throw DomainError("phi must be in (0,1)");
  std::uint64_t n_hat = stream_size(id);
  if (n_hat == 0) throw EmptyStreamError("stream has no estimated items");
  return quantile_at_rank_target(id, n_hat, quantile_target_rank(phi, n_hat));
}

std::uint64_t VariableBucketSynopsis::median(StreamId id) const {
  std::uint64_t n_hat = stream_size(id);
  if (n_hat == 0) throw EmptyStreamError("stream has no estimated items");
  return quantile_at_rank_target(id, n_hat, median_target_rank(n_hat));
}

double VariableBucketSynopsis::average(StreamId id) const {
  std::uint64_t n_hat = 0;
  double weighted = 0.0;
  for (const auto& [key, sk] : sketches_) {
    std::uint64_t q = sk.point_query(id);
    if (q == 0) continue;
    n_hat += q;
    double rep = (static_cast<double>(QDigest::bucket_lo(key)) +
                  static_cast<double>(QDigest::bucket_hi(key))) /
                 2.0;
    weighted += rep * static_cast<double>(q);
  }
  if (n_hat == 0) throw EmptyStreamError("stream has no estimated items");
  return weighted / static_cast<double>(n_hat);
}

double VariableBucketSynopsis::estimate(StreamId id, const WeightFunction& weight) const {
  switch (weight.kind()) {
    case WeightKind::Average:
      return average(id);
    case WeightKind::Median:
      return static_cast<double>(median(id));
    case WeightKind::Quantile:
      return static_cast<double>(quantile(id, weight.phi()));
    default:
      throw CapabilityError("VariableBucket supports only average, median, quantile");
  }
}

std::vector<StreamId> VariableBucketSynopsis::observed_ids() const {
  std::vector<StreamId> ids(ids_.begin(), ids_.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<TopkEntry> VariableBucketSynopsis::topk(const WeightFunction& weight,
                                                    std::size_t k) const {
  if (weight.kind() != WeightKind::Average && weight.kind() != WeightKind::Median &&
      weight.kind() != WeightKind::Quantile) {
    throw CapabilityError("VariableBucket supports only average, median, quantile");
  }
  std::vector<StreamId> ids = observed_ids();
  return topk_by_estimate(std::span<const StreamId>(ids), k,
                          [&](StreamId id) { return estimate(id, weight); });
}

void VariableBucketSynopsis::serialize(std::vector<std::uint8_t>& out) const {
  wire::put_magic(out, "VBS1");
  wire::put_f64(out, params_.eps);
  wire::put_f64(out, params_.delta);
  wire::put_f64(out, params_.rho);
  wire::put_u64(out, params_.u);
  wire::put_u32(out, cm_.width);
  wire::put_u32(out, cm_.depth);
  wire::put_u64(out, cm_.seed);
  auto buckets = digest_.sorted_buckets();
  wire::put_u32(out, static_cast<std::uint32_t>(buckets.size()));
  for (const auto& [key, count] : buckets) {
    wire::put_u64(out, key);
    wire::put_u64(out, count);
    sketches_.at(key).serialize(out);
  }
  auto ids = observed_ids();
  wire::put_u32(out, static_cast<std::uint32_t>(ids.size()));
  for (StreamId id : ids) wire::put_u32(out, id);
}

std::size_t VariableBucketSynopsis::counter_bytes() const {
  std::size_t bytes = 4 + 8 * 3 + 8 + 4 + 4 + 8 + 4;  // header
  for (const auto& [key, sk] : sketches_) {
    (void)key;
    bytes += 8 + 8 + sk.snapshot_bytes();
  }
  return bytes;
}

std::size_t VariableBucketSynopsis::idset_bytes() const { return 4 + 4 * ids_.size(); }

}  // namespace braid
