#include "braid/exp_bucket.hpp"

#include <algorithm>
#include <cmath>

#include "braid/wire.hpp"

namespace braid {

namespace {
// Values sitting exactly on a boundary log-ratio land on the higher bucket;
// the guard absorbs the sub-ulp droop of log(v)/log(1+rho) at exact powers.
constexpr double kBoundaryGuard = 1e-9;
}  // namespace

ExponentialBucketSynopsis::ExponentialBucketSynopsis(double rho, std::uint64_t u,
                                                     const CmConfig& cm)
    : rho_(rho), u_(u), cm_(cm) {
  if (!(rho > 0.0)) throw DomainError("bucket ratio rho must be positive");
  if (u < 2 || !is_power_of_two(u)) throw DomainError("U must be a power of two >= 2");
  log_ratio_ = std::log1p(rho_);
  std::size_t buckets =
      static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(u_)) / log_ratio_)) + 1;
  counts_.assign(buckets, 0);
  sketches_.reserve(buckets);
  for (std::size_t b = 0; b < buckets; ++b) sketches_.emplace_back(cm_);
}

std::size_t ExponentialBucketSynopsis::bucket_index(std::uint64_t value) const {
  if (value < 1 || value > u_) throw DomainError("value outside [1, U]");
  double x = std::log(static_cast<double>(value)) / log_ratio_ + kBoundaryGuard;
  auto idx = static_cast<std::size_t>(x);
  return std::min(idx, counts_.size() - 1);
}

double ExponentialBucketSynopsis::bucket_left_edge(std::size_t b) const {
  return std::pow(1.0 + rho_, static_cast<double>(b));
}

void ExponentialBucketSynopsis::ingest(const BraidItem& item) {
  std::size_t b = bucket_index(item.value);
  sketches_[b].insert(item.stream_id);
  ++counts_[b];
  ++total_;
  ids_.insert(item.stream_id);
}

std::uint64_t ExponentialBucketSynopsis::stream_size(StreamId id) const {
  std::uint64_t sum = 0;
  for (const auto& sk : sketches_) sum += sk.point_query(id);
  return sum;
}

std::uint64_t ExponentialBucketSynopsis::estimated_size_or_throw(
    StreamId id, std::vector<std::uint64_t>& per_bucket) const {
  per_bucket.resize(sketches_.size());
  std::uint64_t sum = 0;
  for (std::size_t b = 0; b < sketches_.size(); ++b) {
    per_bucket[b] = sketches_[b].point_query(id);
    sum += per_bucket[b];
  }
  if (sum == 0) throw EmptyStreamError("stream has no estimated items");
  return sum;
}

double ExponentialBucketSynopsis::quantile(StreamId id, double phi) const {
  if (!(phi > 0.0 && phi < 1.0)) throw DomainError("phi must be in (0,1)");
  std::vector<std::uint64_t> per_bucket;
  std::uint64_t n = estimated_size_or_throw(id, per_bucket);
  std::uint64_t target = quantile_target_rank(phi, n);
  std::uint64_t running = 0;
  for (std::size_t b = 0; b < per_bucket.size(); ++b) {
    running += per_bucket[b];
    if (running >= target) return bucket_left_edge(b);
  }
  return bucket_left_edge(per_bucket.size() - 1);
}

double ExponentialBucketSynopsis::median(StreamId id) const {
  std::vector<std::uint64_t> per_bucket;
  std::uint64_t n = estimated_size_or_throw(id, per_bucket);
  std::uint64_t target = median_target_rank(n);
  std::uint64_t running = 0;
  for (std::size_t b = 0; b < per_bucket.size(); ++b) {
    running += per_bucket[b];
    if (running >= target) return bucket_left_edge(b);
  }
  return bucket_left_edge(per_bucket.size() - 1);
}

double ExponentialBucketSynopsis::average(StreamId id) const {
  std::vector<std::uint64_t> per_bucket;
  std::uint64_t n = estimated_size_or_throw(id, per_bucket);
  double weighted = 0.0;
  for (std::size_t b = 0; b < per_bucket.size(); ++b) {
    if (per_bucket[b] == 0) continue;
    double rep = std::pow(1.0 + rho_, static_cast<double>(b) + 0.5);
    weighted += rep * static_cast<double>(per_bucket[b]);
  }
  return weighted / static_cast<double>(n);
}

double ExponentialBucketSynopsis::estimate(StreamId id, const WeightFunction& weight) const {
  switch (weight.kind()) {
    case WeightKind::Average:
      return average(id);
    case WeightKind::Median:
      return median(id);
    case WeightKind::Quantile:
      return quantile(id, weight.phi());
    default:
      throw CapabilityError("ExponentialBucket supports only average, median, quantile");
  }
}

std::vector<StreamId> ExponentialBucketSynopsis::observed_ids() const {
  std::vector<StreamId> ids(ids_.begin(), ids_.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<TopkEntry> ExponentialBucketSynopsis::topk(const WeightFunction& weight,
                                                       std::size_t k) const {
  if (weight.kind() != WeightKind::Average && weight.kind() != WeightKind::Median &&
      weight.kind() != WeightKind::Quantile) {
    throw CapabilityError("ExponentialBucket supports only average, median, quantile");
  }
  std::vector<StreamId> ids = observed_ids();
  return topk_by_estimate(std::span<const StreamId>(ids), k,
                          [&](StreamId id) { return estimate(id, weight); });
}

void ExponentialBucketSynopsis::serialize(std::vector<std::uint8_t>& out) const {
  wire::put_magic(out, "EBS1");
  wire::put_f64(out, rho_);
  wire::put_u64(out, u_);
  wire::put_u32(out, cm_.width);
  wire::put_u32(out, cm_.depth);
  wire::put_u64(out, cm_.seed);
  wire::put_u32(out, static_cast<std::uint32_t>(counts_.size()));
  for (std::size_t b = 0; b < counts_.size(); ++b) {
    wire::put_u64(out, counts_[b]);
    sketches_[b].serialize(out);
  }
  auto ids = observed_ids();
  wire::put_u32(out, static_cast<std::uint32_t>(ids.size()));
  for (StreamId id : ids) wire::put_u32(out, id);
}

std::size_t ExponentialBucketSynopsis::counter_bytes() const {
  std::size_t bytes = 4 + 8 + 8 + 4 + 4 + 8 + 4;  // header
  for (const auto& sk : sketches_) bytes += 8 + sk.snapshot_bytes();
  return bytes;
}

std::size_t ExponentialBucketSynopsis::idset_bytes() const { return 4 + 4 * ids_.size(); }

}  // namespace braid
