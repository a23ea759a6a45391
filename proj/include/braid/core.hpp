#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace braid {

using StreamId = std::uint32_t;

// Error taxonomy. Every contract violation named by the API gets its own
// type so callers (and the CLI exit-code mapping) can route on it.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ZeroDenominatorError : Error {
  using Error::Error;
};
struct EmptyStreamError : Error {
  using Error::Error;
};
struct IncompatibleSketchError : Error {
  using Error::Error;
};
struct CounterOverflowError : Error {
  using Error::Error;
};
struct CapabilityError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};

// One arrival in the braid: which stream, what value, and the global
// arrival position. Values are integer latency units in [1, U].
struct BraidItem {
  StreamId stream_id = 0;
  std::uint64_t value = 0;
  std::uint64_t arrival_index = 0;
};

enum class WeightKind { Average, Median, Quantile, Max, Min, SecondMax, Spread };

// A stream weight: the scalar statistic streams are ranked by.
class WeightFunction {
 public:
  static WeightFunction average() { return {WeightKind::Average, 0.0}; }
  static WeightFunction median() { return {WeightKind::Median, 0.0}; }
  static WeightFunction quantile(double phi) {
    if (!(phi > 0.0 && phi < 1.0)) {
      throw DomainError("quantile fraction must lie strictly inside (0,1)");
    }
    return {WeightKind::Quantile, phi};
  }
  static WeightFunction max() { return {WeightKind::Max, 0.0}; }
  static WeightFunction min() { return {WeightKind::Min, 0.0}; }
  static WeightFunction second_max() { return {WeightKind::SecondMax, 0.0}; }
  static WeightFunction spread() { return {WeightKind::Spread, 0.0}; }

  WeightKind kind() const { return kind_; }
  double phi() const { return phi_; }

  std::string name() const;
  // Parses the CLI token form: avg|median|q:<phi>|max|min|secondmax|spread.
  static WeightFunction parse(const std::string& token);

  friend bool operator==(const WeightFunction& a, const WeightFunction& b) {
    return a.kind_ == b.kind_ && a.phi_ == b.phi_;
  }

 private:
  WeightFunction(WeightKind k, double phi) : kind_(k), phi_(phi) {}
  WeightKind kind_;
  double phi_;
};

constexpr bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

inline std::uint32_t log2_exact(std::uint64_t u) {
  std::uint32_t l = 0;
  while ((std::uint64_t{1} << l) < u) ++l;
  return l;
}

// Approximation knobs shared by the synopses: eps/delta size the Count-Min
// sketches, rho controls bucket compression, U bounds the value range.
struct ApproxParams {
  double eps = 0.01;
  double delta = 0.01;
  double rho = 0.01;
  std::uint64_t u = std::uint64_t{1} << 16;

  void validate() const {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must be in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0,1)");
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must be in (0,1)");
    if (u < 2 || !is_power_of_two(u)) throw DomainError("U must be a power of two >= 2");
  }
};

// rank(x, S): number of items in S with value <= x. `sorted` must be
// ascending; x need not occur in it.
inline std::size_t rank(double x, std::span<const double> sorted) {
  return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), x) -
                                  sorted.begin());
}

inline std::size_t rank_error(double estimate, double truth, std::span<const double> sorted) {
  std::size_t re = rank(estimate, sorted);
  std::size_t rt = rank(truth, sorted);
  return re > rt ? re - rt : rt - re;
}

inline double relative_value_error(double estimate, double truth) {
  if (truth == 0.0) {
    throw ZeroDenominatorError("relative value error undefined for zero truth");
  }
  return std::abs(estimate - truth) / std::abs(truth);
}

// Element of the sorted multiset at rank r, with r clamped into [1, n].
// The median convention is rank floor(n/2); Quantile(phi) is rank ceil(phi*n).
inline double value_at_rank(std::span<const double> sorted, std::int64_t target_rank) {
  if (sorted.empty()) throw EmptyStreamError("value_at_rank on empty multiset");
  std::int64_t n = static_cast<std::int64_t>(sorted.size());
  std::int64_t r = std::clamp<std::int64_t>(target_rank, 1, n);
  return sorted[static_cast<std::size_t>(r - 1)];
}

inline std::uint64_t median_target_rank(std::uint64_t n) {
  return std::max<std::uint64_t>(1, n / 2);
}

inline std::uint64_t quantile_target_rank(double phi, std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::ceil(phi * static_cast<double>(n)));
  return std::clamp<std::uint64_t>(r, 1, n == 0 ? 1 : n);
}

// 64-bit finalizer used for seeded hashing throughout; strong mixing keeps
// sketch rows reproducible across runs for a fixed seed.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One answer row of a top-k query.
struct TopkEntry {
  StreamId stream_id = 0;
  double estimate = 0.0;
};

// Ranks every candidate id by the supplied estimator and keeps the k best;
// "best" is largest unless smallest_first (the Min weight ranks ascending:
// its outliers are the streams whose smallest item is smallest). Ties go to
// the smaller stream id.
template <class EstimateFn>
std::vector<TopkEntry> topk_by_estimate(std::span<const StreamId> ids, std::size_t k,
                                        EstimateFn&& estimate, bool smallest_first = false) {
  if (k < 1) throw DomainError("top-k requires k >= 1");
  std::vector<TopkEntry> all;
  all.reserve(ids.size());
  for (StreamId id : ids) all.push_back({id, estimate(id)});
  std::sort(all.begin(), all.end(), [smallest_first](const TopkEntry& a, const TopkEntry& b) {
    if (a.estimate != b.estimate) {
      return smallest_first ? a.estimate < b.estimate : a.estimate > b.estimate;
    }
    return a.stream_id < b.stream_id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace braid
