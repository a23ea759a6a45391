#include "braid/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>

namespace braid {

namespace {

// All randomness flows through mt19937_64 (whose sequence the standard pins)
// plus the hand-rolled reductions below, so a braid file is reproducible
// from its GenSpec across toolchains.

std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t span = hi - lo + 1;
  if (span == 0) return rng();  // full range
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - span + 1;
  std::uint64_t reject_above = limit - limit % span + span - 1;
  for (;;) {
    std::uint64_t x = rng();
    if (x <= reject_above) return lo + x % span;
  }
}

double uniform01_open(std::mt19937_64& rng) {
  // (0, 1]: safe for the log below.
  return 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal(std::mt19937_64& rng, double mean, double stddev) {
  double u1 = uniform01_open(rng);
  double u2 = uniform01_open(rng);
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
  return mean + stddev * z;
}

// Normal draw conditioned on [lo, hi]. Used for inter-stream means: clamping
// would pile the out-of-range tail onto the boundary value, manufacturing a
// cluster of streams with indistinguishable weights.
double truncated_normal(std::mt19937_64& rng, double mean, double stddev, double lo,
                        double hi) {
  for (int tries = 0; tries < 1000; ++tries) {
    double x = normal(rng, mean, stddev);
    if (x >= lo && x <= hi) return x;
  }
  return std::clamp(mean, lo, hi);
}

std::uint64_t clamp_to_range(double x, std::uint64_t u) {
  double r = std::llround(x);
  if (r < 1.0) return 1;
  if (r > static_cast<double>(u)) return u;
  return static_cast<std::uint64_t>(r);
}

std::mt19937_64 stream_rng(std::uint64_t seed, StreamId id) {
  std::uint64_t s = seed;
  std::uint64_t k = splitmix64(s);
  return std::mt19937_64(mix64(k ^ (static_cast<std::uint64_t>(id) * 0x9e3779b97f4a7c15ULL)));
}

void shuffle_items(std::vector<BraidItem>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_u64(rng, 0, i - 1));
    std::swap(items[i - 1], items[j]);
  }
}

void assign_arrival_indices(std::vector<BraidItem>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) items[i].arrival_index = i;
}

// Emits per-stream value queues in round-robin order over stream ids;
// streams drop out as they exhaust.
std::vector<BraidItem> interleave_round_robin(
    const std::vector<std::vector<std::uint64_t>>& per_stream) {
  std::vector<BraidItem> items;
  std::size_t total = 0;
  for (const auto& q : per_stream) total += q.size();
  items.reserve(total);
  std::size_t round = 0;
  for (bool emitted = true; emitted; ++round) {
    emitted = false;
    for (std::size_t i = 0; i < per_stream.size(); ++i) {
      if (round < per_stream[i].size()) {
        items.push_back({static_cast<StreamId>(i + 1), per_stream[i][round], 0});
        emitted = true;
      }
    }
  }
  return items;
}

std::vector<BraidItem> finish_interleave(std::vector<std::vector<std::uint64_t>> per_stream,
                                         const GenSpec& spec) {
  std::vector<BraidItem> items = interleave_round_robin(per_stream);
  if (spec.interleave == GenSpec::Interleave::UniformRandom) {
    std::mt19937_64 rng(mix64(spec.seed ^ 0x5a1de5e1eaf5ULL));
    shuffle_items(items, rng);
  }
  assign_arrival_indices(items);
  return items;
}

std::uint32_t stream_item_count(const GenSpec& spec, std::mt19937_64& count_rng) {
  if (!spec.jitter) return spec.items_per_stream;
  std::uint64_t lo = spec.items_per_stream - spec.items_per_stream / 10;
  std::uint64_t hi = spec.items_per_stream + spec.items_per_stream / 10;
  return static_cast<std::uint32_t>(uniform_u64(count_rng, std::max<std::uint64_t>(lo, 1), hi));
}

double intra_stream_stddev(const GenSpec& spec) {
  double figure = static_cast<double>(spec.u) / 20.0;
  return spec.noise_figure_is_stddev ? figure : std::sqrt(figure);
}

GeneratedBraid gen_synthetic(const GenSpec& spec) {
  if (spec.m < 1) throw DomainError("need at least one stream");
  if (spec.kind == GenSpec::Kind::Outlier &&
      !(spec.outlier_a > 0.0 && spec.outlier_a <= 0.8)) {
    throw DomainError("outlier parameter a must be in (0, 0.8]");
  }
  std::mt19937_64 master(spec.seed);
  double sigma = intra_stream_stddev(spec);
  double u = static_cast<double>(spec.u);

  std::vector<double> means(spec.m);
  std::uint32_t outliers = spec.m / 10;
  for (std::uint32_t i = 0; i < spec.m; ++i) {
    switch (spec.kind) {
      case GenSpec::Kind::Uniform:
        means[i] = static_cast<double>(uniform_u64(master, 1, spec.u));
        break;
      case GenSpec::Kind::Outlier: {
        bool outlier = i >= spec.m - outliers;
        double lo = outlier ? spec.outlier_a * u : 1.0;
        double hi = outlier ? (spec.outlier_a + 0.2) * u : 0.6 * u;
        means[i] = static_cast<double>(
            uniform_u64(master, std::max<std::uint64_t>(1, static_cast<std::uint64_t>(lo)),
                        std::min(spec.u, static_cast<std::uint64_t>(hi))));
        break;
      }
      case GenSpec::Kind::NormalInter:
        means[i] = truncated_normal(master, u / 2.0, u / 4.0, 1.0, u);
        break;
      default:
        throw DomainError("not a synthetic kind");
    }
  }

  std::vector<std::vector<std::uint64_t>> per_stream(spec.m);
  for (std::uint32_t i = 0; i < spec.m; ++i) {
    std::mt19937_64 rng = stream_rng(spec.seed, i + 1);
    std::uint32_t count = stream_item_count(spec, rng);
    per_stream[i].reserve(count);
    for (std::uint32_t j = 0; j < count; ++j) {
      per_stream[i].push_back(clamp_to_range(normal(rng, means[i], sigma), spec.u));
    }
  }

  GeneratedBraid out;
  out.items = finish_interleave(std::move(per_stream), spec);
  out.m = spec.m;
  out.u = spec.u;
  out.spec_hash = spec.spec_hash();
  return out;
}

std::vector<std::vector<StreamId>> random_sets(const GenSpec& spec, std::mt19937_64& rng,
                                               StreamId* common_out) {
  std::vector<std::vector<StreamId>> sets(spec.adv_t);
  for (StreamId i = 1; i <= spec.m; ++i) {
    std::uint64_t owner = uniform_u64(rng, 0, spec.adv_t);
    if (owner >= 1) sets[owner - 1].push_back(i);
  }
  if (!spec.instance_yes) {
    StreamId common = static_cast<StreamId>(uniform_u64(rng, 1, spec.m));
    for (auto& s : sets) std::erase(s, common);
    for (auto& s : sets) s.push_back(common);
    for (auto& s : sets) std::sort(s.begin(), s.end());
    if (common_out) *common_out = common;
  }
  return sets;
}

std::vector<std::vector<StreamId>> resolve_sets(const GenSpec& spec, std::mt19937_64& rng,
                                                StreamId* common_out) {
  std::vector<std::vector<StreamId>> sets;
  if (!spec.adv_sets.empty()) {
    sets = spec.adv_sets;
    for (const auto& s : sets) {
      for (StreamId i : s) {
        if (i < 1 || i > spec.m) throw DomainError("player set references unknown stream");
      }
    }
  } else {
    sets = random_sets(spec, rng, common_out);
  }
  validate_promise(sets, spec.instance_yes, spec.instance_yes ? nullptr : common_out);
  return sets;
}

GeneratedBraid gen_adv_median(const GenSpec& spec) {
  if (spec.adv_t < 1) throw DomainError("need at least one player");
  if (spec.adv_p < 1) throw DomainError("need p >= 1");
  if (spec.u < 2) throw DomainError("U must be at least 2");
  std::mt19937_64 master(spec.seed);
  StreamId common = 0;
  auto sets = resolve_sets(spec, master, &common);

  // Original values {0, 1} shift to {1, 2}; the relabeling is monotone so
  // every rank statement carries over. Initialization phase inserts p zeros
  // per stream, then player j inserts p ones into its set's streams and p
  // zeros elsewhere. Every stream ends with exactly p(t+1) items.
  std::vector<std::uint64_t> membership_value(spec.m + 1, 1);
  std::vector<BraidItem> items;
  items.reserve(static_cast<std::size_t>(spec.m) * spec.adv_p * (spec.adv_t + 1));
  auto emit_phase = [&](const std::vector<std::uint64_t>& value_for_stream) {
    for (std::uint32_t r = 0; r < spec.adv_p; ++r) {
      for (StreamId i = 1; i <= spec.m; ++i) {
        items.push_back({i, value_for_stream[i], 0});
      }
    }
  };
  emit_phase(membership_value);  // all 1s (shifted 0s)
  for (std::uint32_t j = 0; j < spec.adv_t; ++j) {
    std::vector<std::uint64_t> value_for_stream(spec.m + 1, 1);
    for (StreamId i : sets[j]) value_for_stream[i] = 2;
    emit_phase(value_for_stream);
  }
  if (spec.interleave == GenSpec::Interleave::UniformRandom) {
    std::mt19937_64 rng(mix64(spec.seed ^ 0x5a1de5e1eaf5ULL));
    shuffle_items(items, rng);
  }
  assign_arrival_indices(items);

  GeneratedBraid out;
  out.items = std::move(items);
  out.m = spec.m;
  out.u = spec.u;
  out.shift = 1;
  out.spec_hash = spec.spec_hash();
  out.has_label = true;
  out.label_yes = spec.instance_yes;
  out.intersection_stream = common;
  return out;
}

GeneratedBraid gen_adv_secondmax(const GenSpec& spec) {
  if (spec.adv_t < 1) throw DomainError("need at least one player");
  std::mt19937_64 master(spec.seed);
  StreamId common = 0;
  auto sets = resolve_sets(spec, master, &common);

  // Player j inserts j+1 and 1/(j+1) into its set's streams and two zeros
  // elsewhere; every stream ends with exactly 2t real values.
  GeneratedBraid out;
  out.real_valued = true;
  out.real_items.reserve(static_cast<std::size_t>(spec.m) * 2 * spec.adv_t);
  for (std::uint32_t j = 0; j < spec.adv_t; ++j) {
    std::vector<bool> member(spec.m + 1, false);
    for (StreamId i : sets[j]) member[i] = true;
    double big = static_cast<double>(j) + 2.0;  // players are 1-based
    double small = 1.0 / big;
    for (StreamId i = 1; i <= spec.m; ++i) {
      out.real_items.push_back({i, member[i] ? big : 0.0});
    }
    for (StreamId i = 1; i <= spec.m; ++i) {
      out.real_items.push_back({i, member[i] ? small : 0.0});
    }
  }
  out.m = spec.m;
  out.u = spec.u;
  out.shift = 0;
  out.spec_hash = spec.spec_hash();
  out.has_label = true;
  out.label_yes = spec.instance_yes;
  out.intersection_stream = common;
  return out;
}

GeneratedBraid gen_adv_spread(const GenSpec& spec) {
  if (spec.u < 4) throw DomainError("spread construction needs U >= 4");
  GenSpec two_party = spec;
  two_party.adv_t = 2;
  std::mt19937_64 master(spec.seed);
  StreamId common = 0;
  auto sets = resolve_sets(two_party, master, &common);

  // Original values {-1, 0, +1} shift to {1, 2, 3}: every stream starts with
  // one 2, the ODD player adds a 1 to its streams, the EVEN player adds a 3.
  std::vector<BraidItem> items;
  for (StreamId i = 1; i <= spec.m; ++i) items.push_back({i, 2, 0});
  for (StreamId i : sets[0]) items.push_back({i, 1, 0});
  for (StreamId i : sets[1]) items.push_back({i, 3, 0});
  if (spec.interleave == GenSpec::Interleave::UniformRandom) {
    std::mt19937_64 rng(mix64(spec.seed ^ 0x5a1de5e1eaf5ULL));
    shuffle_items(items, rng);
  }
  assign_arrival_indices(items);

  GeneratedBraid out;
  out.items = std::move(items);
  out.m = spec.m;
  out.u = spec.u;
  out.shift = 2;
  out.spec_hash = spec.spec_hash();
  out.has_label = true;
  out.label_yes = spec.instance_yes;
  out.intersection_stream = common;
  return out;
}

}  // namespace

void validate_promise(const std::vector<std::vector<StreamId>>& sets, bool yes,
                      StreamId* common_out) {
  std::unordered_map<StreamId, std::size_t> occurrences;
  for (const auto& s : sets) {
    std::vector<StreamId> dedup = s;
    std::sort(dedup.begin(), dedup.end());
    if (std::adjacent_find(dedup.begin(), dedup.end()) != dedup.end()) {
      throw DomainError("player set contains duplicates");
    }
    for (StreamId i : dedup) ++occurrences[i];
  }
  StreamId common = 0;
  for (const auto& [i, cnt] : occurrences) {
    if (cnt <= 1) continue;
    if (cnt != sets.size() || common != 0) {
      throw DomainError("sets violate the disjointness promise");
    }
    common = i;
  }
  if (yes && common != 0) throw DomainError("YES instance has a shared element");
  if (!yes && common == 0) throw DomainError("NO instance lacks a shared element");
  if (common_out) *common_out = common;
}

GeneratedBraid generate(const GenSpec& spec) {
  switch (spec.kind) {
    case GenSpec::Kind::Uniform:
    case GenSpec::Kind::Outlier:
    case GenSpec::Kind::NormalInter:
      return gen_synthetic(spec);
    case GenSpec::Kind::AdvMedian:
      return gen_adv_median(spec);
    case GenSpec::Kind::AdvSecondMax:
      return gen_adv_secondmax(spec);
    case GenSpec::Kind::AdvSpread:
      return gen_adv_spread(spec);
  }
  throw DomainError("unknown generator kind");
}

std::string GenSpec::canonical_string() const {
  static const char* kind_names[] = {"uniform", "outlier",   "normal",
                                     "adv-median", "adv-secondmax", "adv-spread"};
  std::ostringstream os;
  os << "kind=" << kind_names[static_cast<int>(kind)] << " m=" << m
     << " items=" << items_per_stream << " U=" << u << " seed=" << seed
     << " il=" << (interleave == Interleave::RoundRobin ? "rr" : "random");
  if (kind == Kind::Outlier) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " a=%.6g", outlier_a);
    os << buf;
  }
  if (noise_figure_is_stddev) os << " stddev";
  if (jitter) os << " jitter";
  if (kind == Kind::AdvMedian || kind == Kind::AdvSecondMax || kind == Kind::AdvSpread) {
    os << " t=" << adv_t << " p=" << adv_p << " inst=" << (instance_yes ? "yes" : "no");
    for (const auto& s : adv_sets) {
      os << " {";
      for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
      os << "}";
    }
  }
  return os.str();
}

std::uint64_t GenSpec::spec_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : canonical_string()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace braid
