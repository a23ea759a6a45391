#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "braid/core.hpp"

namespace braid {

// Seeded braid generators: three synthetic distributions (per-stream means
// drawn inter-stream, per-item Gaussian noise around the mean) and three
// adversarial set-disjointness constructions with verifiable YES/NO labels.
struct GenSpec {
  enum class Kind { Uniform, Outlier, NormalInter, AdvMedian, AdvSecondMax, AdvSpread };
  enum class Interleave { RoundRobin, UniformRandom };

  Kind kind = Kind::Uniform;
  std::uint32_t m = 1000;
  std::uint32_t items_per_stream = 5000;
  std::uint64_t u = std::uint64_t{1} << 16;
  std::uint64_t seed = 1;
  Interleave interleave = Interleave::RoundRobin;

  // Outlier: 10% of streams draw means from [aU, (a+0.2)U], the rest from
  // [1, 0.6U]. Requires a in (0, 0.8].
  double outlier_a = 0.8;

  // "variance U/20" read literally (stddev = sqrt(U/20)); set to true to
  // reinterpret the figure as the standard deviation itself.
  bool noise_figure_is_stddev = false;
  // Per-stream counts jittered uniformly within +-10% of items_per_stream.
  bool jitter = false;

  // Adversarial knobs: t players insert p copies per turn (AdvMedian);
  // instance_yes selects pairwise-disjoint sets vs. one common element.
  std::uint32_t adv_t = 4;
  std::uint32_t adv_p = 1;
  bool instance_yes = true;
  // Optional explicit player sets (1-based stream ids); validated against
  // the promise. Empty means: draw random sets from the seed.
  std::vector<std::vector<StreamId>> adv_sets;

  std::string canonical_string() const;
  std::uint64_t spec_hash() const;
};

struct GeneratedBraid {
  // Integer arrivals (all kinds except AdvSecondMax).
  std::vector<BraidItem> items;
  // Real-valued arrivals (AdvSecondMax only; oracle-only path).
  std::vector<std::pair<StreamId, double>> real_items;
  bool real_valued = false;

  std::uint32_t m = 0;
  std::uint64_t u = 0;
  // Values were shifted up by this much to fit [1, U] (adversarial kinds).
  std::uint64_t shift = 0;
  std::uint64_t spec_hash = 0;

  bool has_label = false;
  bool label_yes = false;
  StreamId intersection_stream = 0;  // meaningful when has_label && !label_yes
};

GeneratedBraid generate(const GenSpec& spec);

// Throws DomainError unless the sets are pairwise disjoint (yes) or all
// share exactly one common element and are otherwise disjoint (no).
void validate_promise(const std::vector<std::vector<StreamId>>& sets, bool yes,
                      StreamId* common_out = nullptr);

}  // namespace braid
