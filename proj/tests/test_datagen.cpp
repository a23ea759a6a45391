#include "braid/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "braid/oracle.hpp"

using namespace braid;

namespace {

GenSpec base_spec(GenSpec::Kind kind) {
  GenSpec s;
  s.kind = kind;
  s.m = 40;
  s.items_per_stream = 50;
  s.u = 1 << 10;
  s.seed = 7;
  return s;
}

std::map<StreamId, std::uint64_t> stream_sizes(const GeneratedBraid& b) {
  std::map<StreamId, std::uint64_t> sizes;
  for (const auto& item : b.items) ++sizes[item.stream_id];
  return sizes;
}

}  // namespace

TEST_CASE("uniform braid shape and determinism") {
  GenSpec s = base_spec(GenSpec::Kind::Uniform);
  auto b = generate(s);
  CHECK(b.items.size() == 40u * 50u);
  for (const auto& item : b.items) {
    CHECK(item.stream_id >= 1);
    CHECK(item.stream_id <= 40);
    CHECK(item.value >= 1);
    CHECK(item.value <= s.u);
  }
  auto again = generate(s);
  REQUIRE(b.items.size() == again.items.size());
  for (std::size_t i = 0; i < b.items.size(); ++i) {
    CHECK(b.items[i].stream_id == again.items[i].stream_id);
    CHECK(b.items[i].value == again.items[i].value);
  }
  s.seed = 8;
  auto other = generate(s);
  bool differs = false;
  for (std::size_t i = 0; i < b.items.size() && !differs; ++i) {
    differs = b.items[i].value != other.items[i].value;
  }
  CHECK(differs);
}

TEST_CASE("single item braid") {
  GenSpec s = base_spec(GenSpec::Kind::Uniform);
  s.m = 1;
  s.items_per_stream = 1;
  auto b = generate(s);
  REQUIRE(b.items.size() == 1);
  CHECK(b.items[0].value >= 1);
  CHECK(b.items[0].value <= s.u);
}

TEST_CASE("round-robin prefixes stay balanced within one") {
  GenSpec s = base_spec(GenSpec::Kind::Uniform);
  auto b = generate(s);
  std::map<StreamId, std::uint64_t> seen;
  for (const auto& item : b.items) {
    ++seen[item.stream_id];
    std::uint64_t lo = ~std::uint64_t{0}, hi = 0;
    if (seen.size() == s.m) {  // once every stream has appeared
      for (const auto& [id, cnt] : seen) {
        lo = std::min(lo, cnt);
        hi = std::max(hi, cnt);
      }
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("uniform-random interleave keeps the multiset") {
  GenSpec s = base_spec(GenSpec::Kind::Uniform);
  auto rr = generate(s);
  s.interleave = GenSpec::Interleave::UniformRandom;
  auto shuffled = generate(s);
  auto o1 = MaterializedBraid::from_items(rr.items);
  auto o2 = MaterializedBraid::from_items(shuffled.items);
  REQUIRE(o1.ids() == o2.ids());
  for (StreamId id : o1.ids()) {
    auto v1 = o1.values(id);
    auto v2 = o2.values(id);
    REQUIRE(v1.size() == v2.size());
    for (std::size_t i = 0; i < v1.size(); ++i) CHECK(v1[i] == v2[i]);
  }
}

TEST_CASE("outlier split puts exactly ten percent of streams in the band") {
  GenSpec s = base_spec(GenSpec::Kind::Outlier);
  s.m = 1000;
  s.items_per_stream = 3;
  s.u = 1 << 16;
  s.outlier_a = 0.8;
  auto b = generate(s);
  auto oracle = MaterializedBraid::from_items(b.items);
  // Stream means live either below 0.6U or inside [0.8U, U]; intra-stream
  // noise (stddev ~57) cannot bridge the gap between the bands.
  std::size_t high = 0;
  double threshold = 0.7 * static_cast<double>(s.u);
  for (StreamId id : oracle.ids()) {
    if (oracle.weight(id, WeightFunction::median()) > threshold) ++high;
  }
  CHECK(high == 100);

  s.outlier_a = 0.9;
  CHECK_THROWS_AS(generate(s), DomainError);
}

TEST_CASE("overlapping outlier band interleaves with the bulk") {
  GenSpec s = base_spec(GenSpec::Kind::Outlier);
  s.m = 200;
  s.items_per_stream = 20;
  s.u = 1 << 16;
  s.outlier_a = 0.3;  // band [0.3U, 0.5U] sits inside the bulk range [0, 0.6U]
  auto b = generate(s);
  auto oracle = MaterializedBraid::from_items(b.items);
  auto ranking = oracle.ranking(WeightFunction::median());
  // The top 20 now mix outlier and non-outlier streams.
  std::size_t outliers_in_top = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    if (ranking.ordered[i].stream_id > s.m - s.m / 10) ++outliers_in_top;
  }
  CHECK(outliers_in_top < 20);
}

TEST_CASE("normal inter-stream means center at U/2") {
  GenSpec s = base_spec(GenSpec::Kind::NormalInter);
  s.m = 1000;
  s.items_per_stream = 2;
  s.u = 1 << 16;
  auto b = generate(s);
  double sum = 0;
  for (const auto& item : b.items) sum += static_cast<double>(item.value);
  double mean = sum / static_cast<double>(b.items.size());
  double center = static_cast<double>(s.u) / 2.0;
  double stderr_of_mean = (static_cast<double>(s.u) / 4.0) / std::sqrt(1000.0);
  CHECK(std::abs(mean - center) <= 4.0 * stderr_of_mean);
  for (const auto& item : b.items) {
    CHECK(item.value >= 1);
    CHECK(item.value <= s.u);
  }
}

TEST_CASE("jitter varies per-stream counts within ten percent") {
  GenSpec s = base_spec(GenSpec::Kind::Uniform);
  s.jitter = true;
  auto sizes = stream_sizes(generate(s));
  bool variation = false;
  for (const auto& [id, cnt] : sizes) {
    CHECK(cnt >= 45);
    CHECK(cnt <= 55);
    if (cnt != 50) variation = true;
  }
  CHECK(variation);
}

TEST_CASE("adversarial median reproduces the six-stream four-player table") {
  GenSpec s;
  s.kind = GenSpec::Kind::AdvMedian;
  s.m = 6;
  s.adv_t = 4;
  s.adv_p = 1;
  s.u = 2;
  s.seed = 1;
  s.instance_yes = false;
  s.adv_sets = {{2}, {2, 4}, {1, 2, 5}, {2, 6}};
  auto b = generate(s);
  CHECK(b.shift == 1);
  CHECK(b.has_label);
  CHECK_FALSE(b.label_yes);
  CHECK(b.intersection_stream == 2);
  REQUIRE(b.items.size() == 6u * 5u);  // p(t+1) per stream

  // Rows: init phase then one phase per player, each in stream order.
  // Player rows carry value 2 exactly on the player's set.
  auto row_value = [&](std::size_t phase, StreamId stream) {
    return b.items[phase * 6 + (stream - 1)].value;
  };
  for (StreamId i = 1; i <= 6; ++i) CHECK(row_value(0, i) == 1);
  const std::vector<std::vector<std::uint64_t>> expected = {
      {1, 2, 1, 1, 1, 1}, {1, 2, 1, 2, 1, 1}, {2, 2, 1, 1, 2, 1}, {1, 2, 1, 1, 1, 2}};
  for (std::size_t player = 0; player < 4; ++player) {
    for (StreamId i = 1; i <= 6; ++i) {
      CHECK(row_value(player + 1, i) == expected[player][i - 1]);
    }
  }
  // Stream 2 receives a value-2 item from all four players.
  std::uint64_t twos_for_stream2 = 0;
  for (const auto& it : b.items) {
    if (it.stream_id == 2 && it.value == 2) ++twos_for_stream2;
  }
  CHECK(twos_for_stream2 == 4);
}

TEST_CASE("adversarial median labels verified by the oracle") {
  for (bool yes : {true, false}) {
    GenSpec s;
    s.kind = GenSpec::Kind::AdvMedian;
    s.m = 30;
    s.adv_t = 5;
    s.adv_p = 7;
    s.u = 2;
    s.seed = yes ? 11 : 12;
    s.instance_yes = yes;
    auto b = generate(s);
    auto sizes = stream_sizes(b);
    for (const auto& [id, cnt] : sizes) CHECK(cnt == 7u * 6u);  // p + p*t each
    auto oracle = MaterializedBraid::from_items(b.items);
    double max_median = 0;
    for (StreamId id : oracle.ids()) {
      max_median = std::max(max_median, oracle.weight(id, WeightFunction::median()));
    }
    if (yes) {
      CHECK(max_median == 1);  // shifted 0
    } else {
      CHECK(max_median == 2);  // shifted 1
      CHECK(oracle.weight(b.intersection_stream, WeightFunction::median()) == 2);
    }
  }
}

TEST_CASE("adversarial second-max labels verified by the oracle") {
  for (bool yes : {true, false}) {
    GenSpec s;
    s.kind = GenSpec::Kind::AdvSecondMax;
    s.m = 25;
    s.adv_t = 4;
    s.seed = yes ? 21 : 22;
    s.instance_yes = yes;
    auto b = generate(s);
    CHECK(b.real_valued);
    std::map<StreamId, std::size_t> sizes;
    for (const auto& [id, v] : b.real_items) {
      (void)v;
      ++sizes[id];
    }
    for (const auto& [id, cnt] : sizes) CHECK(cnt == 8);  // 2t values each
    auto oracle = MaterializedBraid::from_records(b.real_items);
    double best = -1;
    for (StreamId id : oracle.ids()) {
      best = std::max(best, oracle.weight(id, WeightFunction::second_max()));
    }
    if (yes) {
      CHECK(best < 1.0);
    } else {
      CHECK(best == doctest::Approx(4.0));  // t
    }
  }
}

TEST_CASE("adversarial spread labels verified by the oracle") {
  for (bool yes : {true, false}) {
    GenSpec s;
    s.kind = GenSpec::Kind::AdvSpread;
    s.m = 40;
    s.u = 4;
    s.seed = yes ? 31 : 32;
    s.instance_yes = yes;
    auto b = generate(s);
    CHECK(b.shift == 2);
    // Every stream is initialized with one shifted-zero item (value 2).
    std::map<StreamId, std::uint64_t> twos;
    for (const auto& item : b.items) {
      if (item.value == 2) ++twos[item.stream_id];
    }
    CHECK(twos.size() == 40);
    auto oracle = MaterializedBraid::from_items(b.items);
    double max_spread = 0;
    for (StreamId id : oracle.ids()) {
      max_spread = std::max(max_spread, oracle.weight(id, WeightFunction::spread()));
    }
    CHECK(max_spread == (yes ? 1.0 : 2.0));
  }
}

TEST_CASE("promise validation rejects malformed sets") {
  CHECK_NOTHROW(validate_promise({{1, 2}, {3, 4}}, true));
  CHECK_THROWS_AS(validate_promise({{1, 2}, {2, 3}}, true), DomainError);  // partial overlap
  StreamId common = 0;
  CHECK_NOTHROW(validate_promise({{1, 2}, {2, 3}, {2}}, false, &common));
  CHECK(common == 2);
  CHECK_THROWS_AS(validate_promise({{1}, {2}}, false), DomainError);       // no shared element
  CHECK_THROWS_AS(validate_promise({{1, 2}, {1, 2}}, false), DomainError);  // two shared
  GenSpec s;
  s.kind = GenSpec::Kind::AdvMedian;
  s.m = 4;
  s.adv_sets = {{1, 9}};
  CHECK_THROWS_AS(generate(s), DomainError);  // id outside [1, m]
}

TEST_CASE("spec hash changes with any knob") {
  GenSpec a = base_spec(GenSpec::Kind::Uniform);
  GenSpec b = a;
  CHECK(a.spec_hash() == b.spec_hash());
  b.seed = 99;
  CHECK(a.spec_hash() != b.spec_hash());
  b = a;
  b.kind = GenSpec::Kind::Outlier;
  CHECK(a.spec_hash() != b.spec_hash());
}
