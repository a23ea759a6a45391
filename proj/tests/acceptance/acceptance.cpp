// Acceptance suite: every release-gating check, one PASS/FAIL line each.
// Run with no arguments for the full suite, or --only N for one criterion.
// The exit code is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "braid/braid_io.hpp"
#include "braid/datagen.hpp"
#include "braid/eval.hpp"
#include "braid/extremes.hpp"
#include "braid/metrics.hpp"
#include "braid/oracle.hpp"
#include "braid/qdigest.hpp"

using namespace braid;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared evaluation grid: three synthetic datasets at full scale (m = 1000,
// 5000 items per stream, U = 2^16), VariableBucket and ExponentialBucket with
// 64x64 sketches, scored against the exact oracle for average, median, and
// the 0.95-quantile at k in {10, 20, 50, 100}.
// ---------------------------------------------------------------------------

constexpr std::uint64_t kGridSeed = 424242;
constexpr double kGridRho = 0.005;
const std::size_t kGridKs[] = {10, 20, 50, 100};

EngineConfig grid_config(std::uint64_t u) {
  EngineConfig cfg;
  cfg.params.eps = std::exp(1.0) / 64.0;  // what a 64-wide row buys
  cfg.params.delta = std::exp(-64.0);
  cfg.params.rho = kGridRho;
  cfg.params.u = u;
  cfg.cm_width = 64;
  cfg.cm_depth = 64;
  cfg.sketch_seed = 7;
  cfg.cadence = QDigest::Cadence::Batched;
  return cfg;
}

struct GridCell {
  std::string dataset;
  std::string lambda;
  std::size_t k;
  EvalReport vb;
  EvalReport eb;
};

const std::vector<GridCell>& grid() {
  static const std::vector<GridCell> cells = [] {
    std::vector<GridCell> out;
    struct Ds {
      const char* name;
      GenSpec::Kind kind;
    };
    const Ds datasets[] = {{"uniform", GenSpec::Kind::Uniform},
                           {"outlier", GenSpec::Kind::Outlier},
                           {"normal", GenSpec::Kind::NormalInter}};
    for (const auto& ds : datasets) {
      GenSpec spec;
      spec.kind = ds.kind;
      spec.m = 1000;
      spec.items_per_stream = 5000;
      spec.u = std::uint64_t{1} << 16;
      spec.seed = kGridSeed;
      spec.outlier_a = 0.8;
      GeneratedBraid braid = generate(spec);
      EngineConfig cfg = grid_config(spec.u);
      TopkEngine vb(Algo::VarBucket, cfg, braid.items);
      TopkEngine eb(Algo::ExpBucket, cfg, braid.items);
      MaterializedBraid oracle = MaterializedBraid::from_items(braid.items);
      for (auto weight : {WeightFunction::average(), WeightFunction::median(),
                          WeightFunction::quantile(0.95)}) {
        Ranking ranking = oracle.ranking(weight);
        for (std::size_t k : kGridKs) {
          GridCell cell;
          cell.dataset = ds.name;
          cell.lambda = weight.name();
          cell.k = k;
          cell.vb = evaluate_cell(vb, oracle, ranking, weight, k, ds.name, spec.seed);
          cell.eb = evaluate_cell(eb, oracle, ranking, weight, k, ds.name, spec.seed);
          out.push_back(std::move(cell));
        }
      }
    }
    return out;
  }();
  return cells;
}

// ---------------------------------------------------------------------------
// criterion 1: q-digest quantile rank error stays within rho * n on 50
// seeded workloads (n = 10^4, U = 2^10, rho in {0.01, 0.05}), for phi in
// {0.05, 0.25, 0.5, 0.75, 0.95}. Exact bound, zero violations allowed.
// ---------------------------------------------------------------------------
Outcome criterion1() {
  const std::uint64_t u = 1 << 10;
  const int n = 10000;
  int checks = 0, violations = 0;
  double worst = 0.0;
  for (int seed = 1; seed <= 25; ++seed) {
    for (double rho : {0.01, 0.05}) {
      std::mt19937_64 rng(static_cast<std::uint64_t>(seed) * 7919);
      QDigest digest(rho, u);
      std::vector<double> values;
      values.reserve(n);
      for (int i = 0; i < n; ++i) {
        std::uint64_t v;
        if (seed % 2 == 0) {
          v = rng() % u + 1;
        } else {
          double u1 = 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;
          double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
          double x = 512.0 + 57.0 * std::sqrt(-2.0 * std::log(u1)) *
                                 std::cos(6.283185307179586 * u2);
          v = static_cast<std::uint64_t>(
              std::clamp<long long>(std::llround(x), 1, static_cast<long long>(u)));
        }
        digest.insert(v);
        values.push_back(static_cast<double>(v));
      }
      std::sort(values.begin(), values.end());
      for (double phi : {0.05, 0.25, 0.5, 0.75, 0.95}) {
        double answer = static_cast<double>(digest.quantile(phi));
        double exact = value_at_rank(
            values, static_cast<std::int64_t>(quantile_target_rank(phi, values.size())));
        double err = static_cast<double>(rank_error(answer, exact, values));
        ++checks;
        worst = std::max(worst, err / (rho * n));
        if (err > rho * n) ++violations;
      }
    }
  }
  return {violations == 0,
          fmt("%d quantile checks, %d above rho*n, worst err/bound %.2f", checks,
              violations, worst)};
}

// ---------------------------------------------------------------------------
// criterion 2: Count-Min point queries never fall below the true frequency,
// across inserts with mixed multiplicities and merges.
// ---------------------------------------------------------------------------
Outcome criterion2() {
  std::uint64_t queries = 0, underestimates = 0;
  for (int seed = 1; seed <= 30; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed) * 104729);
    CmConfig cfg{static_cast<std::uint32_t>(8 + rng() % 64),
                 static_cast<std::uint32_t>(1 + rng() % 8), rng()};
    CountMinSketch a(cfg), b(cfg);
    std::map<StreamId, std::uint64_t> exact;
    for (int i = 0; i < 4000; ++i) {
      auto id = static_cast<StreamId>(rng() % 500 + 1);
      std::uint64_t mult = 1 + rng() % 7;
      (rng() % 2 ? a : b).insert(id, mult);
      exact[id] += mult;
    }
    a.merge(b);
    for (const auto& [id, cnt] : exact) {
      ++queries;
      if (a.point_query(id) < cnt) ++underestimates;
    }
  }
  return {underestimates == 0,
          fmt("%llu point queries across 30 merged workloads, %llu underestimates",
              static_cast<unsigned long long>(queries),
              static_cast<unsigned long long>(underestimates))};
}

// ---------------------------------------------------------------------------
// criterion 3: VariableBucket median rank error within 2*eps*n + rho*n on
// braids with m = 50, 2000 items per stream, eps = rho = 0.01, in at least a
// 1 - delta fraction of 100 seeds (3-sigma binomial allowance).
// ---------------------------------------------------------------------------
Outcome criterion3() {
  const double eps = 0.01, rho = 0.01, delta = 0.05;
  const int seeds = 100;
  int failures = 0;
  double worst_ratio = 0.0;
  for (int seed = 1; seed <= seeds; ++seed) {
    GenSpec spec;
    spec.kind = GenSpec::Kind::Uniform;
    spec.m = 50;
    spec.items_per_stream = 2000;
    spec.u = std::uint64_t{1} << 16;
    spec.seed = static_cast<std::uint64_t>(seed);
    GeneratedBraid braid = generate(spec);

    ApproxParams params;
    params.eps = eps;
    params.delta = delta;
    params.rho = rho;
    params.u = spec.u;
    VariableBucketSynopsis vb(params, static_cast<std::uint64_t>(seed) * 31,
                              QDigest::Cadence::Batched);
    for (const auto& item : braid.items) vb.ingest(item);

    auto focus = static_cast<StreamId>((seed - 1) % spec.m + 1);
    std::vector<double> values;
    for (const auto& item : braid.items) {
      if (item.stream_id == focus) values.push_back(static_cast<double>(item.value));
    }
    std::sort(values.begin(), values.end());
    double exact = value_at_rank(
        values, static_cast<std::int64_t>(median_target_rank(values.size())));
    double answer = static_cast<double>(vb.median(focus));
    double err = static_cast<double>(rank_error(answer, exact, values));
    double budget = (2.0 * eps + rho) * static_cast<double>(braid.items.size());
    worst_ratio = std::max(worst_ratio, err / budget);
    if (err > budget) ++failures;
  }
  double allowance = delta * seeds + 3.0 * std::sqrt(seeds * delta * (1.0 - delta));
  return {static_cast<double>(failures) <= allowance,
          fmt("%d/%d seeds above 2*eps*n + rho*n (allowed %.1f), worst err/budget %.2f",
              failures, seeds, allowance, worst_ratio)};
}

// ---------------------------------------------------------------------------
// criterion 4: top-k precision on the synthetic grid; VariableBucket must
// reach 0.90 at k = 50 and 0.95 at k = 100 for every dataset and weight.
// ---------------------------------------------------------------------------
Outcome criterion4() {
  int cells = 0, bad = 0;
  double min50 = 1.0, min100 = 1.0;
  std::string worst;
  for (const auto& cell : grid()) {
    if (cell.k == 50) {
      ++cells;
      min50 = std::min(min50, cell.vb.precision);
      if (cell.vb.precision < 0.90) {
        ++bad;
        worst = cell.dataset + "/" + cell.lambda + "@50";
      }
    } else if (cell.k == 100) {
      ++cells;
      min100 = std::min(min100, cell.vb.precision);
      if (cell.vb.precision < 0.95) {
        ++bad;
        worst = cell.dataset + "/" + cell.lambda + "@100";
      }
    }
  }
  return {bad == 0, fmt("%d cells, %d below target, min P@50 %.3f, min P@100 %.3f%s%s",
                        cells, bad, min50, min100, bad ? ", first miss " : "",
                        bad ? worst.c_str() : "")};
}

// ---------------------------------------------------------------------------
// criterion 5: distortion on the same grid; at most 4 at k = 10 and at most
// 2 for k >= 50.
// ---------------------------------------------------------------------------
Outcome criterion5() {
  int bad = 0;
  double worst10 = 0.0, worst50 = 0.0;
  for (const auto& cell : grid()) {
    if (cell.k == 10) {
      worst10 = std::max(worst10, cell.vb.distortion);
      if (cell.vb.distortion > 4.0) ++bad;
    } else if (cell.k >= 50) {
      worst50 = std::max(worst50, cell.vb.distortion);
      if (cell.vb.distortion > 2.0) ++bad;
    }
  }
  return {bad == 0,
          fmt("%d cells out of bounds, worst d@10 %.2f (<=4), worst d@50+ %.2f (<=2)", bad,
              worst10, worst50)};
}

// ---------------------------------------------------------------------------
// criterion 6: average value error on the same grid stays within 0.02.
// ---------------------------------------------------------------------------
Outcome criterion6() {
  int bad = 0;
  double worst = 0.0;
  for (const auto& cell : grid()) {
    worst = std::max(worst, cell.vb.avg_value_error);
    if (cell.vb.avg_value_error > 0.02) ++bad;
  }
  return {bad == 0, fmt("%zu cells, %d above 0.02, worst %.4f", grid().size(), bad, worst)};
}

// ---------------------------------------------------------------------------
// criterion 7: as the outlier band separates from the bulk (a = 0.3 -> 0.8),
// median precision at k = 100 is monotone non-decreasing, allowing one
// inversion of at most 0.02.
// ---------------------------------------------------------------------------
Outcome criterion7() {
  std::vector<double> precisions;
  std::string series;
  for (double a : {0.3, 0.5, 0.65, 0.8}) {
    GenSpec spec;
    spec.kind = GenSpec::Kind::Outlier;
    spec.m = 1000;
    spec.items_per_stream = 5000;
    spec.u = std::uint64_t{1} << 16;
    spec.seed = kGridSeed;
    spec.outlier_a = a;
    GeneratedBraid braid = generate(spec);
    TopkEngine vb(Algo::VarBucket, grid_config(spec.u), braid.items);
    MaterializedBraid oracle = MaterializedBraid::from_items(braid.items);
    Ranking ranking = oracle.ranking(WeightFunction::median());
    EvalReport r = evaluate_cell(vb, oracle, ranking, WeightFunction::median(), 100,
                                 "outlier", spec.seed);
    precisions.push_back(r.precision);
    series += fmt("%s%.3f", series.empty() ? "" : " -> ", r.precision);
  }
  int inversions = 0;
  double worst_drop = 0.0;
  for (std::size_t i = 1; i < precisions.size(); ++i) {
    if (precisions[i] < precisions[i - 1] - 1e-12) {
      ++inversions;
      worst_drop = std::max(worst_drop, precisions[i - 1] - precisions[i]);
    }
  }
  bool pass = inversions == 0 || (inversions == 1 && worst_drop <= 0.02 + 1e-12);
  return {pass, fmt("P@100 by band start: %s (%d inversions, worst drop %.3f)",
                    series.c_str(), inversions, worst_drop)};
}

// ---------------------------------------------------------------------------
// criterion 8: VariableBucket counter memory varies by at most 10% as the
// stream count grows 1000 -> 10000 at fixed eps, delta, rho, U. The id set
// is the O(m) component and is itemized separately.
// ---------------------------------------------------------------------------
Outcome criterion8() {
  std::size_t lo = ~std::size_t{0}, hi = 0;
  std::size_t id_lo = 0, id_hi = 0;
  for (std::uint32_t m = 1000; m <= 10000; m += 1000) {
    GenSpec spec;
    spec.kind = GenSpec::Kind::Uniform;
    spec.m = m;
    spec.items_per_stream = 1000;
    spec.u = std::uint64_t{1} << 16;
    spec.seed = 5;
    GeneratedBraid braid = generate(spec);
    EngineConfig cfg = grid_config(spec.u);
    cfg.params.rho = 0.002;
    TopkEngine vb(Algo::VarBucket, cfg, braid.items);
    std::size_t counter = vb.counter_bytes();
    lo = std::min(lo, counter);
    hi = std::max(hi, counter);
    if (m == 1000) id_lo = vb.idset_bytes();
    if (m == 10000) id_hi = vb.idset_bytes();
  }
  double variation = static_cast<double>(hi - lo) / static_cast<double>(lo);
  bool ids_linear = id_hi > 9 * id_lo / 2;
  return {variation <= 0.10 && ids_linear,
          fmt("counter bytes %zu..%zu, variation %.3f (<=0.10); id set %zu -> %zu bytes",
              lo, hi, variation, id_lo, id_hi)};
}

// ---------------------------------------------------------------------------
// criterion 9: hard yes/no instances (m = 200, t = 9, p = 100, values in
// {1, 2}): the oracle separates all 20; VariableBucket at eps = rho = 0.001
// classifies all 20; at eps = rho = 0.2 accuracy must drop below 100%.
// ---------------------------------------------------------------------------
Outcome criterion9() {
  int oracle_ok = 0, tight_ok = 0, loose_ok = 0;
  const int instances = 20;
  for (int i = 0; i < instances; ++i) {
    GenSpec spec;
    spec.kind = GenSpec::Kind::AdvMedian;
    spec.m = 200;
    spec.adv_t = 9;
    spec.adv_p = 100;  // every stream ends with p(t+1) = 1000 items
    spec.u = 2;
    spec.seed = 1000 + i;
    spec.instance_yes = (i % 2 == 0);
    GeneratedBraid braid = generate(spec);

    MaterializedBraid oracle = MaterializedBraid::from_items(braid.items);
    double max_median = 0.0;
    for (StreamId id : oracle.ids()) {
      max_median = std::max(max_median, oracle.weight(id, WeightFunction::median()));
    }
    if ((max_median < 1.5) == spec.instance_yes) ++oracle_ok;

    auto classify_yes = [&](double err_rate) {
      EngineConfig cfg;
      cfg.params.eps = err_rate;
      cfg.params.delta = 0.01;
      cfg.params.rho = err_rate;
      cfg.params.u = 2;
      cfg.sketch_seed = 99 + static_cast<std::uint64_t>(i);
      cfg.cadence = QDigest::Cadence::Batched;
      TopkEngine vb(Algo::VarBucket, cfg, braid.items);
      return vb.topk(WeightFunction::median(), 1)[0].estimate < 1.5;
    };
    if (classify_yes(0.001) == spec.instance_yes) ++tight_ok;
    if (classify_yes(0.2) == spec.instance_yes) ++loose_ok;
  }
  bool pass = oracle_ok == instances && tight_ok == instances && loose_ok < instances;
  return {pass, fmt("oracle %d/20, eps=0.001 %d/20, eps=0.2 %d/20 (must degrade)",
                    oracle_ok, tight_ok, loose_ok)};
}

// ---------------------------------------------------------------------------
// criterion 10: the extremes tracker equals the oracle's top-k by max and by
// min, exactly, on fixtures and 100 random braids.
// ---------------------------------------------------------------------------
Outcome criterion10() {
  int braids = 0, mismatches = 0;
  {
    ExtremeTracker t(1, ExtremeMode::Max);
    t.ingest(1, 5);
    t.ingest(2, 9);
    t.ingest(3, 7);
    auto top = t.topk();
    if (top.size() != 1 || top[0].stream_id != 2 || top[0].estimate != 9) ++mismatches;
    ++braids;
  }
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t k = 1 + rng() % 15;
    auto mode = (trial % 2 == 0) ? ExtremeMode::Max : ExtremeMode::Min;
    ExtremeTracker tracker(k, mode);
    MaterializedBraid braid;
    int n = 100 + static_cast<int>(rng() % 900);
    for (int i = 0; i < n; ++i) {
      auto id = static_cast<StreamId>(rng() % 50 + 1);
      double v = static_cast<double>(rng() % 100000 + 1);
      tracker.ingest(id, v);
      braid.add(id, v);
    }
    braid.finalize();
    auto weight = mode == ExtremeMode::Max ? WeightFunction::max() : WeightFunction::min();
    auto expect = braid.topk(weight, std::min(k, braid.stream_count()));
    auto got = tracker.topk();
    ++braids;
    if (got.size() != expect.size()) {
      ++mismatches;
      continue;
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (got[i].stream_id != expect[i].stream_id || got[i].estimate != expect[i].estimate) {
        ++mismatches;
        break;
      }
    }
  }
  return {mismatches == 0, fmt("%d braids compared, %d mismatches", braids, mismatches)};
}

// ---------------------------------------------------------------------------
// criterion 11: VariableBucket precision is at least ExponentialBucket's in
// at least 80% of the median-precision grid cells.
// ---------------------------------------------------------------------------
Outcome criterion11() {
  int cells = 0, vb_wins = 0;
  for (const auto& cell : grid()) {
    if (cell.lambda != "median") continue;
    ++cells;
    if (cell.vb.precision >= cell.eb.precision) ++vb_wins;
  }
  double frac = static_cast<double>(vb_wins) / static_cast<double>(cells);
  return {frac >= 0.80, fmt("VariableBucket >= ExponentialBucket in %d/%d cells (%.0f%%)",
                            vb_wins, cells, 100.0 * frac)};
}

// ---------------------------------------------------------------------------
// criterion 12: every CLI command rerun with identical flags and seeds
// produces byte-identical output files.
// ---------------------------------------------------------------------------
Outcome criterion12() {
  namespace fs = std::filesystem;
  const std::string cli = BRAID_CLI_PATH;
  fs::path dir = fs::temp_directory_path() / ("braid_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto file = [&](const std::string& name) { return (dir / name).string(); };
  auto shell = [&](const std::string& args) {
    std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  };

  int checked = 0, unequal = 0, failed_cmds = 0;
  auto twice = [&](const std::string& args_template, const std::string& out_a,
                   const std::string& out_b) {
    std::string a = args_template;
    a.replace(a.find("{OUT}"), 5, out_a);
    std::string b = args_template;
    b.replace(b.find("{OUT}"), 5, out_b);
    if (shell(a) != 0 || shell(b) != 0) {
      ++failed_cmds;
      return;
    }
    ++checked;
    std::string ca = slurp(out_a);
    if (ca.empty() || ca != slurp(out_b)) ++unequal;
  };

  twice("gen --dist uniform --m 40 --items 200 --U 16384 --seed 9 --out {OUT}",
        file("g1.braid"), file("g2.braid"));
  twice("gen --dist adv-median --m 12 --t 3 --p 4 --U 2 --seed 4 --instance no --out {OUT}",
        file("a1.braid"), file("a2.braid"));
  twice("gen --dist outlier --a 0.65 --m 40 --items 100 --U 16384 --interleave random "
        "--seed 3 --out {OUT}",
        file("o1.braid"), file("o2.braid"));
  if (fs::exists(file("g1.braid"))) {
    std::string in = file("g1.braid");
    twice("run --algo varb --weight median --k 10 --rho 0.05 --in " + in + " --out {OUT}",
          file("r1.csv"), file("r2.csv"));
    twice("run --algo expb --weight q:0.9 --k 10 --rho 0.05 --in " + in + " --out {OUT}",
          file("r3.csv"), file("r4.csv"));
    twice("eval --algo varb --weight median --k-list 5,10,20 --rho 0.05 --in " + in +
              " --out {OUT}",
          file("e1.csv"), file("e2.csv"));
  }
  twice("memstat --algo varb --m-list 20,40 --items 50 --U 4096 --seed 2 --cm-width 16 "
        "--cm-depth 4 --rho 0.05 --out {OUT}",
        file("m1.csv"), file("m2.csv"));

  fs::remove_all(dir);
  return {failed_cmds == 0 && unequal == 0 && checked == 7,
          fmt("%d command pairs compared, %d unequal, %d failed to run", checked, unequal,
              failed_cmds)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--only" && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  const Criterion criteria[] = {
      {1, "q-digest quantile rank error within rho*n", criterion1},
      {2, "Count-Min point queries never underestimate", criterion2},
      {3, "VariableBucket median rank error within 2*eps*n + rho*n", criterion3},
      {4, "top-k precision on the synthetic grid", criterion4},
      {5, "rank distortion on the synthetic grid", criterion5},
      {6, "average value error on the synthetic grid", criterion6},
      {7, "precision trend across outlier separation", criterion7},
      {8, "VariableBucket counter memory constant across stream counts", criterion8},
      {9, "adversarial yes/no separation tracks sketch resolution", criterion9},
      {10, "extremes tracker equals the exact oracle", criterion10},
      {11, "VariableBucket precision dominates ExponentialBucket", criterion11},
      {12, "CLI reruns are byte-identical", criterion12},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s (%s)\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures;
}
