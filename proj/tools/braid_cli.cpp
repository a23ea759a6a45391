// Command-line surface: generate braids, run one algorithm over a braid,
// evaluate against the exact oracle, and measure synopsis memory.
//
// Exit codes: 0 success, 2 usage error, 3 capability error (an (algorithm,
// weight) pair that cannot be answered), 4 data/format error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "braid/braid_io.hpp"
#include "braid/core.hpp"
#include "braid/datagen.hpp"
#include "braid/eval.hpp"
#include "braid/metrics.hpp"
#include "braid/oracle.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitCapability = 3;
constexpr int kExitData = 4;

// Raised while interpreting command-line values, before any data is touched.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
auto usage_checked(F&& f) {
  try {
    return f();
  } catch (const braid::DomainError& e) {
    throw UsageError(e.what());
  }
}

struct GenArgs {
  std::string dist = "uniform";
  std::uint32_t m = 1000;
  std::uint32_t items = 5000;
  std::uint64_t u = std::uint64_t{1} << 16;
  std::uint64_t seed = 1;
  std::string interleave = "rr";
  double a = 0.8;
  std::uint32_t t = 4;
  std::uint32_t p = 1;
  std::string instance = "yes";
  bool jitter = false;
  bool stddev = false;
  std::string out;
};

braid::GenSpec to_spec(const GenArgs& g) {
  braid::GenSpec spec;
  if (g.interleave != "rr" && g.interleave != "random") {
    throw braid::DomainError("interleave must be rr or random");
  }
  if (g.instance != "yes" && g.instance != "no") {
    throw braid::DomainError("instance must be yes or no");
  }
  if (g.dist == "outlier" && !(g.a > 0.0 && g.a <= 0.8)) {
    throw braid::DomainError("outlier parameter a must be in (0, 0.8]");
  }
  if (g.dist == "uniform") {
    spec.kind = braid::GenSpec::Kind::Uniform;
  } else if (g.dist == "outlier") {
    spec.kind = braid::GenSpec::Kind::Outlier;
  } else if (g.dist == "normal") {
    spec.kind = braid::GenSpec::Kind::NormalInter;
  } else if (g.dist == "adv-median") {
    spec.kind = braid::GenSpec::Kind::AdvMedian;
  } else if (g.dist == "adv-secondmax") {
    spec.kind = braid::GenSpec::Kind::AdvSecondMax;
  } else if (g.dist == "adv-spread") {
    spec.kind = braid::GenSpec::Kind::AdvSpread;
  } else {
    throw braid::DomainError("unknown distribution: " + g.dist);
  }
  spec.m = g.m;
  spec.items_per_stream = g.items;
  spec.u = g.u;
  spec.seed = g.seed;
  spec.interleave = g.interleave == "random" ? braid::GenSpec::Interleave::UniformRandom
                                             : braid::GenSpec::Interleave::RoundRobin;
  spec.outlier_a = g.a;
  spec.adv_t = g.t;
  spec.adv_p = g.p;
  spec.instance_yes = g.instance == "yes";
  spec.jitter = g.jitter;
  spec.noise_figure_is_stddev = g.stddev;
  return spec;
}

struct SketchArgs {
  double eps = 0.01;
  double delta = 0.01;
  double rho = 0.01;
  std::uint32_t cm_width = 0;
  std::uint32_t cm_depth = 0;
  std::uint64_t sketch_seed = 1;
  bool batch_compress = false;
  bool union_queries = false;
};

void add_sketch_options(CLI::App* cmd, SketchArgs& s) {
  cmd->add_option("--eps", s.eps, "Count-Min additive error rate");
  cmd->add_option("--delta", s.delta, "Count-Min failure probability");
  cmd->add_option("--rho", s.rho, "bucket compression rate");
  cmd->add_option("--cm-width", s.cm_width, "explicit sketch width (0: derive from eps)");
  cmd->add_option("--cm-depth", s.cm_depth, "explicit sketch depth (0: derive from delta)");
  cmd->add_option("--sketch-seed", s.sketch_seed, "seed for the sketch hash rows");
  cmd->add_flag("--batch-compress", s.batch_compress,
                "compress every ceil(1/(2 rho)) inserts instead of per insert");
  cmd->add_flag("--union-queries", s.union_queries,
                "use the accumulator-union query path for VariableBucket");
}

braid::EngineConfig to_engine_config(const SketchArgs& s, std::uint64_t u) {
  braid::EngineConfig cfg;
  cfg.params.eps = s.eps;
  cfg.params.delta = s.delta;
  cfg.params.rho = s.rho;
  cfg.params.u = u;
  cfg.cm_width = s.cm_width;
  cfg.cm_depth = s.cm_depth;
  cfg.sketch_seed = s.sketch_seed;
  cfg.cadence = s.batch_compress ? braid::QDigest::Cadence::Batched
                                 : braid::QDigest::Cadence::PerInsert;
  cfg.query_mode = s.union_queries ? braid::VbQueryMode::UnionAccumulator
                                   : braid::VbQueryMode::PerBucketSum;
  return cfg;
}

std::FILE* open_output(const std::string& path) {
  if (path.empty() || path == "-") return stdout;
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw braid::FormatError("cannot open output file: " + path);
  return f;
}

void close_output(std::FILE* f) {
  if (f != stdout) std::fclose(f);
}

int cmd_gen(const GenArgs& args) {
  braid::GenSpec spec = usage_checked([&] { return to_spec(args); });
  braid::GeneratedBraid b = braid::generate(spec);
  braid::write_braid(args.out, b);
  return 0;
}

int cmd_run(const std::string& in, const std::string& weight_token, std::size_t k,
            const std::string& algo_token, const SketchArgs& sketch,
            const std::string& out_path) {
  auto weight = usage_checked([&] { return braid::WeightFunction::parse(weight_token); });
  auto algo = usage_checked([&] { return braid::parse_algo(algo_token); });
  if (k < 1) throw UsageError("--k must be >= 1");
  braid::LoadedBraid loaded = braid::read_braid(in);

  std::vector<braid::TopkEntry> answer;
  if (loaded.header.real_valued) {
    if (algo != braid::Algo::Oracle) {
      throw braid::CapabilityError("real-valued braids are oracle-only");
    }
    auto oracle = braid::MaterializedBraid::from_records(loaded.real_items);
    answer = oracle.topk(weight, k);
  } else {
    braid::EngineConfig cfg = to_engine_config(sketch, loaded.header.u);
    braid::TopkEngine engine(algo, cfg, loaded.items);
    answer = engine.topk(weight, k);
  }

  std::FILE* f = open_output(out_path);
  std::fprintf(f, "rank,stream_id,estimate\n");
  for (std::size_t i = 0; i < answer.size(); ++i) {
    std::fprintf(f, "%zu,%u,%.10g\n", i + 1, answer[i].stream_id, answer[i].estimate);
  }
  close_output(f);
  return 0;
}

int cmd_eval(const std::string& in, const std::string& weight_token,
             const std::vector<std::size_t>& k_list, const std::string& algo_token,
             const SketchArgs& sketch, const std::string& out_path) {
  auto weight = usage_checked([&] { return braid::WeightFunction::parse(weight_token); });
  auto algo = usage_checked([&] { return braid::parse_algo(algo_token); });
  if (k_list.empty()) throw UsageError("--k-list must name at least one k");
  for (std::size_t k : k_list) {
    if (k < 1) throw UsageError("every k must be >= 1");
  }
  braid::LoadedBraid loaded = braid::read_braid(in);
  if (loaded.header.real_valued) {
    throw braid::CapabilityError("eval runs on integer braids only");
  }

  braid::EngineConfig cfg = to_engine_config(sketch, loaded.header.u);
  braid::TopkEngine engine(algo, cfg, loaded.items);
  auto oracle = braid::MaterializedBraid::from_items(loaded.items);
  braid::Ranking ranking = oracle.ranking(weight);

  std::FILE* f = open_output(out_path);
  std::fprintf(f, "%s\n", braid::EvalReport::csv_header().c_str());
  for (std::size_t k : k_list) {
    braid::EvalReport r = braid::evaluate_cell(engine, oracle, ranking, weight, k, in,
                                               sketch.sketch_seed);
    std::fprintf(f, "%s\n", r.csv_row().c_str());
  }
  close_output(f);
  return 0;
}

int cmd_memstat(const GenArgs& gen_args, const std::vector<std::uint32_t>& m_list,
                const std::string& algo_token, const SketchArgs& sketch,
                const std::string& out_path) {
  auto algo = usage_checked([&] { return braid::parse_algo(algo_token); });
  if (algo != braid::Algo::ExpBucket && algo != braid::Algo::VarBucket) {
    throw braid::CapabilityError("memstat covers the sketch synopses (expb, varb)");
  }
  if (m_list.empty()) throw UsageError("--m-list must name at least one m");
  usage_checked([&] {
    to_spec(gen_args);
    return 0;
  });
  std::FILE* f = open_output(out_path);
  std::fprintf(f, "algo,dist,m,items,eps,delta,rho,U,seed,counter_bytes,idset_bytes\n");
  for (std::uint32_t m : m_list) {
    GenArgs per_m = gen_args;
    per_m.m = m;
    braid::GeneratedBraid b = braid::generate(to_spec(per_m));
    braid::EngineConfig cfg = to_engine_config(sketch, b.u);
    braid::TopkEngine engine(algo, cfg, b.items);
    std::fprintf(f, "%s,%s,%u,%u,%g,%g,%g,%llu,%llu,%zu,%zu\n", algo_token.c_str(),
                 gen_args.dist.c_str(), m, gen_args.items, sketch.eps, sketch.delta,
                 sketch.rho, static_cast<unsigned long long>(gen_args.u),
                 static_cast<unsigned long long>(gen_args.seed), engine.counter_bytes(),
                 engine.idset_bytes());
  }
  close_output(f);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"small-memory top-k outlier synopses over interleaved streams"};
  app.require_subcommand(1);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "generate a braid file");
  gen->add_option("--dist", gen_args.dist,
                  "uniform|outlier|normal|adv-median|adv-secondmax|adv-spread");
  gen->add_option("--m", gen_args.m, "number of streams");
  gen->add_option("--items", gen_args.items, "items per stream (synthetic kinds)");
  gen->add_option("--U", gen_args.u, "value range top (power of two)");
  gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("--interleave", gen_args.interleave, "rr|random");
  gen->add_option("--a", gen_args.a, "outlier band start, fraction of U");
  gen->add_option("--t", gen_args.t, "adversarial player count");
  gen->add_option("--p", gen_args.p, "adversarial copies per turn");
  gen->add_option("--instance", gen_args.instance, "yes|no");
  gen->add_flag("--jitter", gen_args.jitter, "jitter per-stream item counts by +-10%");
  gen->add_flag("--stddev", gen_args.stddev,
                "treat the intra-stream noise figure U/20 as a standard deviation");
  gen->add_option("--out", gen_args.out, "output braid file")->required();

  std::string run_in, run_weight = "median", run_algo = "varb", run_out;
  std::size_t run_k = 10;
  SketchArgs run_sketch;
  auto* run = app.add_subcommand("run", "answer one top-k query over a braid");
  run->add_option("--in", run_in, "input braid file")->required();
  run->add_option("--weight", run_weight, "avg|median|q:<phi>|max|min|secondmax|spread");
  run->add_option("--k", run_k, "how many streams to return");
  run->add_option("--algo", run_algo, "expb|varb|extremes|oracle");
  run->add_option("--out", run_out, "output CSV (default stdout)");
  add_sketch_options(run, run_sketch);

  std::string eval_in, eval_weight = "median", eval_algo = "varb", eval_out;
  std::vector<std::size_t> eval_k_list{10, 20, 50, 100};
  SketchArgs eval_sketch;
  auto* eval = app.add_subcommand("eval", "score an algorithm against the exact oracle");
  eval->add_option("--in", eval_in, "input braid file")->required();
  eval->add_option("--weight", eval_weight, "avg|median|q:<phi>|max|min");
  eval->add_option("--k-list", eval_k_list, "k values, space or comma separated")
      ->delimiter(',');
  eval->add_option("--algo", eval_algo, "expb|varb|extremes|oracle");
  eval->add_option("--out", eval_out, "output CSV (default stdout)");
  add_sketch_options(eval, eval_sketch);

  GenArgs mem_gen;
  mem_gen.items = 1000;
  std::vector<std::uint32_t> mem_m_list{1000, 2000, 5000, 10000};
  std::string mem_algo = "varb", mem_out;
  SketchArgs mem_sketch;
  auto* mem = app.add_subcommand("memstat", "synopsis memory across stream counts");
  mem->add_option("--algo", mem_algo, "expb|varb");
  mem->add_option("--m-list", mem_m_list, "stream counts, comma separated")->delimiter(',');
  mem->add_option("--dist", mem_gen.dist, "distribution for the generated braids");
  mem->add_option("--items", mem_gen.items, "items per stream");
  mem->add_option("--U", mem_gen.u, "value range top");
  mem->add_option("--seed", mem_gen.seed, "generator seed");
  mem->add_option("--out", mem_out, "output CSV (default stdout)");
  add_sketch_options(mem, mem_sketch);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_args);
    if (run->parsed()) return cmd_run(run_in, run_weight, run_k, run_algo, run_sketch, run_out);
    if (eval->parsed()) {
      return cmd_eval(eval_in, eval_weight, eval_k_list, eval_algo, eval_sketch, eval_out);
    }
    if (mem->parsed()) {
      return cmd_memstat(mem_gen, mem_m_list, mem_algo, mem_sketch, mem_out);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const braid::CapabilityError& e) {
    std::cerr << "capability error: " << e.what() << "\n";
    return kExitCapability;
  } catch (const braid::FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const braid::DomainError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const braid::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
