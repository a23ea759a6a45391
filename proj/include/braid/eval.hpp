#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "braid/cm_sketch.hpp"
#include "braid/core.hpp"
#include "braid/exp_bucket.hpp"
#include "braid/extremes.hpp"
#include "braid/metrics.hpp"
#include "braid/oracle.hpp"
#include "braid/var_bucket.hpp"

namespace braid {

enum class Algo { ExpBucket, VarBucket, Extremes, Oracle };

Algo parse_algo(const std::string& token);  // expb|varb|extremes|oracle
std::string algo_name(Algo algo);
// Which (algorithm, weight) pairs answer at all; the forbidden ones raise
// CapabilityError instead of silently falling back.
bool supports(Algo algo, WeightKind kind);

struct EngineConfig {
  ApproxParams params;
  // Explicit sketch geometry; width/depth of 0 derive from eps/delta.
  std::uint32_t cm_width = 0;
  std::uint32_t cm_depth = 0;
  std::uint64_t sketch_seed = 1;
  QDigest::Cadence cadence = QDigest::Cadence::PerInsert;
  VbQueryMode query_mode = VbQueryMode::PerBucketSum;

  CmConfig cm_config() const;
};

// Builds the selected synopsis with one in-order pass over the items and
// answers top-k queries from it. The Extremes and Oracle paths replay the
// retained items per query; the braid itself is still consumed exactly once.
class TopkEngine {
 public:
  TopkEngine(Algo algo, const EngineConfig& cfg, std::span<const BraidItem> items);

  std::vector<TopkEntry> topk(const WeightFunction& weight, std::size_t k) const;

  Algo algo() const { return algo_; }
  const EngineConfig& config() const { return cfg_; }
  std::size_t memory_bytes() const;
  std::size_t counter_bytes() const;
  std::size_t idset_bytes() const;

  const VariableBucketSynopsis* var_bucket() const { return vb_ ? &*vb_ : nullptr; }
  const ExponentialBucketSynopsis* exp_bucket() const { return eb_ ? &*eb_ : nullptr; }

 private:
  Algo algo_;
  EngineConfig cfg_;
  std::span<const BraidItem> items_;
  std::optional<ExponentialBucketSynopsis> eb_;
  std::optional<VariableBucketSynopsis> vb_;
  std::optional<MaterializedBraid> oracle_;
};

// Scores one (algo, weight, k) cell against the oracle. `oracle_ranking`
// must be the ranking for `weight` on the same braid.
EvalReport evaluate_cell(const TopkEngine& engine, const MaterializedBraid& oracle,
                         const Ranking& oracle_ranking, const WeightFunction& weight,
                         std::size_t k, const std::string& dataset, std::uint64_t seed);

}  // namespace braid
