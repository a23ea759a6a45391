#include "braid/eval.hpp"

#include <algorithm>

namespace braid {

Algo parse_algo(const std::string& token) {
  if (token == "expb") return Algo::ExpBucket;
  if (token == "varb") return Algo::VarBucket;
  if (token == "extremes") return Algo::Extremes;
  if (token == "oracle") return Algo::Oracle;
  throw DomainError("unknown algorithm: " + token);
}

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::ExpBucket:
      return "expb";
    case Algo::VarBucket:
      return "varb";
    case Algo::Extremes:
      return "extremes";
    case Algo::Oracle:
      return "oracle";
  }
  return "?";
}

bool supports(Algo algo, WeightKind kind) {
  switch (algo) {
    case Algo::Oracle:
      return true;
    case Algo::Extremes:
      return kind == WeightKind::Max || kind == WeightKind::Min;
    case Algo::ExpBucket:
    case Algo::VarBucket:
      return kind == WeightKind::Average || kind == WeightKind::Median ||
             kind == WeightKind::Quantile;
  }
  return false;
}

CmConfig EngineConfig::cm_config() const {
  if (cm_width > 0 && cm_depth > 0) {
    return CmConfig{cm_width, cm_depth, sketch_seed};
  }
  return CmConfig::from_error(params.eps, params.delta, sketch_seed);
}

TopkEngine::TopkEngine(Algo algo, const EngineConfig& cfg, std::span<const BraidItem> items)
    : algo_(algo), cfg_(cfg), items_(items) {
  switch (algo_) {
    case Algo::ExpBucket: {
      eb_.emplace(cfg_.params.rho, cfg_.params.u, cfg_.cm_config());
      for (const auto& item : items_) eb_->ingest(item);
      break;
    }
    case Algo::VarBucket: {
      vb_.emplace(cfg_.params, cfg_.cm_config(), cfg_.cadence, cfg_.query_mode);
      for (const auto& item : items_) vb_->ingest(item);
      break;
    }
    case Algo::Extremes:
      break;  // trackers are built per query (k and direction differ)
    case Algo::Oracle:
      oracle_.emplace(MaterializedBraid::from_items(items_));
      break;
  }
}

std::vector<TopkEntry> TopkEngine::topk(const WeightFunction& weight, std::size_t k) const {
  if (!supports(algo_, weight.kind())) {
    std::string msg = algo_name(algo_) + " cannot answer " + weight.name();
    if (algo_ != Algo::Extremes &&
        (weight.kind() == WeightKind::Spread || weight.kind() == WeightKind::SecondMax)) {
      msg += " (top streams by spread or second-max need memory linear in the"
             " stream count; use the exact oracle)";
    }
    throw CapabilityError(msg);
  }
  switch (algo_) {
    case Algo::ExpBucket:
      return eb_->topk(weight, k);
    case Algo::VarBucket:
      return vb_->topk(weight, k);
    case Algo::Extremes: {
      ExtremeTracker tracker(k, weight.kind() == WeightKind::Max ? ExtremeMode::Max
                                                                 : ExtremeMode::Min);
      for (const auto& item : items_) tracker.ingest(item);
      return tracker.topk();
    }
    case Algo::Oracle:
      return oracle_->topk(weight, k);
  }
  throw DomainError("unknown algorithm");
}

std::size_t TopkEngine::counter_bytes() const {
  switch (algo_) {
    case Algo::ExpBucket:
      return eb_->counter_bytes();
    case Algo::VarBucket:
      return vb_->counter_bytes();
    case Algo::Extremes:
      return 0;
    case Algo::Oracle:
      return oracle_->memory_bytes();
  }
  return 0;
}

std::size_t TopkEngine::idset_bytes() const {
  switch (algo_) {
    case Algo::ExpBucket:
      return eb_->idset_bytes();
    case Algo::VarBucket:
      return vb_->idset_bytes();
    default:
      return 0;
  }
}

std::size_t TopkEngine::memory_bytes() const { return counter_bytes() + idset_bytes(); }

EvalReport evaluate_cell(const TopkEngine& engine, const MaterializedBraid& oracle,
                         const Ranking& oracle_ranking, const WeightFunction& weight,
                         std::size_t k, const std::string& dataset, std::uint64_t seed) {
  if (k < 1) throw DomainError("evaluation needs k >= 1");
  if (k > oracle.stream_count()) {
    throw DomainError("k exceeds the number of streams in the braid");
  }
  std::vector<TopkEntry> returned = engine.topk(weight, k);
  std::vector<StreamId> returned_ids;
  returned_ids.reserve(returned.size());
  for (const auto& e : returned) returned_ids.push_back(e.stream_id);
  std::vector<StreamId> true_ids;
  true_ids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) true_ids.push_back(oracle_ranking.ordered[i].stream_id);

  EvalReport r;
  r.algo = algo_name(engine.algo());
  r.dataset = dataset;
  r.lambda = weight.name();
  r.k = k;
  r.eps = engine.config().params.eps;
  r.delta = engine.config().params.delta;
  r.rho = engine.config().params.rho;
  r.precision = precision_at_k(true_ids, returned_ids, k);
  r.recall = precision_at_k(returned_ids, true_ids, k);  // same-size sets
  r.distortion = distortion(returned_ids, oracle_ranking);
  r.avg_value_error = avg_value_error(true_ids, returned_ids, weight, oracle);
  r.est_value_error = estimate_value_error(returned, weight, oracle);
  r.memory_bytes = engine.memory_bytes();
  r.seed = seed;
  return r;
}

}  // namespace braid
