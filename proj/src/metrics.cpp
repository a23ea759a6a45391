#include "braid/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

namespace braid {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string EvalReport::csv_header() {
  return "algo,dataset,lambda,k,eps,delta,rho,precision,recall,distortion,"
         "avg_value_error,memory_bytes,seed,est_value_error";
}

std::string EvalReport::csv_row() const {
  std::string row;
  row += algo;
  row += ',' + dataset;
  row += ',' + lambda;
  row += ',' + std::to_string(k);
  row += ',' + fmt_double(eps);
  row += ',' + fmt_double(delta);
  row += ',' + fmt_double(rho);
  row += ',' + fmt_double(precision);
  row += ',' + fmt_double(recall);
  row += ',' + fmt_double(distortion);
  row += ',' + fmt_double(avg_value_error);
  row += ',' + std::to_string(memory_bytes);
  row += ',' + std::to_string(seed);
  row += ',' + fmt_double(est_value_error);
  return row;
}

double precision_at_k(std::span<const StreamId> true_set,
                      std::span<const StreamId> returned_set, std::size_t k) {
  if (true_set.size() != k || returned_set.size() != k) {
    throw DomainError("precision@k needs both sets of size k");
  }
  if (k == 0) throw DomainError("precision@k needs k >= 1");
  std::unordered_set<StreamId> truth(true_set.begin(), true_set.end());
  std::size_t hits = 0;
  for (StreamId id : returned_set) hits += truth.count(id);
  return static_cast<double>(hits) / static_cast<double>(k);
}

double distortion(std::span<const StreamId> returned_in_order,
                  const Ranking& oracle_ranking) {
  if (returned_in_order.empty()) throw DomainError("distortion of an empty answer");
  double sum = 0.0;
  for (std::size_t pos = 0; pos < returned_in_order.size(); ++pos) {
    auto it = oracle_ranking.rank_of.find(returned_in_order[pos]);
    if (it == oracle_ranking.rank_of.end()) {
      throw DomainError("returned stream has no oracle rank");
    }
    double r = static_cast<double>(it->second);
    double r_prime = static_cast<double>(pos + 1);
    sum += std::max(r / r_prime, r_prime / r);
  }
  return sum / static_cast<double>(returned_in_order.size());
}

double avg_value_error(std::span<const StreamId> true_in_order,
                       std::span<const StreamId> returned_in_order,
                       const WeightFunction& weight, const MaterializedBraid& oracle) {
  if (true_in_order.empty() || true_in_order.size() != returned_in_order.size()) {
    throw DomainError("value error needs equal-size non-empty rankings");
  }
  double sum = 0.0;
  for (std::size_t pos = 0; pos < true_in_order.size(); ++pos) {
    double truth = oracle.weight(true_in_order[pos], weight);
    double got = oracle.weight(returned_in_order[pos], weight);
    sum += relative_value_error(got, truth);
  }
  return sum / static_cast<double>(true_in_order.size());
}

double estimate_value_error(std::span<const TopkEntry> returned,
                            const WeightFunction& weight, const MaterializedBraid& oracle) {
  if (returned.empty()) throw DomainError("value error of an empty answer");
  double sum = 0.0;
  for (const TopkEntry& e : returned) {
    sum += relative_value_error(e.estimate, oracle.weight(e.stream_id, weight));
  }
  return sum / static_cast<double>(returned.size());
}

}  // namespace braid
