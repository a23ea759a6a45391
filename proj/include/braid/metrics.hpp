#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "braid/core.hpp"
#include "braid/oracle.hpp"

namespace braid {

// One evaluation cell: an (algorithm, dataset, weight, k) combination scored
// against the exact oracle.
struct EvalReport {
  std::string algo;
  std::string dataset;
  std::string lambda;
  std::size_t k = 0;
  double eps = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double distortion = 0.0;
  double avg_value_error = 0.0;
  std::size_t memory_bytes = 0;
  std::uint64_t seed = 0;
  // Secondary column: mean relative error of the synopsis' own estimates
  // against the exact weights of the streams it returned.
  double est_value_error = 0.0;

  static std::string csv_header();
  std::string csv_row() const;
};

// |true ∩ returned| / k; both sets must have exactly k members.
double precision_at_k(std::span<const StreamId> true_set,
                      std::span<const StreamId> returned_set, std::size_t k);

// Mean over returned streams of max(r/r', r'/r) where r is the oracle rank
// and r' the position in the returned list (1-based).
double distortion(std::span<const StreamId> returned_in_order, const Ranking& oracle_ranking);

// Mean over rank positions of |lambda(S_k) - lambda(S'_k)| / |lambda(S_k)|,
// both weights oracle-exact.
double avg_value_error(std::span<const StreamId> true_in_order,
                       std::span<const StreamId> returned_in_order,
                       const WeightFunction& weight, const MaterializedBraid& oracle);

// Mean relative error of the returned estimates against the oracle weights
// of the same streams.
double estimate_value_error(std::span<const TopkEntry> returned,
                            const WeightFunction& weight, const MaterializedBraid& oracle);

}  // namespace braid
