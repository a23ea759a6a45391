#include "braid/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace braid {

MaterializedBraid MaterializedBraid::from_items(std::span<const BraidItem> items) {
  MaterializedBraid b;
  for (const auto& item : items) b.add(item.stream_id, static_cast<double>(item.value));
  b.finalize();
  return b;
}

MaterializedBraid MaterializedBraid::from_records(
    std::span<const std::pair<StreamId, double>> records) {
  MaterializedBraid b;
  for (const auto& [id, value] : records) b.add(id, value);
  b.finalize();
  return b;
}

void MaterializedBraid::add(StreamId id, double value) {
  if (finalized_) throw Error("cannot add to a finalized braid");
  streams_[id].push_back(value);
  ++total_;
}

void MaterializedBraid::finalize() {
  if (finalized_) return;
  sorted_ids_.reserve(streams_.size());
  for (auto& [id, values] : streams_) {
    std::sort(values.begin(), values.end());
    sorted_ids_.push_back(id);
  }
  std::sort(sorted_ids_.begin(), sorted_ids_.end());
  finalized_ = true;
}

std::span<const double> MaterializedBraid::values(StreamId id) const {
  auto it = streams_.find(id);
  if (it == streams_.end()) throw DomainError("unknown stream id");
  return it->second;
}

double MaterializedBraid::weight(StreamId id, const WeightFunction& w) const {
  std::span<const double> s = values(id);
  if (s.empty()) throw EmptyStreamError("weight of an empty stream");
  switch (w.kind()) {
    case WeightKind::Average:
      return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    case WeightKind::Median:
      return value_at_rank(s, static_cast<std::int64_t>(median_target_rank(s.size())));
    case WeightKind::Quantile:
      return value_at_rank(
          s, static_cast<std::int64_t>(quantile_target_rank(w.phi(), s.size())));
    case WeightKind::Max:
      return s.back();
    case WeightKind::Min:
      return s.front();
    case WeightKind::SecondMax:
      if (s.size() < 2) throw DomainError("second-max needs at least two items");
      return s[s.size() - 2];
    case WeightKind::Spread:
      return s.back() - s.front();
  }
  throw DomainError("unknown weight kind");
}

Ranking MaterializedBraid::ranking(const WeightFunction& w) const {
  Ranking r;
  if (sorted_ids_.empty()) return r;
  r.ordered = topk_by_estimate(
      std::span<const StreamId>(sorted_ids_), sorted_ids_.size(),
      [&](StreamId id) { return weight(id, w); }, w.kind() == WeightKind::Min);
  r.rank_of.reserve(r.ordered.size());
  for (std::size_t i = 0; i < r.ordered.size(); ++i) {
    r.rank_of[r.ordered[i].stream_id] = i + 1;
  }
  return r;
}

std::vector<TopkEntry> MaterializedBraid::topk(const WeightFunction& w,
                                               std::size_t k) const {
  if (k < 1) throw DomainError("top-k requires k >= 1");
  return topk_by_estimate(
      std::span<const StreamId>(sorted_ids_), k,
      [&](StreamId id) { return weight(id, w); }, w.kind() == WeightKind::Min);
}

}  // namespace braid
