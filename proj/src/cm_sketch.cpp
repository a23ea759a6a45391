#include "braid/cm_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "braid/wire.hpp"

namespace braid {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) {
    throw CounterOverflowError("64-bit counter overflow");
  }
  return a + b;
}

}  // namespace

CmConfig CmConfig::from_error(double eps, double delta, std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0,1)");
  CmConfig cfg;
  cfg.width = static_cast<std::uint32_t>(std::ceil(std::exp(1.0) / eps));
  cfg.depth = static_cast<std::uint32_t>(std::ceil(std::log(1.0 / delta)));
  cfg.depth = std::max<std::uint32_t>(cfg.depth, 1);
  cfg.seed = seed;
  return cfg;
}

CountMinSketch::CountMinSketch(const CmConfig& cfg) : cfg_(cfg) {
  if (cfg_.width < 1 || cfg_.depth < 1) {
    throw DomainError("Count-Min width and depth must be >= 1");
  }
  row_keys_.resize(cfg_.depth);
  std::uint64_t state = cfg_.seed;
  for (auto& rk : row_keys_) rk = splitmix64(state);
}

std::uint32_t CountMinSketch::cell(std::uint32_t row, StreamId id) const {
  std::uint64_t h = mix64(row_keys_[row] ^ (static_cast<std::uint64_t>(id) *
                                            0x9e3779b97f4a7c15ULL));
  return static_cast<std::uint32_t>(h % cfg_.width);
}

void CountMinSketch::materialize() {
  dense_.assign(static_cast<std::size_t>(cfg_.width) * cfg_.depth, 0);
  for (const auto& [id, cnt] : sparse_) {
    for (std::uint32_t r = 0; r < cfg_.depth; ++r) {
      std::uint64_t& c = dense_[static_cast<std::size_t>(r) * cfg_.width + cell(r, id)];
      c = checked_add(c, cnt);
    }
  }
  sparse_.clear();
  sparse_.shrink_to_fit();
}

void CountMinSketch::add_to_dense(StreamId id, std::uint64_t multiplicity) {
  for (std::uint32_t r = 0; r < cfg_.depth; ++r) {
    std::uint64_t& c = dense_[static_cast<std::size_t>(r) * cfg_.width + cell(r, id)];
    c = checked_add(c, multiplicity);
  }
}

void CountMinSketch::insert(StreamId id, std::uint64_t multiplicity) {
  if (multiplicity < 1) throw DomainError("insert multiplicity must be >= 1");
  total_ = checked_add(total_, multiplicity);
  if (is_dense()) {
    add_to_dense(id, multiplicity);
    return;
  }
  auto it = std::lower_bound(sparse_.begin(), sparse_.end(), id,
                             [](const auto& e, StreamId v) { return e.first < v; });
  if (it != sparse_.end() && it->first == id) {
    it->second = checked_add(it->second, multiplicity);
  } else {
    sparse_.insert(it, {id, multiplicity});
    if (sparse_.size() > cfg_.width) materialize();
  }
}

std::uint64_t CountMinSketch::point_query(StreamId id) const {
  if (total_ == 0) return 0;
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  if (is_dense()) {
    for (std::uint32_t r = 0; r < cfg_.depth; ++r) {
      best = std::min(best, dense_[static_cast<std::size_t>(r) * cfg_.width + cell(r, id)]);
    }
    return best;
  }
  // Sparse rows are simulated exactly: sum the counts of keys sharing the
  // query key's cell, per row, then take the row minimum.
  for (std::uint32_t r = 0; r < cfg_.depth; ++r) {
    std::uint32_t target = cell(r, id);
    std::uint64_t sum = 0;
    for (const auto& [key, cnt] : sparse_) {
      if (cell(r, key) == target) sum += cnt;
    }
    best = std::min(best, sum);
    if (best == 0) return 0;
  }
  return best;
}

void CountMinSketch::merge(const CountMinSketch& other) {
  if (!(cfg_ == other.cfg_)) {
    throw IncompatibleSketchError("cannot merge sketches with different configs");
  }
  total_ = checked_add(total_, other.total_);
  if (!other.is_dense()) {
    if (is_dense()) {
      for (const auto& [id, cnt] : other.sparse_) add_to_dense(id, cnt);
      return;
    }
    for (const auto& [id, cnt] : other.sparse_) {
      auto it = std::lower_bound(sparse_.begin(), sparse_.end(), id,
                                 [](const auto& e, StreamId v) { return e.first < v; });
      if (it != sparse_.end() && it->first == id) {
        it->second = checked_add(it->second, cnt);
      } else {
        sparse_.insert(it, {id, cnt});
      }
    }
    if (sparse_.size() > cfg_.width) materialize();
    return;
  }
  if (!is_dense()) materialize();
  for (std::size_t i = 0; i < dense_.size(); ++i) {
    dense_[i] = checked_add(dense_[i], other.dense_[i]);
  }
}

std::vector<std::uint64_t> CountMinSketch::dense_counters() const {
  if (is_dense()) return dense_;
  std::vector<std::uint64_t> grid(static_cast<std::size_t>(cfg_.width) * cfg_.depth, 0);
  for (const auto& [id, cnt] : sparse_) {
    for (std::uint32_t r = 0; r < cfg_.depth; ++r) {
      grid[static_cast<std::size_t>(r) * cfg_.width + cell(r, id)] += cnt;
    }
  }
  return grid;
}

void CountMinSketch::serialize(std::vector<std::uint8_t>& out) const {
  wire::put_magic(out, "CMS1");
  wire::put_u32(out, cfg_.width);
  wire::put_u32(out, cfg_.depth);
  wire::put_u64(out, cfg_.seed);
  wire::put_u64(out, total_);
  for (std::uint64_t c : dense_counters()) wire::put_u64(out, c);
}

CountMinSketch CountMinSketch::deserialize(std::span<const std::uint8_t> in,
                                           std::size_t& off) {
  wire::check_magic(in, off, "CMS1");
  CmConfig cfg;
  cfg.width = wire::get_u32(in, off);
  cfg.depth = wire::get_u32(in, off);
  cfg.seed = wire::get_u64(in, off);
  CountMinSketch sk(cfg);
  sk.total_ = wire::get_u64(in, off);
  sk.dense_.resize(static_cast<std::size_t>(cfg.width) * cfg.depth);
  for (auto& c : sk.dense_) c = wire::get_u64(in, off);
  return sk;
}

std::size_t CountMinSketch::snapshot_bytes() const {
  return 4 + 4 + 4 + 8 + 8 + std::size_t{8} * cfg_.width * cfg_.depth;
}

}  // namespace braid
