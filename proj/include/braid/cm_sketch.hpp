#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "braid/core.hpp"

namespace braid {

struct CmConfig {
  std::uint32_t width = 1;
  std::uint32_t depth = 1;
  std::uint64_t seed = 0;

  // width = ceil(e/eps), depth = ceil(ln(1/delta)). Explicit (width, depth)
  // construction stays available for fixed-geometry experiments.
  static CmConfig from_error(double eps, double delta, std::uint64_t seed);

  friend bool operator==(const CmConfig&, const CmConfig&) = default;
};

// Mergeable Count-Min sketch keyed by stream id. Plain updates only (no
// conservative update): merging requires linearity. Counters are 64-bit and
// overflow raises CounterOverflowError instead of wrapping.
//
// Internally the counter grid stays sparse (per-key exact counts) until the
// key support exceeds the row width, then materializes to the dense grid.
// Both forms answer every query with identical results; snapshots always
// encode the dense grid.
class CountMinSketch {
 public:
  explicit CountMinSketch(const CmConfig& cfg);

  void insert(StreamId id, std::uint64_t multiplicity = 1);
  std::uint64_t point_query(StreamId id) const;
  // Entrywise counter sum; both sketches must share (width, depth, seed).
  void merge(const CountMinSketch& other);

  std::uint64_t total() const { return total_; }
  const CmConfig& config() const { return cfg_; }

  // Row-major depth x width counter grid (materialized copy).
  std::vector<std::uint64_t> dense_counters() const;

  // Binary snapshot: "CMS1", width, depth, seed, total, then row-major
  // counters, all little-endian.
  void serialize(std::vector<std::uint8_t>& out) const;
  static CountMinSketch deserialize(std::span<const std::uint8_t> in, std::size_t& off);
  std::size_t snapshot_bytes() const;

  // Column of `id` in row `row`.
  std::uint32_t cell(std::uint32_t row, StreamId id) const;

 private:
  bool is_dense() const { return !dense_.empty(); }
  void materialize();
  void add_to_dense(StreamId id, std::uint64_t multiplicity);

  CmConfig cfg_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> row_keys_;  // derived from (seed, row); not serialized
  std::vector<std::pair<StreamId, std::uint64_t>> sparse_;  // sorted by id
  std::vector<std::uint64_t> dense_;
};

}  // namespace braid
