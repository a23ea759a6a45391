#include "braid/qdigest.hpp"

#include <cmath>
#include <sstream>

namespace braid {

QDigest::QDigest(double rho, std::uint64_t u, Cadence cadence)
    : rho_(rho), u_(u), cadence_(cadence) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must be in (0,1)");
  if (u < 2 || !is_power_of_two(u)) throw DomainError("U must be a power of two >= 2");
  if (u > (std::uint64_t{1} << 32)) throw DomainError("U larger than 2^32 unsupported");
  log_u_ = log2_exact(u);
  batch_interval_ = static_cast<std::uint64_t>(std::ceil(1.0 / (2.0 * rho_)));
  batch_interval_ = std::max<std::uint64_t>(batch_interval_, 1);
  levels_.resize(log_u_ + 1);
}

bool QDigest::leaf_triple_violates(std::uint64_t leaf_index, std::uint64_t thr) const {
  std::uint64_t sibling = (leaf_index % 2 == 1) ? leaf_index + 1 : leaf_index - 1;
  std::uint64_t parent = (std::min(leaf_index, sibling) + 1) / 2;
  std::uint64_t triple =
      count_at(0, leaf_index) + count_at(0, sibling) + count_at(1, parent);
  return triple < thr;
}

std::size_t QDigest::bucket_count() const {
  std::size_t total = 0;
  for (const auto& lv : levels_) total += lv.size();
  return total;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> QDigest::sorted_buckets() const {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  out.reserve(bucket_count());
  for (std::uint32_t level = 0; level <= log_u_; ++level) {
    for (const auto& [index, count] : levels_[level]) {
      out.push_back({pack(level, index), count});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint64_t> QDigest::postorder_keys() const {
  std::vector<std::uint64_t> keys;
  keys.reserve(bucket_count());
  for (std::uint32_t level = 0; level <= log_u_; ++level) {
    for (const auto& [index, count] : levels_[level]) {
      (void)count;
      keys.push_back(pack(level, index));
    }
  }
  // Post-order of the bucket tree: ascending hi edge, descendants before
  // ancestors when edges coincide (i.e. lower level first).
  std::sort(keys.begin(), keys.end(), [](std::uint64_t a, std::uint64_t b) {
    std::uint64_t ha = bucket_hi(a), hb = bucket_hi(b);
    if (ha != hb) return ha < hb;
    return level_of(a) < level_of(b);
  });
  return keys;
}

std::uint64_t QDigest::quantile_at_rank(std::uint64_t target_rank) const {
  if (n_ == 0) throw EmptyStreamError("quantile of an empty digest");
  std::uint64_t target = std::clamp<std::uint64_t>(target_rank, 1, n_);
  std::uint64_t running = 0;
  std::uint64_t last_hi = u_;
  for (std::uint64_t key : postorder_keys()) {
    running += count_at(level_of(key), index_of(key));
    last_hi = bucket_hi(key);
    if (running >= target) return last_hi;
  }
  return last_hi;
}

std::uint64_t QDigest::quantile(double phi) const {
  if (!(phi > 0.0 && phi < 1.0)) throw DomainError("phi must be in (0,1)");
  if (n_ == 0) throw EmptyStreamError("quantile of an empty digest");
  return quantile_at_rank(quantile_target_rank(phi, n_));
}

std::string QDigest::dump() const {
  std::ostringstream os;
  for (const auto& [key, count] : sorted_buckets()) {
    os << level_of(key) << ' ' << index_of(key) << ' ' << bucket_lo(key) << ' '
       << bucket_hi(key) << ' ' << count << '\n';
  }
  return os.str();
}

bool QDigest::check_invariants(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  std::uint64_t thr = threshold();
  std::uint64_t sum = 0;
  for (std::uint32_t level = 0; level <= log_u_; ++level) {
    std::uint64_t max_index = u_ >> level;
    for (const auto& [index, count] : levels_[level]) {
      if (index < 1 || index > max_index) return fail("bucket index out of range");
      if (count == 0) return fail("stored bucket with zero count");
      sum += count;
      if (level > 0 && count > thr) {
        return fail("non-leaf bucket count above threshold");
      }
      if (level < log_u_) {
        std::uint64_t sibling = (index % 2 == 1) ? index + 1 : index - 1;
        std::uint64_t parent = (std::min(index, sibling) + 1) / 2;
        std::uint64_t triple = count + count_at(level, sibling) + count_at(level + 1, parent);
        if (triple < thr) return fail("triple sum below threshold");
      }
    }
  }
  if (sum != n_) return fail("bucket counts do not sum to n");
  return true;
}

}  // namespace braid
