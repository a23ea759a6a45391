#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "braid/core.hpp"

namespace braid::wire {

// Little-endian byte encoding used by all snapshot formats.

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline void put_magic(std::vector<std::uint8_t>& out, const char (&magic)[5]) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(magic[i]));
}

inline void need(std::span<const std::uint8_t> in, std::size_t off, std::size_t n) {
  if (off + n > in.size()) throw FormatError("snapshot truncated");
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t& off) {
  need(in, off, 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[off + i]) << (8 * i);
  off += 4;
  return v;
}

inline std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t& off) {
  need(in, off, 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[off + i]) << (8 * i);
  off += 8;
  return v;
}

inline double get_f64(std::span<const std::uint8_t> in, std::size_t& off) {
  return std::bit_cast<double>(get_u64(in, off));
}

inline void check_magic(std::span<const std::uint8_t> in, std::size_t& off,
                        const char (&magic)[5]) {
  need(in, off, 4);
  for (int i = 0; i < 4; ++i) {
    if (in[off + i] != static_cast<std::uint8_t>(magic[i])) {
      throw FormatError("bad snapshot magic");
    }
  }
  off += 4;
}

}  // namespace braid::wire
