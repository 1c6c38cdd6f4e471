#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

// Little-endian byte packing helpers shared by the binary codecs.
// Callers of the get_* functions guarantee bounds.

namespace abacus {

inline void put_u8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

inline void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(uint8_t(v));
  out.push_back(uint8_t(v >> 8));
}

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

inline void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

inline uint8_t get_u8(std::span<const uint8_t> b, size_t off) { return b[off]; }

inline uint16_t get_u16(std::span<const uint8_t> b, size_t off) {
  return uint16_t(b[off]) | uint16_t(b[off + 1]) << 8;
}

inline uint32_t get_u32(std::span<const uint8_t> b, size_t off) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(b[off + i]) << (8 * i);
  return v;
}

inline uint64_t get_u64(std::span<const uint8_t> b, size_t off) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(b[off + i]) << (8 * i);
  return v;
}

}  // namespace abacus
