#pragma once

#include <cstdint>
#include <span>

#include "abacus/report.h"

namespace abacus {

// Snapshot-page format ("ABAC" v1). A page begins with a 24-byte header:
//   magic u32 = 0x41424143, version u32 = 1, snapshot_cycle u64,
//   nrecords u32, reserved u32 = 0
// followed by nrecords TLV records, one per enabled unit, ascending unit
// index:
//   unit_type u32, unit_index u32, payload_len u32,
//   flags u32 (bit0 OVERFLOW, bit1 ATTR_PRESENT), payload bytes
inline constexpr uint32_t kPageMagic = 0x41424143;
inline constexpr uint32_t kPageVersion = 1;
inline constexpr size_t kPageHeaderSize = 24;
inline constexpr size_t kPageRecordHeaderSize = 16;
inline constexpr size_t kDefaultPageSize = 65536;

inline constexpr uint32_t kFlagOverflow = 1u << 0;
inline constexpr uint32_t kFlagAttrPresent = 1u << 1;

// Decodes one unit's serialized payload. Throws DecodeError with the offset
// relative to the payload start.
UnitReport decode_unit_payload(UnitType type, uint32_t index, uint32_t flags,
                               std::span<const uint8_t> payload);

// Inverse of the page layout above; throws DecodeError with byte offset.
Report decode_page(std::span<const uint8_t> bytes);

}  // namespace abacus
