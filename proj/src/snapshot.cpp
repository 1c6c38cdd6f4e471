#include "abacus/snapshot.h"

#include "abacus/bytes.h"
#include "abacus/errors.h"

namespace abacus {

namespace {

struct Cursor {
  std::span<const uint8_t> b;
  size_t pos = 0;

  void need(size_t n, const char* what) {
    if (pos + n > b.size()) throw DecodeError(pos, std::string("truncated ") + what);
  }
  uint16_t u16(const char* what) { need(2, what); uint16_t v = get_u16(b, pos); pos += 2; return v; }
  uint32_t u32(const char* what) { need(4, what); uint32_t v = get_u32(b, pos); pos += 4; return v; }
  uint64_t u64(const char* what) { need(8, what); uint64_t v = get_u64(b, pos); pos += 8; return v; }
  uint8_t u8(const char* what) { need(1, what); return b[pos++]; }
};

std::vector<AttrEntry> decode_attribution(Cursor& c) {
  uint32_t npids = c.u32("attribution header");
  c.u32("attribution header");
  std::vector<AttrEntry> out;
  out.reserve(npids);
  for (uint32_t i = 0; i < npids; ++i) {
    AttrEntry e;
    e.pid = c.u32("attribution entry");
    c.u32("attribution entry");
    e.value = c.u64("attribution entry");
    out.push_back(e);
  }
  return out;
}

}  // namespace

UnitReport decode_unit_payload(UnitType type, uint32_t index, uint32_t flags,
                               std::span<const uint8_t> payload) {
  UnitReport r;
  r.index = index;
  r.type = type;
  r.overflow = flags & kFlagOverflow;
  r.attr_present = flags & kFlagAttrPresent;

  Cursor c{payload};
  switch (type) {
    case UnitType::Hist: {
      HistData d;
      d.base = c.u64("hist payload");
      d.shift = c.u32("hist payload");
      d.nbuckets = c.u32("hist payload");
      d.out_of_range = c.u64("hist payload");
      d.counts.reserve(d.nbuckets);
      for (uint32_t i = 0; i < d.nbuckets; ++i) d.counts.push_back(c.u64("hist counts"));
      r.data = std::move(d);
      break;
    }
    case UnitType::Trace: {
      TraceData d;
      d.capacity = c.u32("trace payload");
      d.mode = c.u32("trace payload");
      d.count = c.u32("trace payload");
      c.u32("trace payload");
      d.dropped = c.u64("trace payload");
      d.entries.reserve(d.count);
      for (uint32_t i = 0; i < d.count; ++i) {
        TraceRecord t;
        t.timestamp = c.u64("trace entry");
        t.addr = c.u64("trace entry");
        t.pid = c.u16("trace entry");
        t.core = c.u8("trace entry");
        t.kind = c.u8("trace entry");
        t.latency = c.u16("trace entry");
        c.u16("trace entry");
        d.entries.push_back(t);
      }
      r.data = std::move(d);
      break;
    }
    case UnitType::Lat: {
      LatData d;
      d.bucket_width = c.u32("lat payload");
      d.nbuckets = c.u32("lat payload");
      d.counts.reserve(d.nbuckets);
      for (uint32_t i = 0; i < d.nbuckets; ++i) d.counts.push_back(c.u64("lat counts"));
      r.data = std::move(d);
      break;
    }
    case UnitType::Stall: {
      StallData d;
      d.ncores = c.u32("stall payload");
      c.u32("stall payload");
      d.total = c.u64("stall payload");
      d.per_core.reserve(d.ncores);
      for (uint32_t i = 0; i < d.ncores; ++i) d.per_core.push_back(c.u64("stall counts"));
      r.data = std::move(d);
      break;
    }
    default:
      throw DecodeError(0, "unknown unit_type " + std::to_string(uint32_t(type)));
  }
  if (r.attr_present) r.attribution = decode_attribution(c);
  if (c.pos != payload.size()) throw DecodeError(c.pos, "trailing payload bytes");
  return r;
}

Report decode_page(std::span<const uint8_t> bytes) {
  if (bytes.size() < kPageHeaderSize) throw DecodeError(0, "truncated header");
  if (get_u32(bytes, 0) != kPageMagic) throw DecodeError(0, "bad magic");
  if (get_u32(bytes, 4) != kPageVersion) throw DecodeError(4, "bad version");

  Report report;
  report.snapshot_cycle = get_u64(bytes, 8);
  uint32_t nrecords = get_u32(bytes, 16);

  size_t pos = kPageHeaderSize;
  for (uint32_t i = 0; i < nrecords; ++i) {
    if (pos + kPageRecordHeaderSize > bytes.size())
      throw DecodeError(pos, "truncated record header");
    uint32_t unit_type = get_u32(bytes, pos);
    uint32_t unit_index = get_u32(bytes, pos + 4);
    uint32_t payload_len = get_u32(bytes, pos + 8);
    uint32_t flags = get_u32(bytes, pos + 12);
    pos += kPageRecordHeaderSize;
    if (pos + payload_len > bytes.size()) throw DecodeError(pos, "truncated payload");
    if (unit_type < 1 || unit_type > 4)
      throw DecodeError(pos - kPageRecordHeaderSize,
                        "unknown unit_type " + std::to_string(unit_type));
    try {
      report.units.push_back(decode_unit_payload(UnitType(unit_type), unit_index,
                                                 flags,
                                                 bytes.subspan(pos, payload_len)));
    } catch (const DecodeError& e) {
      throw DecodeError(pos + e.offset, e.what());
    }
    pos += payload_len;
  }
  return report;
}

}  // namespace abacus
