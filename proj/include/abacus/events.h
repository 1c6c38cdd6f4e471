#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abacus/errors.h"

namespace abacus {

// Event-log file format ("ABLG" v1): an 8-byte header (magic u32, version u32)
// followed by one 32-byte little-endian record per event:
//   rec_type u8   0=InstrRetired 1=MemAccess 2=Stall 3=ContextSwitch
//   core     u8
//   access   u8   0=read 1=write 255=n/a
//   pad      u8   always 0
//   pid      u16
//   tid      u16
//   cycle    u64
//   addr     u64  pc for InstrRetired, byte address for MemAccess, else 0
//   aux      u64  MemAccess: latency; Stall: episode length;
//                 ContextSwitch: incoming (tid<<16|pid); InstrRetired: 0
inline constexpr uint32_t kEventLogMagic = 0x41424C47;
inline constexpr uint32_t kEventLogVersion = 1;
inline constexpr size_t kEventRecordSize = 32;
inline constexpr size_t kEventLogHeaderSize = 8;

// pid 0 is the idle/kernel process; pid 0xFFFF is the OTHER attribution
// bucket and never appears in a simulator-emitted log.
inline constexpr uint16_t kIdlePid = 0;
inline constexpr uint16_t kOtherPid = 0xFFFF;

enum class EventKind : uint8_t {
  InstrRetired = 0,
  MemAccess = 1,
  Stall = 2,
  ContextSwitch = 3,
};

enum class MemOp : uint8_t { Read = 0, Write = 1 };

struct ProcessRef {
  uint16_t pid = 0;
  uint16_t tid = 0;
  bool operator==(const ProcessRef&) const = default;
};

inline uint64_t pack_proc(ProcessRef p) { return uint64_t(p.tid) << 16 | p.pid; }
inline ProcessRef unpack_proc(uint64_t v) {
  return {uint16_t(v & 0xFFFF), uint16_t((v >> 16) & 0xFFFF)};
}

// One snooped occurrence on a core, stamped with its completion cycle.
struct CoreEvent {
  EventKind kind = EventKind::InstrRetired;
  uint8_t core = 0;
  MemOp access = MemOp::Read;  // meaningful for MemAccess only
  ProcessRef proc;
  uint64_t cycle = 0;
  uint64_t addr = 0;
  uint64_t aux = 0;
  bool operator==(const CoreEvent&) const = default;
};

inline CoreEvent make_instr(uint8_t core, ProcessRef p, uint64_t cycle, uint64_t pc) {
  return {EventKind::InstrRetired, core, MemOp::Read, p, cycle, pc, 0};
}
inline CoreEvent make_access(uint8_t core, ProcessRef p, uint64_t cycle, uint64_t addr,
                             MemOp op, uint64_t latency) {
  return {EventKind::MemAccess, core, op, p, cycle, addr, latency};
}
inline CoreEvent make_stall(uint8_t core, ProcessRef p, uint64_t cycle, uint64_t len) {
  return {EventKind::Stall, core, MemOp::Read, p, cycle, 0, len};
}
inline CoreEvent make_switch(uint8_t core, ProcessRef outgoing, uint64_t cycle,
                             ProcessRef incoming) {
  return {EventKind::ContextSwitch, core, MemOp::Read, outgoing, cycle, 0,
          pack_proc(incoming)};
}

using EventLog = std::vector<CoreEvent>;

struct StreamViolation {
  size_t index;  // offending record
  std::string message;
};

// Empty result iff the stream satisfies the event invariants: per-core cycle
// monotonicity, PID continuity across context switches (checked on non-switch
// events), latency/stall length >= 1, and no use of the reserved OTHER pid.
std::vector<StreamViolation> validate_event_stream(std::span<const CoreEvent> events);

// Throws EncodeError (with record index) on invariant violations.
std::vector<uint8_t> encode_event_log(std::span<const CoreEvent> events);

// Throws DecodeError (with byte offset) on malformed input.
EventLog decode_event_log(std::span<const uint8_t> bytes);

}  // namespace abacus
