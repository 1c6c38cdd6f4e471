#include "abacus/events.h"

#include <array>
#include <optional>

#include "abacus/bytes.h"

namespace abacus {

namespace {
constexpr uint8_t kAccessNone = 255;
constexpr size_t kMaxCores = 256;
}  // namespace

std::vector<StreamViolation> validate_event_stream(std::span<const CoreEvent> events) {
  std::vector<StreamViolation> out;
  std::array<std::optional<uint64_t>, kMaxCores> last_cycle;
  std::array<std::optional<ProcessRef>, kMaxCores> cur_proc;

  for (size_t i = 0; i < events.size(); ++i) {
    const CoreEvent& e = events[i];
    auto flag = [&](const std::string& msg) { out.push_back({i, msg}); };

    if (last_cycle[e.core] && e.cycle < *last_cycle[e.core])
      flag("cycle regression on core " + std::to_string(e.core));
    last_cycle[e.core] = e.cycle;

    if (e.proc.pid == kOtherPid) flag("reserved OTHER pid in proc field");

    switch (e.kind) {
      case EventKind::MemAccess:
        if (e.aux < 1) flag("memory access latency < 1");
        break;
      case EventKind::Stall:
        if (e.aux < 1) flag("stall episode length < 1");
        break;
      case EventKind::ContextSwitch:
        if (unpack_proc(e.aux).pid == kOtherPid)
          flag("reserved OTHER pid as switch-in target");
        break;
      case EventKind::InstrRetired:
        break;
    }

    if (e.kind == EventKind::ContextSwitch) {
      cur_proc[e.core] = unpack_proc(e.aux);
    } else if (cur_proc[e.core] && !(e.proc == *cur_proc[e.core])) {
      flag("pid continuity: core " + std::to_string(e.core) + " carries pid " +
           std::to_string(e.proc.pid) + " but last switch-in was pid " +
           std::to_string(cur_proc[e.core]->pid));
    }
  }
  return out;
}

std::vector<uint8_t> encode_event_log(std::span<const CoreEvent> events) {
  auto violations = validate_event_stream(events);
  if (!violations.empty())
    throw EncodeError(violations.front().index, violations.front().message);

  std::vector<uint8_t> out;
  out.reserve(kEventLogHeaderSize + events.size() * kEventRecordSize);
  put_u32(out, kEventLogMagic);
  put_u32(out, kEventLogVersion);
  for (const CoreEvent& e : events) {
    put_u8(out, uint8_t(e.kind));
    put_u8(out, e.core);
    put_u8(out, e.kind == EventKind::MemAccess ? uint8_t(e.access) : kAccessNone);
    put_u8(out, 0);
    put_u16(out, e.proc.pid);
    put_u16(out, e.proc.tid);
    put_u64(out, e.cycle);
    put_u64(out, e.addr);
    put_u64(out, e.aux);
  }
  return out;
}

EventLog decode_event_log(std::span<const uint8_t> bytes) {
  if (bytes.size() < kEventLogHeaderSize) throw DecodeError(0, "truncated header");
  if (get_u32(bytes, 0) != kEventLogMagic) throw DecodeError(0, "bad magic");
  if (get_u32(bytes, 4) != kEventLogVersion) throw DecodeError(4, "bad version");

  size_t body = bytes.size() - kEventLogHeaderSize;
  size_t nfull = body / kEventRecordSize;
  if (body % kEventRecordSize != 0)
    throw DecodeError(kEventLogHeaderSize + nfull * kEventRecordSize,
                      "truncated record");

  EventLog events;
  events.reserve(nfull);
  for (size_t i = 0; i < nfull; ++i) {
    size_t off = kEventLogHeaderSize + i * kEventRecordSize;
    uint8_t rec_type = get_u8(bytes, off);
    if (rec_type > uint8_t(EventKind::ContextSwitch))
      throw DecodeError(off, "unknown rec_type " + std::to_string(rec_type));

    CoreEvent e;
    e.kind = EventKind(rec_type);
    e.core = get_u8(bytes, off + 1);
    uint8_t access = get_u8(bytes, off + 2);
    if (e.kind == EventKind::MemAccess) {
      if (access > 1) throw DecodeError(off + 2, "bad access code");
      e.access = MemOp(access);
    }
    e.proc.pid = get_u16(bytes, off + 4);
    e.proc.tid = get_u16(bytes, off + 6);
    e.cycle = get_u64(bytes, off + 8);
    e.addr = get_u64(bytes, off + 16);
    e.aux = get_u64(bytes, off + 24);
    events.push_back(e);
  }
  return events;
}

}  // namespace abacus
