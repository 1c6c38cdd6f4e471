#include "abacus/oracle.h"

#include <algorithm>
#include <deque>
#include <optional>

#include "abacus/bytes.h"
#include "abacus/errors.h"

// Everything below re-derives unit semantics from their definitions instead
// of calling into the monitor implementation.

namespace abacus {

namespace {

uint64_t osat(uint64_t acc, uint64_t delta, bool& overflow) {
  if (acc > UINT64_MAX - delta) {
    overflow = true;
    return UINT64_MAX;
  }
  return acc + delta;
}

// First-seen-order bounded pid table, OTHER bucket last.
struct OracleAttr {
  std::vector<std::pair<uint16_t, uint64_t>> named;
  uint64_t other = 0;

  void add(uint16_t pid, uint64_t delta, bool& overflow) {
    for (auto& [p, v] : named) {
      if (p == pid) {
        v = osat(v, delta, overflow);
        return;
      }
    }
    if (named.size() < 8) {
      named.emplace_back(pid, delta);
      return;
    }
    other = osat(other, delta, overflow);
  }

  void serialize(std::vector<uint8_t>& out) const {
    put_u32(out, uint32_t(named.size()) + 1);
    put_u32(out, 0);
    for (const auto& [p, v] : named) {
      put_u32(out, p);
      put_u32(out, 0);
      put_u64(out, v);
    }
    put_u32(out, 0xFFFF);
    put_u32(out, 0);
    put_u64(out, other);
  }

  std::vector<AttrEntry> entries() const {
    std::vector<AttrEntry> out;
    for (const auto& [p, v] : named) out.push_back({p, v});
    out.push_back({0xFFFF, other});
    return out;
  }
};

// Window scan, one pass: replicates the start-then-stop evaluation with
// cycle granularity (the start cycle is collected; the stop cycle is
// collected and then the window closes).
WindowState scan_window(const EventLog& log, TriggerSpec start, TriggerSpec stop) {
  WindowState w;

  auto event_matches = [](const TriggerSpec& t, const CoreEvent& e) {
    switch (t.mode) {
      case kTrigMemAddrAccess:
        return e.kind == EventKind::MemAccess && e.addr == t.arg;
      case kTrigInstrAddr:
        return e.kind == EventKind::InstrRetired && e.addr == t.arg;
      case kTrigPidScheduled:
        return e.kind == EventKind::ContextSwitch &&
               unpack_proc(e.aux).pid == uint16_t(t.arg & 0xFFFF);
      default:
        return false;
    }
  };

  // Start cycle.
  std::optional<uint64_t> start_cycle;
  if (start.mode == kTrigImmediateOrNever) {
    start_cycle = 0;
  } else if (start.mode == kTrigCycleCount) {
    start_cycle = start.arg;
  } else if (trigger_mode_valid(start.mode)) {
    for (const CoreEvent& e : log) {
      if (event_matches(start, e)) {
        start_cycle = e.cycle;
        break;
      }
    }
  }
  if (!start_cycle) return w;  // never opens
  w.phase = WindowPhase::Active;
  w.start_cycle = start_cycle;

  // Stop cycle: first firing cycle >= start.
  if (stop.mode == kTrigCycleCount) {
    w.stop_cycle = std::max(*start_cycle, stop.arg);
    w.phase = WindowPhase::Done;
  } else if (trigger_mode_valid(stop.mode) && stop.mode != kTrigImmediateOrNever) {
    for (const CoreEvent& e : log) {
      if (e.cycle >= *start_cycle && event_matches(stop, e)) {
        w.stop_cycle = e.cycle;
        w.phase = WindowPhase::Done;
        break;
      }
    }
  }
  return w;
}

struct OracleUnit {
  UnitSettings cfg;
  bool overflow = false;
  OracleAttr attr;

  // hist
  std::vector<uint64_t> hist_counts;
  uint64_t hist_oor = 0;
  // trace
  std::deque<TraceRecord> trace_kept;  // bounded window of accepted records
  uint64_t trace_total = 0;
  // lat
  std::vector<uint64_t> lat_counts;
  // stall
  std::vector<uint64_t> stall_per_core;
  uint64_t stall_total = 0;
};

}  // namespace

OracleResult oracle_profile(const EventLog& log, const MonitorConfig& cfg,
                            const OracleOptions& opts) {
  validate_monitor_config(cfg);

  TriggerSpec start = cfg.trigger_start.value_or(TriggerSpec{});
  TriggerSpec stop = cfg.trigger_stop.value_or(TriggerSpec{});

  OracleResult result;
  result.window = scan_window(log, start, stop);

  std::vector<OracleUnit> units;
  for (const UnitSettings& u : cfg.units) {
    if (!u.enable) continue;
    OracleUnit ou;
    ou.cfg = u;
    switch (u.type) {
      case UnitType::Hist:
        ou.hist_counts.assign(std::get<HistParams>(u.params).nbuckets, 0);
        break;
      case UnitType::Lat:
        ou.lat_counts.assign(std::get<LatParams>(u.params).nbuckets, 0);
        break;
      case UnitType::Stall:
        ou.stall_per_core.assign(opts.ncores, 0);
        break;
      default:
        break;
    }
    units.push_back(std::move(ou));
  }
  std::sort(units.begin(), units.end(),
            [](const OracleUnit& a, const OracleUnit& b) { return a.cfg.index < b.cfg.index; });

  // Single linear pass over the window-clipped log.
  bool windowed = result.window.start_cycle.has_value();
  for (const CoreEvent& e : log) {
    if (!windowed) break;
    if (e.cycle < *result.window.start_cycle) continue;
    if (result.window.stop_cycle && e.cycle > *result.window.stop_cycle) continue;

    for (OracleUnit& ou : units) {
      const UnitSettings& u = ou.cfg;
      if (!(u.core_mask >> e.core & 1)) continue;
      if (u.pid_filter && e.proc.pid != *u.pid_filter) continue;

      switch (u.type) {
        case UnitType::Hist: {
          if (e.kind != EventKind::MemAccess) break;
          const auto& p = std::get<HistParams>(u.params);
          if (e.addr >= p.base && (e.addr - p.base) >> p.shift < p.nbuckets) {
            size_t b = size_t((e.addr - p.base) >> p.shift);
            ou.hist_counts[b] = osat(ou.hist_counts[b], 1, ou.overflow);
            if (u.attr_mode) ou.attr.add(e.proc.pid, 1, ou.overflow);
          } else {
            ou.hist_oor = osat(ou.hist_oor, 1, ou.overflow);
          }
          break;
        }
        case UnitType::Trace: {
          const auto& p = std::get<TraceParams>(u.params);
          TraceRecord r;
          if (e.kind == EventKind::MemAccess) {
            r.kind = e.access == MemOp::Write ? 1 : 0;
            r.latency = uint16_t(std::min<uint64_t>(e.aux, 0xFFFF));
          } else if (e.kind == EventKind::InstrRetired && p.include_instr) {
            r.kind = 2;
          } else {
            break;
          }
          r.timestamp = opts.ts_enabled ? e.cycle : 0;
          r.addr = e.addr;
          r.pid = e.proc.pid;
          r.core = e.core;
          ou.trace_total++;
          if (p.mode == TraceUnit::kModeStopOnFull) {
            if (ou.trace_kept.size() < p.capacity) ou.trace_kept.push_back(r);
          } else {
            ou.trace_kept.push_back(r);
            if (ou.trace_kept.size() > p.capacity) ou.trace_kept.pop_front();
          }
          break;
        }
        case UnitType::Lat: {
          if (e.kind != EventKind::MemAccess) break;
          const auto& p = std::get<LatParams>(u.params);
          size_t b = size_t(std::min<uint64_t>(e.aux / p.bucket_width, p.nbuckets - 1));
          ou.lat_counts[b] = osat(ou.lat_counts[b], 1, ou.overflow);
          if (u.attr_mode) ou.attr.add(e.proc.pid, 1, ou.overflow);
          break;
        }
        case UnitType::Stall: {
          if (e.kind != EventKind::Stall) break;
          if (e.core < ou.stall_per_core.size())
            ou.stall_per_core[e.core] = osat(ou.stall_per_core[e.core], e.aux, ou.overflow);
          ou.stall_total = osat(ou.stall_total, e.aux, ou.overflow);
          if (u.attr_mode) ou.attr.add(e.proc.pid, e.aux, ou.overflow);
          break;
        }
        default:
          break;
      }
    }
  }

  // Emit payloads and the structured report.
  result.report.snapshot_cycle = log.empty() ? 0 : log.back().cycle + 1;
  for (OracleUnit& ou : units) {
    const UnitSettings& u = ou.cfg;
    bool attr_present = u.attr_mode && u.type != UnitType::Trace;
    std::vector<uint8_t> payload;
    UnitReport ur;
    ur.index = u.index;
    ur.type = u.type;
    ur.attr_present = attr_present;

    switch (u.type) {
      case UnitType::Hist: {
        const auto& p = std::get<HistParams>(u.params);
        put_u64(payload, p.base);
        put_u32(payload, p.shift);
        put_u32(payload, p.nbuckets);
        put_u64(payload, ou.hist_oor);
        for (uint64_t c : ou.hist_counts) put_u64(payload, c);
        HistData d{p.base, p.shift, p.nbuckets, ou.hist_oor, ou.hist_counts};
        ur.data = std::move(d);
        break;
      }
      case UnitType::Trace: {
        const auto& p = std::get<TraceParams>(u.params);
        uint64_t dropped = ou.trace_total > p.capacity ? ou.trace_total - p.capacity : 0;
        bool full_stop = p.mode == TraceUnit::kModeStopOnFull && ou.trace_total >= p.capacity;
        ou.overflow |= p.mode == TraceUnit::kModeWrap ? dropped > 0 : full_stop;
        std::vector<TraceRecord> kept(ou.trace_kept.begin(), ou.trace_kept.end());
        put_u32(payload, p.capacity);
        put_u32(payload, p.mode);
        put_u32(payload, uint32_t(kept.size()));
        put_u32(payload, 0);
        put_u64(payload, dropped);
        for (const TraceRecord& r : kept) {
          put_u64(payload, r.timestamp);
          put_u64(payload, r.addr);
          put_u16(payload, r.pid);
          put_u8(payload, r.core);
          put_u8(payload, r.kind);
          put_u16(payload, r.latency);
          put_u16(payload, 0);
        }
        TraceData d{p.capacity, p.mode, uint32_t(kept.size()), dropped, kept};
        ur.data = std::move(d);
        break;
      }
      case UnitType::Lat: {
        const auto& p = std::get<LatParams>(u.params);
        put_u32(payload, p.bucket_width);
        put_u32(payload, p.nbuckets);
        for (uint64_t c : ou.lat_counts) put_u64(payload, c);
        LatData d{p.bucket_width, p.nbuckets, ou.lat_counts};
        ur.data = std::move(d);
        break;
      }
      case UnitType::Stall: {
        put_u32(payload, uint32_t(ou.stall_per_core.size()));
        put_u32(payload, 0);
        put_u64(payload, ou.stall_total);
        for (uint64_t c : ou.stall_per_core) put_u64(payload, c);
        StallData d{uint32_t(ou.stall_per_core.size()), ou.stall_total, ou.stall_per_core};
        ur.data = std::move(d);
        break;
      }
      default:
        break;
    }
    if (attr_present) {
      ou.attr.serialize(payload);
      ur.attribution = ou.attr.entries();
    }
    ur.overflow = ou.overflow;
    result.unit_payloads.push_back(std::move(payload));
    result.report.units.push_back(std::move(ur));
  }
  return result;
}

}  // namespace abacus
