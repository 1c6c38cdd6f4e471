#include "abacus/units.h"

#include <algorithm>

#include "abacus/bytes.h"
#include "abacus/control.h"

namespace abacus {

const char* unit_type_name(UnitType t) {
  switch (t) {
    case UnitType::Hist: return "hist";
    case UnitType::Trace: return "trace";
    case UnitType::Lat: return "lat";
    case UnitType::Stall: return "stall";
    default: return "absent";
  }
}

namespace {
uint32_t clamp_u32(uint32_t v, uint32_t lo, uint32_t hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}
}  // namespace

// ---------------------------------------------------------------- attribution

bool AttributionTable::add(uint16_t pid, uint64_t delta) {
  for (auto& [p, v] : slots_)
    if (p == pid) return sat_add(v, delta);
  if (slots_.size() < kCapacity) {
    slots_.emplace_back(pid, delta);
    return false;
  }
  return sat_add(other_, delta);
}

uint64_t AttributionTable::lookup(uint16_t pid) const {
  if (pid == kOtherPid) return other_;
  for (const auto& [p, v] : slots_)
    if (p == pid) return v;
  return 0;
}

void AttributionTable::reset() {
  slots_.clear();
  other_ = 0;
}

void AttributionTable::serialize(std::vector<uint8_t>& out) const {
  put_u32(out, uint32_t(slots_.size()) + 1);  // named entries + OTHER
  put_u32(out, 0);
  for (const auto& [pid, value] : slots_) {
    put_u32(out, pid);
    put_u32(out, 0);
    put_u64(out, value);
  }
  put_u32(out, kOtherPid);
  put_u32(out, 0);
  put_u64(out, other_);
}

void MonitorUnit::reset() {
  common_.attr.reset();
  common_.overflow = false;
}

// ----------------------------------------------------------------------- hist

uint32_t HistUnit::observe(const CoreEvent& e, bool) {
  if (e.kind != EventKind::MemAccess) return 0;
  bool in_range = e.addr >= base_ && (e.addr - base_) >> shift_ < nbuckets_;
  if (in_range) {
    common_.overflow |= sat_add(counts_[(e.addr - base_) >> shift_], 1);
    if (common_.attr_mode) common_.overflow |= common_.attr.add(e.proc.pid, 1);
  } else {
    common_.overflow |= sat_add(out_of_range_, 1);
  }
  return 0;
}

void HistUnit::serialize(std::vector<uint8_t>& out) const {
  put_u64(out, base_);
  put_u32(out, shift_);
  put_u32(out, nbuckets_);
  put_u64(out, out_of_range_);
  for (uint64_t c : counts_) put_u64(out, c);
  if (attribution_present()) common_.attr.serialize(out);
}

void HistUnit::reset() {
  MonitorUnit::reset();
  std::fill(counts_.begin(), counts_.end(), 0);
  out_of_range_ = 0;
}

void HistUnit::configure(uint64_t base, uint32_t shift, uint32_t nbuckets) {
  base_ = base;
  shift_ = clamp_u32(shift, 0, 63);
  nbuckets_ = clamp_u32(nbuckets, 1, kMaxBuckets);
  counts_.assign(nbuckets_, 0);
  out_of_range_ = 0;
}

std::vector<UnitParamDesc> HistUnit::param_layout() const {
  return {
      {0x10, "HIST_BASE_LO", 0, 0, UINT32_MAX},
      {0x14, "HIST_BASE_HI", 0, 0, UINT32_MAX},
      {0x18, "HIST_SHIFT", kDefaultShift, 0, 63},
      {0x1C, "HIST_NBUCKETS", kDefaultBuckets, 1, kMaxBuckets},
  };
}

uint32_t HistUnit::read_param(uint32_t offset) const {
  switch (offset) {
    case 0x10: return uint32_t(base_);
    case 0x14: return uint32_t(base_ >> 32);
    case 0x18: return shift_;
    case 0x1C: return nbuckets_;
    default: return 0;
  }
}

void HistUnit::write_param(uint32_t offset, uint32_t value) {
  switch (offset) {
    case 0x10: configure((base_ & ~uint64_t(0xFFFFFFFF)) | value, shift_, nbuckets_); break;
    case 0x14: configure((base_ & 0xFFFFFFFF) | uint64_t(value) << 32, shift_, nbuckets_); break;
    case 0x18: configure(base_, value, nbuckets_); break;
    case 0x1C: configure(base_, shift_, value); break;
    default: break;
  }
}

// ---------------------------------------------------------------------- trace

uint32_t TraceUnit::observe(const CoreEvent& e, bool ts_enabled) {
  uint8_t kind;
  if (e.kind == EventKind::MemAccess && (kinds_ & kKindMem)) {
    kind = e.access == MemOp::Write ? 1 : 0;
  } else if (e.kind == EventKind::InstrRetired && (kinds_ & kKindInstr)) {
    kind = 2;
  } else {
    return 0;
  }

  TraceRecord rec;
  rec.timestamp = ts_enabled ? e.cycle : 0;
  rec.addr = e.addr;
  rec.pid = e.proc.pid;
  rec.core = e.core;
  rec.kind = kind;
  rec.latency = e.kind == EventKind::MemAccess
                    ? uint16_t(std::min<uint64_t>(e.aux, 0xFFFF))
                    : 0;

  if (mode_ == kModeStopOnFull && stored_ >= capacity_) {
    dropped_++;
    return 0;
  }
  if (ring_.size() < capacity_) {
    ring_.push_back(rec);
  } else {
    ring_[stored_ % capacity_] = rec;
    dropped_++;
    common_.overflow = true;
  }
  stored_++;
  if (mode_ == kModeStopOnFull && stored_ == capacity_) {
    common_.overflow = true;
    return kIrqTraceFull;
  }
  return 0;
}

uint32_t TraceUnit::count() const {
  return uint32_t(std::min<uint64_t>(stored_, capacity_));
}

std::vector<TraceRecord> TraceUnit::entries_oldest_first() const {
  std::vector<TraceRecord> out;
  uint32_t n = count();
  out.reserve(n);
  size_t oldest = stored_ > capacity_ ? stored_ % capacity_ : 0;
  for (uint32_t i = 0; i < n; ++i) out.push_back(ring_[(oldest + i) % capacity_]);
  return out;
}

void TraceUnit::serialize(std::vector<uint8_t>& out) const {
  put_u32(out, capacity_);
  put_u32(out, mode_);
  put_u32(out, count());
  put_u32(out, 0);
  put_u64(out, dropped_);
  for (const TraceRecord& r : entries_oldest_first()) {
    put_u64(out, r.timestamp);
    put_u64(out, r.addr);
    put_u16(out, r.pid);
    put_u8(out, r.core);
    put_u8(out, r.kind);
    put_u16(out, r.latency);
    put_u16(out, 0);
  }
}

void TraceUnit::reset() {
  MonitorUnit::reset();
  ring_.clear();
  stored_ = 0;
  dropped_ = 0;
}

void TraceUnit::configure(uint32_t capacity, uint32_t mode, uint32_t kinds) {
  capacity_ = clamp_u32(capacity, 1, kMaxCapacity);
  mode_ = clamp_u32(mode, 0, 1);
  kinds_ = kinds & (kKindMem | kKindInstr);
  ring_.clear();
  stored_ = 0;
  dropped_ = 0;
}

std::vector<UnitParamDesc> TraceUnit::param_layout() const {
  return {
      {0x10, "TRACE_CAPACITY", kDefaultCapacity, 1, kMaxCapacity},
      {0x14, "TRACE_MODE", kModeWrap, 0, 1},
      {0x18, "TRACE_KINDS", kKindMem, 0, kKindMem | kKindInstr,
       kKindMem | kKindInstr},
  };
}

uint32_t TraceUnit::read_param(uint32_t offset) const {
  switch (offset) {
    case 0x10: return capacity_;
    case 0x14: return mode_;
    case 0x18: return kinds_;
    default: return 0;
  }
}

void TraceUnit::write_param(uint32_t offset, uint32_t value) {
  switch (offset) {
    case 0x10: configure(value, mode_, kinds_); break;
    case 0x14: configure(capacity_, value, kinds_); break;
    case 0x18: configure(capacity_, mode_, value); break;
    default: break;
  }
}

// ------------------------------------------------------------------------ lat

uint32_t LatUnit::observe(const CoreEvent& e, bool) {
  if (e.kind != EventKind::MemAccess) return 0;
  uint64_t b = std::min<uint64_t>(e.aux / bucket_width_, nbuckets_ - 1);
  common_.overflow |= sat_add(counts_[size_t(b)], 1);
  if (common_.attr_mode) common_.overflow |= common_.attr.add(e.proc.pid, 1);
  if (irq_threshold_ != 0 && e.aux >= irq_threshold_) return kIrqLatThreshold;
  return 0;
}

void LatUnit::serialize(std::vector<uint8_t>& out) const {
  put_u32(out, bucket_width_);
  put_u32(out, nbuckets_);
  for (uint64_t c : counts_) put_u64(out, c);
  if (attribution_present()) common_.attr.serialize(out);
}

void LatUnit::reset() {
  MonitorUnit::reset();
  std::fill(counts_.begin(), counts_.end(), 0);
}

void LatUnit::configure(uint32_t bucket_width, uint32_t nbuckets,
                        uint32_t irq_threshold) {
  bucket_width_ = clamp_u32(bucket_width, 1, UINT32_MAX);
  nbuckets_ = clamp_u32(nbuckets, 1, kMaxBuckets);
  irq_threshold_ = irq_threshold;
  counts_.assign(nbuckets_, 0);
}

std::vector<UnitParamDesc> LatUnit::param_layout() const {
  return {
      {0x10, "LAT_BUCKET_WIDTH", kDefaultWidth, 1, UINT32_MAX},
      {0x14, "LAT_NBUCKETS", kDefaultBuckets, 1, kMaxBuckets},
      {0x18, "LAT_IRQ_THRESHOLD", 0, 0, UINT32_MAX},
  };
}

uint32_t LatUnit::read_param(uint32_t offset) const {
  switch (offset) {
    case 0x10: return bucket_width_;
    case 0x14: return nbuckets_;
    case 0x18: return irq_threshold_;
    default: return 0;
  }
}

void LatUnit::write_param(uint32_t offset, uint32_t value) {
  switch (offset) {
    case 0x10: configure(value, nbuckets_, irq_threshold_); break;
    case 0x14: configure(bucket_width_, value, irq_threshold_); break;
    case 0x18: irq_threshold_ = value; break;
    default: break;
  }
}

// ---------------------------------------------------------------------- stall

uint32_t StallUnit::observe(const CoreEvent& e, bool) {
  if (e.kind != EventKind::Stall) return 0;
  if (e.core < per_core_.size()) common_.overflow |= sat_add(per_core_[e.core], e.aux);
  common_.overflow |= sat_add(total_, e.aux);
  if (common_.attr_mode) common_.overflow |= common_.attr.add(e.proc.pid, e.aux);
  if (irq_threshold_ != 0 && total_ >= irq_threshold_) return kIrqStallThreshold;
  return 0;
}

void StallUnit::serialize(std::vector<uint8_t>& out) const {
  put_u32(out, uint32_t(per_core_.size()));
  put_u32(out, 0);
  put_u64(out, total_);
  for (uint64_t c : per_core_) put_u64(out, c);
  if (attribution_present()) common_.attr.serialize(out);
}

void StallUnit::reset() {
  MonitorUnit::reset();
  std::fill(per_core_.begin(), per_core_.end(), 0);
  total_ = 0;
}

std::vector<UnitParamDesc> StallUnit::param_layout() const {
  return {
      {0x10, "STALL_IRQ_THRESHOLD_LO", 0, 0, UINT32_MAX},
      {0x14, "STALL_IRQ_THRESHOLD_HI", 0, 0, UINT32_MAX},
  };
}

uint32_t StallUnit::read_param(uint32_t offset) const {
  switch (offset) {
    case 0x10: return uint32_t(irq_threshold_);
    case 0x14: return uint32_t(irq_threshold_ >> 32);
    default: return 0;
  }
}

void StallUnit::write_param(uint32_t offset, uint32_t value) {
  switch (offset) {
    case 0x10:
      irq_threshold_ = (irq_threshold_ & ~uint64_t(0xFFFFFFFF)) | value;
      break;
    case 0x14:
      irq_threshold_ = (irq_threshold_ & 0xFFFFFFFF) | uint64_t(value) << 32;
      break;
    default:
      break;
  }
}

std::unique_ptr<MonitorUnit> make_unit(UnitType t, unsigned ncores) {
  switch (t) {
    case UnitType::Hist: return std::make_unique<HistUnit>();
    case UnitType::Trace: return std::make_unique<TraceUnit>();
    case UnitType::Lat: return std::make_unique<LatUnit>();
    case UnitType::Stall: return std::make_unique<StallUnit>(ncores);
    default: return nullptr;
  }
}

}  // namespace abacus
