#include "abacus/monitor.h"

#include <algorithm>
#include <cassert>

#include "abacus/bytes.h"
#include "abacus/errors.h"

namespace abacus {

using namespace reg;

Monitor::Monitor(unsigned ncores, std::vector<UnitType> installed, size_t page_limit)
    : ncores_(ncores), page_limit_(page_limit) {
  assert(installed.size() <= kMaxUnits);
  for (UnitType t : installed) {
    auto u = make_unit(t, ncores_);
    assert(u && "absent slots are not installable");
    units_.push_back(std::move(u));
  }
  data_index_.assign(units_.size(), 0);
}

bool Monitor::collection_active() const {
  return enable_ && control_.window().phase == WindowPhase::Active;
}

// ----------------------------------------------------------------- stepping

void Monitor::step(std::span<const CoreEvent> events) {
  bool stop_fired = false;
  if (enable_) {
    auto res = control_.step(cycle_, events);
    if (res.collect) {
      uint32_t irqs = 0;
      for (auto& u : units_) {
        const UnitCommon& c = u->common();
        if (!c.enable) continue;
        for (const CoreEvent& e : events) {
          if (!c.accepts(e)) continue;
          irqs |= u->observe(e, ts_en_);
        }
      }
      if (irqs) control_.post(irqs);
    }
    if (res.stop_fired) {
      control_.post(kIrqTriggerStop);
      stop_fired = true;
    }
  }
  if (!dma_contention_) dma_advance(4);
  cycle_++;
  // Trigger-stop snapshot freezes at the boundary after the stop cycle.
  if (stop_fired && dma_on_stop_ && !dma_busy_) start_dma();
}

// ---------------------------------------------------------------------- DMA

std::vector<uint8_t> Monitor::build_snapshot_image() const {
  std::vector<uint8_t> img;
  put_u32(img, kPageMagic);
  put_u32(img, kPageVersion);
  put_u64(img, cycle_);
  uint32_t nrecords = 0;
  for (const auto& u : units_)
    if (u->common().enable) nrecords++;
  put_u32(img, nrecords);
  put_u32(img, 0);
  for (size_t i = 0; i < units_.size(); ++i) {
    const auto& u = units_[i];
    if (!u->common().enable) continue;
    std::vector<uint8_t> payload = u->payload();
    put_u32(img, uint32_t(u->type()));
    put_u32(img, uint32_t(i));
    put_u32(img, uint32_t(payload.size()));
    uint32_t flags = 0;
    if (u->common().overflow) flags |= kFlagOverflow;
    if (u->attribution_present()) flags |= kFlagAttrPresent;
    put_u32(img, flags);
    img.insert(img.end(), payload.begin(), payload.end());
  }
  return img;
}

void Monitor::start_dma() {
  if (dma_busy_) return;  // START while busy is ignored
  dma_overflow_ = false;
  if (dma_dest_ >= pages_.size()) {
    cfg_err_ = true;
    return;
  }
  std::vector<uint8_t> img = build_snapshot_image();
  std::vector<uint8_t>& page = pages_[dma_dest_];
  if (img.size() > page.size()) {
    // Abort: flag the overflow and leave only a header with nrecords=0.
    dma_overflow_ = true;
    std::vector<uint8_t> hdr;
    put_u32(hdr, kPageMagic);
    put_u32(hdr, kPageVersion);
    put_u64(hdr, cycle_);
    put_u32(hdr, 0);
    put_u32(hdr, 0);
    std::copy(hdr.begin(), hdr.end(), page.begin());
    return;
  }
  dma_image_ = std::move(img);
  dma_written_ = 0;
  dma_active_dest_ = dma_dest_;
  dma_busy_ = true;
}

void Monitor::dma_advance(size_t max_bytes) {
  if (!dma_busy_) return;
  size_t n = std::min(max_bytes, dma_image_.size() - dma_written_);
  std::copy_n(dma_image_.begin() + dma_written_, n,
              pages_[dma_active_dest_].begin() + dma_written_);
  dma_written_ += n;
  if (dma_written_ == dma_image_.size()) {
    dma_busy_ = false;
    dma_done_ = true;
    control_.post(kIrqDmaDone);
  }
}

void Monitor::dma_bus_granted(uint32_t cycles) { dma_advance(size_t(cycles) * 4); }

int Monitor::alloc_page(size_t bytes) {
  if (pages_.size() >= page_limit_) return -1;
  pages_.emplace_back(bytes, 0);
  return int(pages_.size()) - 1;
}

std::span<const uint8_t> Monitor::page_bytes(size_t idx) const {
  return pages_.at(idx);
}

// -------------------------------------------------------------------- reset

void Monitor::global_reset() {
  for (auto& u : units_) u->reset();
  control_.rearm();
  control_.clear_pending();
  cfg_err_ = false;
  dma_busy_ = false;
  dma_done_ = false;
  dma_overflow_ = false;
  dma_image_.clear();
  dma_written_ = 0;
  // cycle_ intentionally preserved; configuration registers preserved.
}

// ----------------------------------------------------------- register space

static void check_addr(uint32_t addr) {
  if (addr % 4 != 0 || addr >= kSpaceSize) throw AddressFault(addr);
}

uint32_t Monitor::reg_read(uint32_t addr) const {
  check_addr(addr);
  if (addr < UNIT_BASE) return read_global(addr);
  size_t i = (addr - UNIT_BASE) / UNIT_STRIDE;
  uint32_t off = (addr - UNIT_BASE) % UNIT_STRIDE;
  if (i >= units_.size()) return 0;  // absent window
  return read_unit(i, off);
}

void Monitor::reg_write(uint32_t addr, uint32_t value) {
  check_addr(addr);
  if (addr < UNIT_BASE) {
    write_global(addr, value);
    return;
  }
  size_t i = (addr - UNIT_BASE) / UNIT_STRIDE;
  uint32_t off = (addr - UNIT_BASE) % UNIT_STRIDE;
  if (i >= units_.size()) return;
  write_unit(i, off, value);
}

uint32_t Monitor::read_global(uint32_t addr) const {
  switch (addr) {
    case GLOBAL_CTRL:
      return (enable_ ? CTRL_ENABLE : 0) | (irq_en_ ? CTRL_IRQ_EN : 0);
    case GLOBAL_STATUS: {
      uint32_t v = uint32_t(units_.size()) << STATUS_UNIT_COUNT_SHIFT;
      if (collection_active()) v |= STATUS_RUNNING;
      if (control_.irq_line(irq_en_)) v |= STATUS_IRQ_PENDING;
      if (control_.window().phase != WindowPhase::Armed) v |= STATUS_TRIGGERED;
      if (cfg_err_) v |= STATUS_CFG_ERR;
      return v;
    }
    case CYCLE_LO: return uint32_t(cycle_);
    case CYCLE_HI: return uint32_t(cycle_ >> 32);
    case TRIG_START_MODE: return control_.start_spec.mode;
    case TRIG_START_ARG_LO: return uint32_t(control_.start_spec.arg);
    case TRIG_START_ARG_HI: return uint32_t(control_.start_spec.arg >> 32);
    case TRIG_STOP_MODE: return control_.stop_spec.mode;
    case TRIG_STOP_ARG_LO: return uint32_t(control_.stop_spec.arg);
    case TRIG_STOP_ARG_HI: return uint32_t(control_.stop_spec.arg >> 32);
    case IRQ_CAUSE: return control_.pending();
    case IRQ_ACK: return 0;
    case TS_CTRL: return ts_en_ ? 1 : 0;
    case DMA_CTRL: return dma_on_stop_ ? DMA_ON_STOP : 0;
    case DMA_DEST: return dma_dest_;
    case DMA_STATUS:
      return (dma_busy_ ? DMA_BUSY : 0) | (dma_done_ ? DMA_DONE : 0) |
             (dma_overflow_ ? DMA_OVERFLOW : 0);
    default: return 0;  // reserved
  }
}

void Monitor::write_global(uint32_t addr, uint32_t value) {
  switch (addr) {
    case GLOBAL_CTRL:
      enable_ = value & CTRL_ENABLE;
      irq_en_ = value & CTRL_IRQ_EN;
      if (value & CTRL_RESET) global_reset();
      break;
    case TRIG_START_MODE:
      control_.start_spec.mode = value;
      if (!trigger_mode_valid(value)) cfg_err_ = true;
      control_.rearm();
      break;
    case TRIG_START_ARG_LO:
      control_.start_spec.arg = (control_.start_spec.arg & ~uint64_t(0xFFFFFFFF)) | value;
      break;
    case TRIG_START_ARG_HI:
      control_.start_spec.arg =
          (control_.start_spec.arg & 0xFFFFFFFF) | uint64_t(value) << 32;
      break;
    case TRIG_STOP_MODE:
      control_.stop_spec.mode = value;
      if (!trigger_mode_valid(value)) cfg_err_ = true;
      control_.rearm();
      break;
    case TRIG_STOP_ARG_LO:
      control_.stop_spec.arg = (control_.stop_spec.arg & ~uint64_t(0xFFFFFFFF)) | value;
      break;
    case TRIG_STOP_ARG_HI:
      control_.stop_spec.arg =
          (control_.stop_spec.arg & 0xFFFFFFFF) | uint64_t(value) << 32;
      break;
    case IRQ_ACK:
      control_.ack(value);
      if (value & kIrqDmaDone) dma_done_ = false;
      break;
    case TS_CTRL:
      ts_en_ = value & 1;
      break;
    case DMA_CTRL:
      dma_on_stop_ = value & DMA_ON_STOP;
      if (value & DMA_START) start_dma();
      break;
    case DMA_DEST:
      dma_dest_ = value;
      break;
    default:
      break;  // RO and reserved offsets ignore writes
  }
}

uint32_t Monitor::read_unit(size_t i, uint32_t off) const {
  const MonitorUnit& u = *units_[i];
  const UnitCommon& c = u.common();
  switch (off) {
    case UNIT_ID: return uint32_t(u.type());
    case UNIT_CTRL:
      return (c.enable ? UCTRL_ENABLE : 0) | (c.pid_filter_en ? UCTRL_PID_FILTER_EN : 0) |
             (c.attr_mode ? UCTRL_ATTR_MODE : 0) |
             uint32_t(c.core_mask) << UCTRL_CORE_MASK_SHIFT;
    case UNIT_PID: return c.pid_filter;
    case UNIT_STATUS: {
      uint32_t v = 0;
      if (c.enable && collection_active()) v |= USTATUS_ACTIVE;
      if (c.overflow) v |= USTATUS_OVERFLOW;
      return v;
    }
    case UNIT_DATA_INDEX: return data_index_[i];
    case UNIT_DATA_VALUE: {
      std::vector<uint8_t> payload = u.payload();
      size_t byte = size_t(data_index_[i]) * 4;
      if (byte + 4 > payload.size()) return 0;
      return get_u32(payload, byte);
    }
    default:
      if (off >= UNIT_PARAM_FIRST && off <= UNIT_PARAM_LAST) return u.read_param(off);
      return 0;
  }
}

void Monitor::write_unit(size_t i, uint32_t off, uint32_t value) {
  MonitorUnit& u = *units_[i];
  UnitCommon& c = u.common();
  switch (off) {
    case UNIT_CTRL:
      c.enable = value & UCTRL_ENABLE;
      c.pid_filter_en = value & UCTRL_PID_FILTER_EN;
      c.attr_mode = value & UCTRL_ATTR_MODE;
      c.core_mask = uint8_t(value >> UCTRL_CORE_MASK_SHIFT);
      if (value & UCTRL_RESET) u.reset();
      break;
    case UNIT_PID:
      c.pid_filter = uint16_t(value);
      break;
    case UNIT_DATA_INDEX:
      data_index_[i] = value;
      break;
    default:
      if (off >= UNIT_PARAM_FIRST && off <= UNIT_PARAM_LAST) u.write_param(off, value);
      break;  // UNIT_ID/UNIT_STATUS/DATA_VALUE are RO
  }
}

std::vector<RegisterDesc> Monitor::map_layout() const {
  std::vector<RegisterDesc> m;
  uint32_t status_reset = uint32_t(units_.size()) << STATUS_UNIT_COUNT_SHIFT;
  m.push_back({GLOBAL_CTRL, "GLOBAL_CTRL", RegAccess::RW, 0,
               CTRL_ENABLE | CTRL_RESET | CTRL_IRQ_EN, CTRL_RESET, 0, UINT32_MAX});
  m.push_back({GLOBAL_STATUS, "GLOBAL_STATUS", RegAccess::RO, status_reset});
  m.push_back({CYCLE_LO, "CYCLE_LO", RegAccess::RO, 0});
  m.push_back({CYCLE_HI, "CYCLE_HI", RegAccess::RO, 0});
  m.push_back({TRIG_START_MODE, "TRIG_START_MODE", RegAccess::RW, 0});
  m.push_back({TRIG_START_ARG_LO, "TRIG_START_ARG_LO", RegAccess::RW, 0});
  m.push_back({TRIG_START_ARG_HI, "TRIG_START_ARG_HI", RegAccess::RW, 0});
  m.push_back({TRIG_STOP_MODE, "TRIG_STOP_MODE", RegAccess::RW, 0});
  m.push_back({TRIG_STOP_ARG_LO, "TRIG_STOP_ARG_LO", RegAccess::RW, 0});
  m.push_back({TRIG_STOP_ARG_HI, "TRIG_STOP_ARG_HI", RegAccess::RW, 0});
  m.push_back({IRQ_CAUSE, "IRQ_CAUSE", RegAccess::RO, 0});
  m.push_back({IRQ_ACK, "IRQ_ACK", RegAccess::W1C, 0, kIrqCauseMask});
  m.push_back({TS_CTRL, "TS_CTRL", RegAccess::RW, 1, 0x1});
  m.push_back({DMA_CTRL, "DMA_CTRL", RegAccess::RW, 0, DMA_START | DMA_ON_STOP,
               DMA_START, 0, UINT32_MAX});
  m.push_back({DMA_DEST, "DMA_DEST", RegAccess::RW, 0});
  m.push_back({DMA_STATUS, "DMA_STATUS", RegAccess::RO, 0});

  for (size_t i = 0; i < units_.size(); ++i) {
    uint32_t base = unit_window(uint32_t(i));
    std::string p = "U" + std::to_string(i) + "_";
    m.push_back({base + UNIT_ID, p + "ID", RegAccess::RO, uint32_t(units_[i]->type())});
    m.push_back({base + UNIT_CTRL, p + "CTRL", RegAccess::RW, 0,
                 UCTRL_ENABLE | UCTRL_RESET | UCTRL_PID_FILTER_EN | UCTRL_ATTR_MODE |
                     (0xFFu << UCTRL_CORE_MASK_SHIFT),
                 UCTRL_RESET, 0, UINT32_MAX});
    m.push_back({base + UNIT_PID, p + "PID", RegAccess::RW, 0, 0xFFFF});
    m.push_back({base + UNIT_STATUS, p + "STATUS", RegAccess::RO, 0});
    for (const UnitParamDesc& d : units_[i]->param_layout())
      m.push_back({base + d.offset, p + d.name, RegAccess::RW, d.reset, d.mask, 0,
                   d.clamp_lo, d.clamp_hi});
    m.push_back({base + UNIT_DATA_INDEX, p + "DATA_INDEX", RegAccess::RW, 0});
    m.push_back({base + UNIT_DATA_VALUE, p + "DATA_VALUE", RegAccess::RO, 0});
  }
  return m;
}

}  // namespace abacus
