#include "abacus/driver.h"

#include <algorithm>

namespace abacus {

using namespace reg;

uint32_t Device::ioctl_read(uint32_t addr) const {
  check_open();
  return mon_->reg_read(addr);
}

void Device::ioctl_write(uint32_t addr, uint32_t value) {
  check_open();
  mon_->reg_write(addr, value);
}

Device::MappedView Device::map() {
  check_open();
  return MappedView(this);
}

int Device::alloc_page(size_t page_size) {
  check_open();
  int idx = mon_->alloc_page(page_size);
  if (idx < 0)
    throw DeviceError("page allocation limit (" +
                      std::to_string(mon_->page_limit()) + ") exceeded");
  return idx;
}

WaitResult Device::wait_irq(uint32_t cause_mask, uint64_t timeout_cycles) {
  check_open();
  cause_mask &= kIrqCauseMask;
  for (uint64_t stepped = 0;; ++stepped) {
    uint32_t hit = mon_->irq_pending() & cause_mask;
    if (hit) return {hit, false};
    if (stepped >= timeout_cycles || clock_ == nullptr) return {0, true};
    clock_->step_one();
  }
}

std::vector<RegWrite> Device::plan_configure(const MonitorConfig& cfg) const {
  std::vector<UnitType> installed;
  for (size_t i = 0; i < mon_->unit_count(); ++i) installed.push_back(mon_->unit_type(i));
  validate_monitor_config_against(cfg, installed);

  std::vector<RegWrite> w;
  std::vector<UnitSettings> units = cfg.units;
  std::sort(units.begin(), units.end(),
            [](const UnitSettings& a, const UnitSettings& b) { return a.index < b.index; });

  for (const UnitSettings& u : units) {
    uint32_t base = unit_window(u.index);
    if (const auto* h = std::get_if<HistParams>(&u.params)) {
      w.push_back({base + 0x10, uint32_t(h->base)});
      w.push_back({base + 0x14, uint32_t(h->base >> 32)});
      w.push_back({base + 0x18, h->shift});
      w.push_back({base + 0x1C, h->nbuckets});
    } else if (const auto* t = std::get_if<TraceParams>(&u.params)) {
      w.push_back({base + 0x10, t->capacity});
      w.push_back({base + 0x14, t->mode});
      w.push_back({base + 0x18,
                   TraceUnit::kKindMem | (t->include_instr ? TraceUnit::kKindInstr : 0)});
    } else if (const auto* l = std::get_if<LatParams>(&u.params)) {
      w.push_back({base + 0x10, l->bucket_width});
      w.push_back({base + 0x14, l->nbuckets});
      w.push_back({base + 0x18, l->irq_threshold});
    } else if (const auto* s = std::get_if<StallParams>(&u.params)) {
      w.push_back({base + 0x10, uint32_t(s->irq_threshold)});
      w.push_back({base + 0x14, uint32_t(s->irq_threshold >> 32)});
    }
    w.push_back({base + UNIT_PID, uint32_t(u.pid_filter ? *u.pid_filter : 0)});
    uint32_t ctrl = UCTRL_RESET | (u.core_mask & 0xFF) << UCTRL_CORE_MASK_SHIFT;
    if (u.enable) ctrl |= UCTRL_ENABLE;
    if (u.pid_filter) ctrl |= UCTRL_PID_FILTER_EN;
    if (u.attr_mode) ctrl |= UCTRL_ATTR_MODE;
    w.push_back({base + UNIT_CTRL, ctrl});
  }

  if (cfg.trigger_stop) {
    w.push_back({TRIG_STOP_ARG_LO, uint32_t(cfg.trigger_stop->arg)});
    w.push_back({TRIG_STOP_ARG_HI, uint32_t(cfg.trigger_stop->arg >> 32)});
    w.push_back({TRIG_STOP_MODE, cfg.trigger_stop->mode});
  }
  if (cfg.trigger_start) {
    w.push_back({TRIG_START_ARG_LO, uint32_t(cfg.trigger_start->arg)});
    w.push_back({TRIG_START_ARG_HI, uint32_t(cfg.trigger_start->arg >> 32)});
    w.push_back({TRIG_START_MODE, cfg.trigger_start->mode});
  }
  if (cfg.dma_on_stop)
    w.push_back({DMA_CTRL, *cfg.dma_on_stop ? DMA_ON_STOP : 0u});

  uint32_t global = CTRL_ENABLE;
  if (cfg.irq_enable && *cfg.irq_enable) global |= CTRL_IRQ_EN;
  w.push_back({GLOBAL_CTRL, global});
  return w;
}

void Device::configure(const MonitorConfig& cfg) {
  check_open();
  for (const RegWrite& rw : plan_configure(cfg)) mon_->reg_write(rw.addr, rw.value);
}

MonitorConfig Device::read_config() const {
  check_open();
  MonitorConfig cfg;
  cfg.trigger_start = TriggerSpec{
      mon_->reg_read(TRIG_START_MODE),
      uint64_t(mon_->reg_read(TRIG_START_ARG_HI)) << 32 | mon_->reg_read(TRIG_START_ARG_LO)};
  cfg.trigger_stop = TriggerSpec{
      mon_->reg_read(TRIG_STOP_MODE),
      uint64_t(mon_->reg_read(TRIG_STOP_ARG_HI)) << 32 | mon_->reg_read(TRIG_STOP_ARG_LO)};
  cfg.dma_on_stop = (mon_->reg_read(DMA_CTRL) & DMA_ON_STOP) != 0;
  cfg.irq_enable = (mon_->reg_read(GLOBAL_CTRL) & CTRL_IRQ_EN) != 0;

  for (size_t i = 0; i < mon_->unit_count(); ++i) {
    uint32_t base = unit_window(uint32_t(i));
    UnitSettings u;
    u.index = uint32_t(i);
    u.type = mon_->unit_type(i);
    uint32_t ctrl = mon_->reg_read(base + UNIT_CTRL);
    u.enable = ctrl & UCTRL_ENABLE;
    u.core_mask = ctrl >> UCTRL_CORE_MASK_SHIFT & 0xFF;
    u.attr_mode = ctrl & UCTRL_ATTR_MODE;
    if (ctrl & UCTRL_PID_FILTER_EN)
      u.pid_filter = uint16_t(mon_->reg_read(base + UNIT_PID));
    switch (u.type) {
      case UnitType::Hist: {
        HistParams p;
        p.base = uint64_t(mon_->reg_read(base + 0x14)) << 32 | mon_->reg_read(base + 0x10);
        p.shift = mon_->reg_read(base + 0x18);
        p.nbuckets = mon_->reg_read(base + 0x1C);
        u.params = p;
        break;
      }
      case UnitType::Trace: {
        TraceParams p;
        p.capacity = mon_->reg_read(base + 0x10);
        p.mode = mon_->reg_read(base + 0x14);
        p.include_instr = mon_->reg_read(base + 0x18) & TraceUnit::kKindInstr;
        u.params = p;
        break;
      }
      case UnitType::Lat: {
        LatParams p;
        p.bucket_width = mon_->reg_read(base + 0x10);
        p.nbuckets = mon_->reg_read(base + 0x14);
        p.irq_threshold = mon_->reg_read(base + 0x18);
        u.params = p;
        break;
      }
      case UnitType::Stall: {
        StallParams p;
        p.irq_threshold =
            uint64_t(mon_->reg_read(base + 0x14)) << 32 | mon_->reg_read(base + 0x10);
        u.params = p;
        break;
      }
      default:
        break;
    }
    cfg.units.push_back(std::move(u));
  }
  return cfg;
}

}  // namespace abacus
