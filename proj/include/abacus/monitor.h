#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "abacus/control.h"
#include "abacus/regmap.h"
#include "abacus/snapshot.h"
#include "abacus/units.h"

namespace abacus {

// The monitor device model: register space, control logic, the installed
// monitoring units, the DMA engine and the simulated OS pages it writes to.
//
// The monitor is stepped once per simulated cycle with that cycle's snooped
// events. Register access is serialized with stepping: reads and writes
// happen only between cycles. The cycle counter counts stepped cycles since
// power-on and survives GLOBAL_CTRL.RESET so that timestamps stay comparable
// across reconfigurations.
class Monitor {
 public:
  Monitor(unsigned ncores, std::vector<UnitType> installed,
          size_t page_limit = 16);

  // ---- memory-mapped register space ----
  uint32_t reg_read(uint32_t addr) const;       // throws AddressFault
  void reg_write(uint32_t addr, uint32_t value);
  std::vector<RegisterDesc> map_layout() const;

  // ---- stepping ----
  void step(std::span<const CoreEvent> events);
  uint64_t cycle() const { return cycle_; }

  // ---- simulated OS pages (DMA destinations) ----
  int alloc_page(size_t bytes = kDefaultPageSize);  // -1 once the limit is hit
  size_t page_count() const { return pages_.size(); }
  size_t page_limit() const { return page_limit_; }
  std::span<const uint8_t> page_bytes(size_t idx) const;

  // ---- introspection ----
  unsigned ncores() const { return ncores_; }
  size_t unit_count() const { return units_.size(); }
  UnitType unit_type(size_t i) const {
    return i < units_.size() ? units_[i]->type() : UnitType::Absent;
  }
  MonitorUnit& unit(size_t i) { return *units_[i]; }
  const MonitorUnit& unit(size_t i) const { return *units_[i]; }
  std::vector<uint8_t> unit_payload(size_t i) const { return units_[i]->payload(); }

  bool enabled() const { return enable_; }
  bool cfg_error() const { return cfg_err_; }
  const WindowState& window() const { return control_.window(); }
  uint32_t irq_pending() const { return control_.pending(); }
  bool dma_busy() const { return dma_busy_; }
  bool dma_done() const { return dma_done_; }
  bool dma_overflowed() const { return dma_overflow_; }

  // Frozen image of all enabled units as the DMA engine would copy it now.
  std::vector<uint8_t> build_snapshot_image() const;

  // ---- DMA bus coupling ----
  // Default: the transfer runs on a dedicated port at 4 bytes per stepped
  // cycle and never touches the host bus. In contention mode the engine
  // instead requests the host bus and moves data only when granted.
  void set_dma_contention(bool on) { dma_contention_ = on; }
  bool dma_contention() const { return dma_contention_; }
  bool dma_wants_bus() const { return dma_contention_ && dma_busy_; }
  void dma_bus_granted(uint32_t cycles);  // moves 4*cycles bytes

 private:
  void global_reset();
  void start_dma();
  void dma_advance(size_t max_bytes);
  uint32_t read_global(uint32_t addr) const;
  void write_global(uint32_t addr, uint32_t value);
  uint32_t read_unit(size_t i, uint32_t off) const;
  void write_unit(size_t i, uint32_t off, uint32_t value);
  bool collection_active() const;

  unsigned ncores_;
  std::vector<std::unique_ptr<MonitorUnit>> units_;
  std::vector<uint32_t> data_index_;

  uint64_t cycle_ = 0;
  bool enable_ = false;
  bool irq_en_ = false;
  bool ts_en_ = true;
  bool cfg_err_ = false;

  ControlLogic control_;

  bool dma_on_stop_ = false;
  uint32_t dma_dest_ = 0;
  bool dma_busy_ = false;
  bool dma_done_ = false;
  bool dma_overflow_ = false;
  bool dma_contention_ = false;
  std::vector<uint8_t> dma_image_;
  size_t dma_written_ = 0;
  uint32_t dma_active_dest_ = 0;

  std::vector<std::vector<uint8_t>> pages_;
  size_t page_limit_;
};

}  // namespace abacus
