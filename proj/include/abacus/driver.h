#pragma once

#include <cstdint>
#include <vector>

#include "abacus/monitor.h"
#include "abacus/monitor_config.h"

namespace abacus {

// Something that can advance the shared simulation by one cycle (the live
// system, or a log replayer). wait_irq drives this while blocked.
class ClockSource {
 public:
  virtual ~ClockSource() = default;
  virtual void step_one() = 0;
};

struct RegWrite {
  uint32_t addr;
  uint32_t value;
  bool operator==(const RegWrite&) const = default;
};

struct WaitResult {
  uint32_t fired = 0;  // pending & requested mask at return
  bool timed_out = false;
};

// In-process device-driver analogue: single-register access (ioctl path), a
// mapped view of the whole register space, kernel-page allocation, interrupt
// waiting and a configuration convenience layer. One handle per monitor; all
// calls happen between cycles on the owning context.
class Device {
 public:
  explicit Device(Monitor& mon, ClockSource* clock = nullptr)
      : mon_(&mon), clock_(clock) {}

  void close() { open_ = false; }
  bool is_open() const { return open_; }

  uint32_t ioctl_read(uint32_t addr) const;
  void ioctl_write(uint32_t addr, uint32_t value);

  // Full-address-space view; identical semantics to the ioctl path.
  class MappedView {
   public:
    uint32_t read(uint32_t addr) const { return dev_->ioctl_read(addr); }
    void write(uint32_t addr, uint32_t value) { dev_->ioctl_write(addr, value); }

   private:
    friend class Device;
    explicit MappedView(Device* d) : dev_(d) {}
    Device* dev_;
  };
  MappedView map();

  // Fresh zero-filled page usable as DMA_DEST; throws DeviceError once the
  // allocation limit is exceeded.
  int alloc_page(size_t page_size = kDefaultPageSize);

  // Advances the co-owned simulation until (pending & cause_mask) != 0 or
  // timeout_cycles cycles have been stepped. Does not ack.
  WaitResult wait_irq(uint32_t cause_mask, uint64_t timeout_cycles);

  // Expands cfg into the exact register-write sequence: units ascending
  // (params, pid, ctrl with reset), stop trigger, start trigger, DMA control,
  // global enable last. Invalid configs are rejected atomically.
  std::vector<RegWrite> plan_configure(const MonitorConfig& cfg) const;
  void configure(const MonitorConfig& cfg);

  // Current register state as a config; configure(cfg) then read_config()
  // reproduces cfg for fully-specified configs.
  MonitorConfig read_config() const;

  Monitor& monitor() { return *mon_; }

 private:
  void check_open() const {
    if (!open_) throw DeviceError("device handle is closed");
  }

  Monitor* mon_;
  ClockSource* clock_;
  bool open_ = true;
};

}  // namespace abacus
