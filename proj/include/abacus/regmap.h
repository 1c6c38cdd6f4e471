#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace abacus {

// Memory-mapped register space: 0x1000 bytes of 32-bit little-endian words.
// Global block at [0x000, 0x100), then up to 16 unit windows of 0x100 bytes
// each at 0x100 + i*0x100. Reserved offsets read as 0 and ignore writes;
// read-only registers ignore writes; self-clearing bits read back as 0.
namespace reg {

inline constexpr uint32_t kSpaceSize = 0x1000;
inline constexpr uint32_t kMaxUnits = 15;  // windows 0x100..0xF00

inline constexpr uint32_t GLOBAL_CTRL = 0x000;
inline constexpr uint32_t GLOBAL_STATUS = 0x004;
inline constexpr uint32_t CYCLE_LO = 0x008;
inline constexpr uint32_t CYCLE_HI = 0x00C;
inline constexpr uint32_t TRIG_START_MODE = 0x010;
inline constexpr uint32_t TRIG_START_ARG_LO = 0x014;
inline constexpr uint32_t TRIG_START_ARG_HI = 0x018;
inline constexpr uint32_t TRIG_STOP_MODE = 0x01C;
inline constexpr uint32_t TRIG_STOP_ARG_LO = 0x020;
inline constexpr uint32_t TRIG_STOP_ARG_HI = 0x024;
inline constexpr uint32_t IRQ_CAUSE = 0x028;
inline constexpr uint32_t IRQ_ACK = 0x02C;
inline constexpr uint32_t TS_CTRL = 0x030;
inline constexpr uint32_t DMA_CTRL = 0x080;
inline constexpr uint32_t DMA_DEST = 0x084;
inline constexpr uint32_t DMA_STATUS = 0x088;

inline constexpr uint32_t UNIT_BASE = 0x100;
inline constexpr uint32_t UNIT_STRIDE = 0x100;

// Offsets within a unit window.
inline constexpr uint32_t UNIT_ID = 0x00;
inline constexpr uint32_t UNIT_CTRL = 0x04;
inline constexpr uint32_t UNIT_PID = 0x08;
inline constexpr uint32_t UNIT_STATUS = 0x0C;
inline constexpr uint32_t UNIT_PARAM_FIRST = 0x10;
inline constexpr uint32_t UNIT_PARAM_LAST = 0x2C;
inline constexpr uint32_t UNIT_DATA_INDEX = 0x30;
inline constexpr uint32_t UNIT_DATA_VALUE = 0x34;

// GLOBAL_CTRL bits.
inline constexpr uint32_t CTRL_ENABLE = 1u << 0;
inline constexpr uint32_t CTRL_RESET = 1u << 1;  // write-1, self-clearing
inline constexpr uint32_t CTRL_IRQ_EN = 1u << 2;

// GLOBAL_STATUS bits.
inline constexpr uint32_t STATUS_RUNNING = 1u << 0;
inline constexpr uint32_t STATUS_IRQ_PENDING = 1u << 1;
inline constexpr uint32_t STATUS_TRIGGERED = 1u << 2;
inline constexpr uint32_t STATUS_CFG_ERR = 1u << 3;
inline constexpr uint32_t STATUS_UNIT_COUNT_SHIFT = 8;

// UNIT_CTRL bits.
inline constexpr uint32_t UCTRL_ENABLE = 1u << 0;
inline constexpr uint32_t UCTRL_RESET = 1u << 1;  // write-1, self-clearing
inline constexpr uint32_t UCTRL_PID_FILTER_EN = 1u << 2;
inline constexpr uint32_t UCTRL_ATTR_MODE = 1u << 3;
inline constexpr uint32_t UCTRL_CORE_MASK_SHIFT = 16;

// UNIT_STATUS bits.
inline constexpr uint32_t USTATUS_ACTIVE = 1u << 0;
inline constexpr uint32_t USTATUS_OVERFLOW = 1u << 1;

// DMA_CTRL bits.
inline constexpr uint32_t DMA_START = 1u << 0;  // write-1, self-clearing
inline constexpr uint32_t DMA_ON_STOP = 1u << 1;

// DMA_STATUS bits.
inline constexpr uint32_t DMA_BUSY = 1u << 0;
inline constexpr uint32_t DMA_DONE = 1u << 1;
inline constexpr uint32_t DMA_OVERFLOW = 1u << 2;

inline constexpr uint32_t unit_window(uint32_t index) {
  return UNIT_BASE + index * UNIT_STRIDE;
}

}  // namespace reg

enum class RegAccess { RO, RW, W1C };

// Self-description of one register, enough to predict write-then-read
// behavior: readback of an RW register is clamp(value & write_mask) with
// self-clearing bits reading 0; W1C registers read as 0.
struct RegisterDesc {
  uint32_t offset;
  std::string name;
  RegAccess access;
  uint32_t reset;
  uint32_t write_mask = 0xFFFFFFFF;
  uint32_t self_clear = 0;
  uint32_t clamp_lo = 0;
  uint32_t clamp_hi = 0xFFFFFFFF;

  uint32_t predict_readback(uint32_t written) const {
    uint32_t v = written & write_mask;
    if (v < clamp_lo) v = clamp_lo;
    if (v > clamp_hi) v = clamp_hi;
    return v & ~self_clear;
  }
};

}  // namespace abacus
