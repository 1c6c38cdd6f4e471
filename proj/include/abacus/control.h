#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "abacus/events.h"

namespace abacus {

// Trigger modes. Mode 0 reads as IMMEDIATE for a start trigger and NEVER for
// a stop trigger; modes above kTriggerModeMax are invalid and fire never.
inline constexpr uint32_t kTrigImmediateOrNever = 0;
inline constexpr uint32_t kTrigCycleCount = 1;
inline constexpr uint32_t kTrigMemAddrAccess = 2;
inline constexpr uint32_t kTrigInstrAddr = 3;
inline constexpr uint32_t kTrigPidScheduled = 4;
inline constexpr uint32_t kTriggerModeMax = 4;

inline bool trigger_mode_valid(uint32_t mode) { return mode <= kTriggerModeMax; }

struct TriggerSpec {
  uint32_t mode = kTrigImmediateOrNever;
  uint64_t arg = 0;
  bool operator==(const TriggerSpec&) const = default;
};

enum class TriggerRole { Start, Stop };

// Pure condition check against one cycle's event batch. Invalid modes never
// fire (the owning monitor surfaces the configuration error separately).
bool trigger_fires(const TriggerSpec& spec, TriggerRole role, uint64_t cycle,
                   std::span<const CoreEvent> events);

enum class WindowPhase : uint8_t { Armed, Active, Done };

struct WindowState {
  WindowPhase phase = WindowPhase::Armed;
  std::optional<uint64_t> start_cycle;
  std::optional<uint64_t> stop_cycle;
  bool operator==(const WindowState&) const = default;
};

// Interrupt cause bits (IRQ_CAUSE / IRQ_ACK layout).
inline constexpr uint32_t kIrqTriggerStop = 1u << 0;
inline constexpr uint32_t kIrqTraceFull = 1u << 1;
inline constexpr uint32_t kIrqLatThreshold = 1u << 2;
inline constexpr uint32_t kIrqStallThreshold = 1u << 3;
inline constexpr uint32_t kIrqDmaDone = 1u << 4;
inline constexpr uint32_t kIrqCauseMask = 0x1F;

// Trigger-window state machine plus latched interrupt causes. One-shot:
// ARMED -> ACTIVE -> DONE, rearmed by writing either trigger mode register.
class ControlLogic {
 public:
  struct StepResult {
    bool collect = false;    // units observe this cycle's events
    bool stop_fired = false; // window closed after this cycle
  };

  // Evaluates start then stop against this cycle. The cycle that fires the
  // start trigger is itself collected; the one that fires the stop trigger is
  // collected and then the window closes.
  StepResult step(uint64_t cycle, std::span<const CoreEvent> events);

  void rearm() { window_ = WindowState{}; }
  const WindowState& window() const { return window_; }

  void post(uint32_t causes) { pending_ |= causes & kIrqCauseMask; }
  void ack(uint32_t mask) { pending_ &= ~(mask & kIrqCauseMask); }
  uint32_t pending() const { return pending_; }
  bool irq_line(bool irq_enabled) const { return pending_ != 0 && irq_enabled; }
  void clear_pending() { pending_ = 0; }

  TriggerSpec start_spec;
  TriggerSpec stop_spec;

 private:
  WindowState window_;
  uint32_t pending_ = 0;
};

}  // namespace abacus
