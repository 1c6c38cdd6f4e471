#include "abacus/control.h"

namespace abacus {

bool trigger_fires(const TriggerSpec& spec, TriggerRole role, uint64_t cycle,
                   std::span<const CoreEvent> events) {
  switch (spec.mode) {
    case kTrigImmediateOrNever:
      return role == TriggerRole::Start;
    case kTrigCycleCount:
      return cycle >= spec.arg;
    case kTrigMemAddrAccess:
      for (const CoreEvent& e : events)
        if (e.kind == EventKind::MemAccess && e.addr == spec.arg) return true;
      return false;
    case kTrigInstrAddr:
      for (const CoreEvent& e : events)
        if (e.kind == EventKind::InstrRetired && e.addr == spec.arg) return true;
      return false;
    case kTrigPidScheduled:
      for (const CoreEvent& e : events)
        if (e.kind == EventKind::ContextSwitch &&
            unpack_proc(e.aux).pid == uint16_t(spec.arg & 0xFFFF))
          return true;
      return false;
    default:
      return false;  // invalid mode: never fires
  }
}

ControlLogic::StepResult ControlLogic::step(uint64_t cycle,
                                            std::span<const CoreEvent> events) {
  StepResult r;
  if (window_.phase == WindowPhase::Armed &&
      trigger_fires(start_spec, TriggerRole::Start, cycle, events)) {
    window_.phase = WindowPhase::Active;
    window_.start_cycle = cycle;
  }
  if (window_.phase == WindowPhase::Active) {
    r.collect = true;
    if (trigger_fires(stop_spec, TriggerRole::Stop, cycle, events)) {
      window_.phase = WindowPhase::Done;
      window_.stop_cycle = cycle;
      r.stop_fired = true;
    }
  }
  return r;
}

}  // namespace abacus
