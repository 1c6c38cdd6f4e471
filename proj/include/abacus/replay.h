#pragma once

#include "abacus/driver.h"
#include "abacus/events.h"
#include "abacus/monitor.h"

namespace abacus {

// Feeds a recorded event log through an attached monitor exactly as the live
// system would: one step per cycle, empty cycles included, idle stepping once
// the log is exhausted. The log must be sorted by cycle.
class LogReplayer : public ClockSource {
 public:
  LogReplayer(const EventLog& log, Monitor& mon) : log_(&log), mon_(&mon) {}

  void step_one() override {
    uint64_t cyc = mon_->cycle();
    size_t begin = pos_;
    while (pos_ < log_->size() && (*log_)[pos_].cycle == cyc) pos_++;
    mon_->step(std::span<const CoreEvent>(log_->data() + begin, pos_ - begin));
  }

  bool exhausted() const { return pos_ >= log_->size(); }

 private:
  const EventLog* log_;
  Monitor* mon_;
  size_t pos_ = 0;
};

}  // namespace abacus
