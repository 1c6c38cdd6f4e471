#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "abacus/events.h"

namespace abacus {

enum class UnitType : uint32_t { Absent = 0, Hist = 1, Trace = 2, Lat = 3, Stall = 4 };

const char* unit_type_name(UnitType t);

// 64-bit saturating add; returns true when the counter pinned at the max.
inline bool sat_add(uint64_t& acc, uint64_t delta) {
  if (acc > UINT64_MAX - delta) {
    acc = UINT64_MAX;
    return true;
  }
  acc += delta;
  return false;
}

// Bounded per-PID accumulator table: 8 named slots filled in first-seen
// order, everything after that lands in the OTHER bucket (pid 0xFFFF).
// Nothing is evicted, so the values always sum to the unit total.
class AttributionTable {
 public:
  static constexpr size_t kCapacity = 8;

  // Returns true if a counter saturated.
  bool add(uint16_t pid, uint64_t delta);
  uint64_t lookup(uint16_t pid) const;  // kOtherPid selects the OTHER bucket
  void reset();

  // npids u32 (named + OTHER), pad u32, then {pid u32, pad u32, value u64}
  // entries in first-seen order with OTHER last.
  void serialize(std::vector<uint8_t>& out) const;

  const std::vector<std::pair<uint16_t, uint64_t>>& slots() const { return slots_; }
  uint64_t other() const { return other_; }

 private:
  std::vector<std::pair<uint16_t, uint64_t>> slots_;
  uint64_t other_ = 0;
};

// Enable and filter state common to every unit (mirrors UNIT_CTRL/UNIT_PID).
struct UnitCommon {
  bool enable = false;
  bool pid_filter_en = false;
  bool attr_mode = false;
  uint8_t core_mask = 0;
  uint16_t pid_filter = 0;
  bool overflow = false;
  AttributionTable attr;

  bool accepts(const CoreEvent& e) const {
    if (!(core_mask >> e.core & 1)) return false;
    if (pid_filter_en && e.proc.pid != pid_filter) return false;
    return true;
  }
};

// Relative layout of a unit's parameter registers within its window.
struct UnitParamDesc {
  uint32_t offset;  // relative to the window base
  const char* name;
  uint32_t reset;
  uint32_t clamp_lo;
  uint32_t clamp_hi;
  uint32_t mask = 0xFFFFFFFF;  // writable bits
};

// A pluggable performance-monitoring unit. Events reaching observe() have
// already passed the collection window and the common core/PID filters.
class MonitorUnit {
 public:
  explicit MonitorUnit(UnitType t) : type_(t) {}
  virtual ~MonitorUnit() = default;

  UnitType type() const { return type_; }
  UnitCommon& common() { return common_; }
  const UnitCommon& common() const { return common_; }

  // Returns a bitmask of interrupt causes raised by this observation.
  virtual uint32_t observe(const CoreEvent& e, bool ts_enabled) = 0;

  // Data image appended to out: unit payload then, when ATTR_MODE is set and
  // the unit supports attribution, the attribution block.
  virtual void serialize(std::vector<uint8_t>& out) const = 0;

  // Clears counters, entries, attribution and the overflow flag; parameter
  // registers are preserved.
  virtual void reset();

  virtual bool supports_attribution() const { return true; }
  bool attribution_present() const {
    return common_.attr_mode && supports_attribution();
  }

  // Per-PID accumulator readout; only meaningful with ATTR_MODE set.
  uint64_t attribution_lookup(uint16_t pid) const {
    if (!attribution_present())
      throw ConfigError("attribution lookup on a unit without ATTR_MODE");
    return common_.attr.lookup(pid);
  }

  // Parameter register window (offsets 0x10..0x2C within the unit window).
  virtual std::vector<UnitParamDesc> param_layout() const = 0;
  virtual uint32_t read_param(uint32_t offset) const = 0;
  virtual void write_param(uint32_t offset, uint32_t value) = 0;

  std::vector<uint8_t> payload() const {
    std::vector<uint8_t> out;
    serialize(out);
    return out;
  }

 protected:
  UnitType type_;
  UnitCommon common_;
};

// Memory-access address histogram: counts accesses into nbuckets buckets of
// 2^shift bytes starting at base; everything else goes to out_of_range.
class HistUnit : public MonitorUnit {
 public:
  static constexpr uint32_t kMaxBuckets = 4096;
  static constexpr uint32_t kDefaultBuckets = 256;
  static constexpr uint32_t kDefaultShift = 6;

  HistUnit() : MonitorUnit(UnitType::Hist) { counts_.assign(nbuckets_, 0); }

  uint32_t observe(const CoreEvent& e, bool ts_enabled) override;
  void serialize(std::vector<uint8_t>& out) const override;
  void reset() override;
  std::vector<UnitParamDesc> param_layout() const override;
  uint32_t read_param(uint32_t offset) const override;
  void write_param(uint32_t offset, uint32_t value) override;

  void configure(uint64_t base, uint32_t shift, uint32_t nbuckets);

  uint64_t base() const { return base_; }
  uint32_t shift() const { return shift_; }
  uint32_t nbuckets() const { return nbuckets_; }
  uint64_t out_of_range() const { return out_of_range_; }
  const std::vector<uint64_t>& counts() const { return counts_; }
  std::vector<uint64_t>& counts() { return counts_; }  // test injection

 private:
  uint64_t base_ = 0;
  uint32_t shift_ = kDefaultShift;
  uint32_t nbuckets_ = kDefaultBuckets;
  uint64_t out_of_range_ = 0;
  std::vector<uint64_t> counts_;
};

// Rolling trace of accesses (and optionally retired instructions).
struct TraceRecord {
  uint64_t timestamp = 0;
  uint64_t addr = 0;
  uint16_t pid = 0;
  uint8_t core = 0;
  uint8_t kind = 0;  // 0=read 1=write 2=instr
  uint16_t latency = 0;
  bool operator==(const TraceRecord&) const = default;
};

class TraceUnit : public MonitorUnit {
 public:
  static constexpr uint32_t kMaxCapacity = 65536;
  static constexpr uint32_t kDefaultCapacity = 1024;
  static constexpr uint32_t kModeWrap = 0;
  static constexpr uint32_t kModeStopOnFull = 1;
  static constexpr uint32_t kKindMem = 1u << 0;
  static constexpr uint32_t kKindInstr = 1u << 1;

  TraceUnit() : MonitorUnit(UnitType::Trace) {}

  uint32_t observe(const CoreEvent& e, bool ts_enabled) override;
  void serialize(std::vector<uint8_t>& out) const override;
  void reset() override;
  bool supports_attribution() const override { return false; }
  std::vector<UnitParamDesc> param_layout() const override;
  uint32_t read_param(uint32_t offset) const override;
  void write_param(uint32_t offset, uint32_t value) override;

  void configure(uint32_t capacity, uint32_t mode, uint32_t kinds);

  uint32_t capacity() const { return capacity_; }
  uint32_t mode() const { return mode_; }
  uint32_t count() const;
  uint64_t dropped() const { return dropped_; }
  std::vector<TraceRecord> entries_oldest_first() const;

 private:
  uint32_t capacity_ = kDefaultCapacity;
  uint32_t mode_ = kModeWrap;
  uint32_t kinds_ = kKindMem;
  std::vector<TraceRecord> ring_;
  uint64_t stored_ = 0;  // total records accepted into the ring
  uint64_t dropped_ = 0;
};

// Histogram of memory-access latencies: linear buckets of bucket_width
// cycles, with the last bucket collecting everything at or beyond
// bucket_width*(nbuckets-1).
class LatUnit : public MonitorUnit {
 public:
  static constexpr uint32_t kMaxBuckets = 4096;
  static constexpr uint32_t kDefaultBuckets = 64;
  static constexpr uint32_t kDefaultWidth = 4;

  LatUnit() : MonitorUnit(UnitType::Lat) { counts_.assign(nbuckets_, 0); }

  uint32_t observe(const CoreEvent& e, bool ts_enabled) override;
  void serialize(std::vector<uint8_t>& out) const override;
  void reset() override;
  std::vector<UnitParamDesc> param_layout() const override;
  uint32_t read_param(uint32_t offset) const override;
  void write_param(uint32_t offset, uint32_t value) override;

  void configure(uint32_t bucket_width, uint32_t nbuckets, uint32_t irq_threshold);

  uint32_t bucket_width() const { return bucket_width_; }
  uint32_t nbuckets() const { return nbuckets_; }
  uint32_t irq_threshold() const { return irq_threshold_; }
  const std::vector<uint64_t>& counts() const { return counts_; }
  std::vector<uint64_t>& counts() { return counts_; }

 private:
  uint32_t bucket_width_ = kDefaultWidth;
  uint32_t nbuckets_ = kDefaultBuckets;
  uint32_t irq_threshold_ = 0;  // 0 = disabled
  std::vector<uint64_t> counts_;
};

// Per-core stall-cycle accumulator.
class StallUnit : public MonitorUnit {
 public:
  explicit StallUnit(unsigned ncores)
      : MonitorUnit(UnitType::Stall), per_core_(ncores, 0) {}

  uint32_t observe(const CoreEvent& e, bool ts_enabled) override;
  void serialize(std::vector<uint8_t>& out) const override;
  void reset() override;
  std::vector<UnitParamDesc> param_layout() const override;
  uint32_t read_param(uint32_t offset) const override;
  void write_param(uint32_t offset, uint32_t value) override;

  void set_irq_threshold(uint64_t t) { irq_threshold_ = t; }
  uint64_t irq_threshold() const { return irq_threshold_; }
  uint64_t total() const { return total_; }
  const std::vector<uint64_t>& per_core() const { return per_core_; }

 private:
  uint64_t irq_threshold_ = 0;  // 0 = disabled
  uint64_t total_ = 0;
  std::vector<uint64_t> per_core_;
};

std::unique_ptr<MonitorUnit> make_unit(UnitType t, unsigned ncores);

}  // namespace abacus
