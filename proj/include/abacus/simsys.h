#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "abacus/driver.h"
#include "abacus/events.h"
#include "abacus/monitor.h"

namespace abacus {

// Deterministic simulated multicore host: cores running synthetic programs,
// one direct-mapped cache per core, a shared round-robin bus, and a
// time-slicing scheduler. Emits the snooped CoreEvent stream.

struct CacheConfig {
  uint64_t size_bytes = 4096;
  uint64_t line_bytes = 64;
  // hit latency is fixed at 1 cycle; miss cost comes from bus + memory
};

struct BusConfig {
  uint32_t transfer_cycles = 4;  // bus occupancy per line; 0 = transparent bus
  bool dma_contention = false;   // monitor DMA competes for this bus
};

struct MemoryConfig {
  uint32_t latency_cycles = 20;
  uint64_t size_bytes = uint64_t(1) << 32;
};

struct SchedulerConfig {
  uint64_t quantum_cycles = 10000;
  uint32_t context_switch_cost_cycles = 0;
  bool pinned = false;  // default: one global run queue, threads migrate
};

enum class Pattern { SeqScan, Strided, RandomUniform, HotCold };

struct Region {
  uint64_t base = 0;
  uint64_t size_bytes = 0;
};

struct WorkloadSpec {
  Pattern pattern = Pattern::SeqScan;
  uint64_t stride = 4;        // strided only
  double hot_fraction = 0.1;  // hot_cold only
  double hot_bias = 0.9;      // hot_cold only
  Region region;
  uint64_t ops = 0;
  double write_ratio = 0.0;
  uint32_t compute_gap = 0;  // idle cycles between ops
};

struct ProcessConfig {
  uint16_t pid = 1;
  uint16_t threads = 1;
  WorkloadSpec program;
  uint64_t seed = 1;
};

struct SystemConfig {
  uint8_t ncores = 1;
  CacheConfig cache;
  BusConfig bus;
  MemoryConfig memory;
  SchedulerConfig scheduler;
  std::vector<ProcessConfig> processes;
};

// Field-path-tagged validation errors; empty means the config is usable.
std::vector<std::string> validate_system_config(const SystemConfig& cfg);

// Deterministic 64-bit PRNG stream (splitmix64).
struct SplitMix64 {
  uint64_t state = 0;
  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double next01() { return double(next() >> 11) * (1.0 / 9007199254740992.0); }
};

// Direct-mapped, write-allocate; writebacks generate no traffic.
class DirectMappedCache {
 public:
  DirectMappedCache(uint64_t size_bytes, uint64_t line_bytes);

  struct AccessResult {
    bool hit = false;
    std::optional<uint64_t> evicted_line;  // base address of the replaced line
  };
  AccessResult access(uint64_t addr);

  uint64_t line_bytes() const { return line_bytes_; }

 private:
  uint64_t line_bytes_;
  uint64_t nlines_;
  std::vector<std::optional<uint64_t>> tags_;
};

// Round-robin arbiter over the core request slots plus one DMA slot (the
// last slot). A grant occupies the bus for transfer_cycles.
class Bus {
 public:
  Bus(unsigned ncores, uint32_t transfer_cycles)
      : transfer_cycles_(transfer_cycles),
        last_granted_(ncores),
        pending_(ncores + 1, false) {}

  void request(unsigned slot) { pending_[slot] = true; }
  bool pending(unsigned slot) const { return pending_[slot]; }
  // Grants as many requests as fit this cycle; returns granted slots in order.
  std::vector<unsigned> arbitrate(uint64_t cycle);
  uint32_t transfer_cycles() const { return transfer_cycles_; }

 private:
  uint32_t transfer_cycles_;
  unsigned last_granted_;
  uint64_t busy_until_ = 0;
  std::vector<bool> pending_;
};

class System : public ClockSource {
 public:
  explicit System(const SystemConfig& cfg);  // throws ConfigError

  void attach_monitor(Monitor& mon);
  void detach_monitor() { mon_ = nullptr; }

  void step();  // one cycle; keeps stepping (idle) after the workload ends
  void step_one() override { step(); }

  bool done() const;  // all threads finished and nothing in flight
  uint64_t cycle() const { return cycle_; }
  uint64_t events_emitted() const { return events_emitted_; }

  void set_record_log(bool on) { record_log_ = on; }
  const EventLog& log() const { return log_; }

  uint64_t state_digest() const;

  const SystemConfig& config() const { return cfg_; }

 private:
  struct Thread {
    uint16_t pid, tid;
    const WorkloadSpec* spec;
    SplitMix64 rng;
    uint64_t op = 0;
    bool finished() const { return op >= spec->ops; }
  };

  enum class CoreState { Idle, Switching, Running, Waiting };

  struct Core {
    int thread = -1;
    ProcessRef cur;  // idle = {0,0}
    CoreState st = CoreState::Idle;
    uint64_t probe_at = 0;
    uint64_t switch_end = 0;
    uint32_t switch_len = 0;
    uint64_t quantum_start = 0;
    // in-flight miss
    uint64_t requested_at = 0;
    uint64_t completes_at = 0;
    bool granted = false;
    uint64_t pending_addr = 0;
    MemOp pending_op = MemOp::Read;
  };

  void emit(const CoreEvent& e) { cycle_events_.push_back(e); }
  void switch_in(unsigned c, int thread_idx);
  void complete_op(unsigned c, uint64_t completion_cycle);
  void gen_op(Thread& t, uint64_t& addr, MemOp& op) const;
  uint64_t instr_pc(const Thread& t) const;
  int pop_runnable(unsigned core);
  void push_runnable(unsigned core, int thread_idx);
  bool has_runnable(unsigned core) const;

  SystemConfig cfg_;
  std::vector<Thread> threads_;
  std::vector<Core> cores_;
  std::vector<DirectMappedCache> caches_;
  Bus bus_;
  std::vector<std::deque<int>> queues_;  // one global queue, or one per core
  Monitor* mon_ = nullptr;

  uint64_t cycle_ = 0;
  uint64_t events_emitted_ = 0;
  size_t threads_left_ = 0;
  bool record_log_ = true;
  EventLog log_;
  std::vector<CoreEvent> cycle_events_;
};

// Steps until every process finishes or max_cycles is reached; returns the
// recorded event log. Bit-identical across runs for the same config.
const EventLog& run(System& sys, uint64_t max_cycles);

}  // namespace abacus
