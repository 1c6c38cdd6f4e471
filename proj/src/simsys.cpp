#include "abacus/simsys.h"

#include <algorithm>

#include "abacus/errors.h"

namespace abacus {

// ------------------------------------------------------------------ validate

namespace {
bool is_pow2(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }
}  // namespace

std::vector<std::string> validate_system_config(const SystemConfig& cfg) {
  std::vector<std::string> e;
  if (cfg.ncores < 1 || cfg.ncores > 8) e.push_back("ncores: must be in [1,8]");
  if (!is_pow2(cfg.cache.size_bytes))
    e.push_back("cache.size_bytes: must be a power of two");
  if (!is_pow2(cfg.cache.line_bytes) || cfg.cache.line_bytes < 4)
    e.push_back("cache.line_bytes: must be a power of two >= 4");
  if (cfg.cache.line_bytes > cfg.cache.size_bytes)
    e.push_back("cache.line_bytes: larger than cache.size_bytes");
  if (cfg.scheduler.quantum_cycles < 1)
    e.push_back("scheduler.quantum_cycles: must be >= 1");

  std::vector<uint16_t> pids;
  for (size_t i = 0; i < cfg.processes.size(); ++i) {
    const ProcessConfig& p = cfg.processes[i];
    std::string path = "processes[" + std::to_string(i) + "]";
    if (p.pid < 1 || p.pid > 0xFFFE)
      e.push_back(path + ".pid: must be in [1, 0xFFFE]");
    if (std::find(pids.begin(), pids.end(), p.pid) != pids.end())
      e.push_back(path + ".pid: duplicate pid " + std::to_string(p.pid));
    pids.push_back(p.pid);
    if (p.threads < 1) e.push_back(path + ".threads: must be >= 1");

    const WorkloadSpec& w = p.program;
    if (w.ops > 0) {
      if (w.region.size_bytes < 4 || w.region.size_bytes % 4 != 0)
        e.push_back(path + ".program.region.size_bytes: must be a positive multiple of 4");
      if (w.region.base > cfg.memory.size_bytes ||
          w.region.size_bytes > cfg.memory.size_bytes - w.region.base)
        e.push_back(path + ".program.region: outside simulated physical memory");
    }
    if (w.write_ratio < 0.0 || w.write_ratio > 1.0)
      e.push_back(path + ".program.write_ratio: must be in [0,1]");
    if (w.pattern == Pattern::Strided && w.stride < 1)
      e.push_back(path + ".program.stride: must be >= 1");
    if (w.pattern == Pattern::HotCold) {
      if (w.hot_fraction <= 0.0 || w.hot_fraction > 1.0)
        e.push_back(path + ".program.hot_fraction: must be in (0,1]");
      if (w.hot_bias < 0.0 || w.hot_bias > 1.0)
        e.push_back(path + ".program.hot_bias: must be in [0,1]");
    }
  }
  return e;
}

// --------------------------------------------------------------------- cache

DirectMappedCache::DirectMappedCache(uint64_t size_bytes, uint64_t line_bytes)
    : line_bytes_(line_bytes), nlines_(size_bytes / line_bytes), tags_(nlines_) {}

DirectMappedCache::AccessResult DirectMappedCache::access(uint64_t addr) {
  uint64_t line_addr = addr / line_bytes_;
  uint64_t idx = line_addr % nlines_;
  uint64_t tag = line_addr / nlines_;
  auto& slot = tags_[idx];
  if (slot && *slot == tag) return {true, std::nullopt};
  AccessResult r{false, std::nullopt};
  if (slot) r.evicted_line = (*slot * nlines_ + idx) * line_bytes_;
  slot = tag;  // write-allocate; writeback traffic not modeled
  return r;
}

// ----------------------------------------------------------------------- bus

std::vector<unsigned> Bus::arbitrate(uint64_t cycle) {
  std::vector<unsigned> granted;
  unsigned nslots = unsigned(pending_.size());
  while (busy_until_ <= cycle) {
    int found = -1;
    for (unsigned k = 1; k <= nslots; ++k) {
      unsigned s = (last_granted_ + k) % nslots;
      if (pending_[s]) {
        found = int(s);
        break;
      }
    }
    if (found < 0) break;
    pending_[found] = false;
    last_granted_ = unsigned(found);
    busy_until_ = cycle + transfer_cycles_;
    granted.push_back(unsigned(found));
    if (transfer_cycles_ == 0 && granted.size() >= nslots) break;
  }
  return granted;
}

// -------------------------------------------------------------------- system

System::System(const SystemConfig& cfg)
    : cfg_(cfg), bus_(cfg.ncores, cfg.bus.transfer_cycles) {
  auto errors = validate_system_config(cfg_);
  if (!errors.empty()) {
    std::string msg;
    for (const auto& m : errors) {
      if (!msg.empty()) msg += "; ";
      msg += m;
    }
    throw ConfigError(msg);
  }

  // Threads enter the run queue in (pid, tid) order.
  std::vector<size_t> order(cfg_.processes.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return cfg_.processes[a].pid < cfg_.processes[b].pid;
  });

  for (size_t pi : order) {
    const ProcessConfig& p = cfg_.processes[pi];
    for (uint16_t tid = 1; tid <= p.threads; ++tid) {
      Thread t;
      t.pid = p.pid;
      t.tid = tid;
      t.spec = &p.program;
      SplitMix64 seeder{p.seed};
      t.rng.state = seeder.next() ^ uint64_t(p.pid) << 32 ^ tid;
      threads_.push_back(t);
    }
  }
  threads_left_ = threads_.size();

  cores_.resize(cfg_.ncores);
  for (unsigned c = 0; c < cfg_.ncores; ++c)
    caches_.emplace_back(cfg_.cache.size_bytes, cfg_.cache.line_bytes);

  queues_.resize(cfg_.scheduler.pinned ? cfg_.ncores : 1);
  for (size_t i = 0; i < threads_.size(); ++i)
    queues_[cfg_.scheduler.pinned ? i % cfg_.ncores : 0].push_back(int(i));
}

void System::attach_monitor(Monitor& mon) {
  mon_ = &mon;
  mon_->set_dma_contention(cfg_.bus.dma_contention);
}

bool System::done() const { return threads_left_ == 0; }

int System::pop_runnable(unsigned core) {
  auto& q = queues_[cfg_.scheduler.pinned ? core : 0];
  int t = q.front();
  q.pop_front();
  return t;
}

void System::push_runnable(unsigned core, int thread_idx) {
  queues_[cfg_.scheduler.pinned ? core : 0].push_back(thread_idx);
}

bool System::has_runnable(unsigned core) const {
  return !queues_[cfg_.scheduler.pinned ? core : 0].empty();
}

uint64_t System::instr_pc(const Thread& t) const {
  return 0x4000000000000000ULL | uint64_t(t.pid) << 32 | uint64_t(t.tid) << 20 |
         (t.op & 0xFF) << 2;
}

void System::gen_op(Thread& t, uint64_t& addr, MemOp& op) const {
  const WorkloadSpec& w = *t.spec;
  uint64_t rsize = w.region.size_bytes;
  uint64_t off = 0;
  switch (w.pattern) {
    case Pattern::SeqScan:
      off = t.op * 4 % rsize;
      break;
    case Pattern::Strided:
      off = t.op * w.stride % rsize;
      break;
    case Pattern::RandomUniform:
      off = t.rng.next() % (rsize / 4) * 4;
      break;
    case Pattern::HotCold: {
      uint64_t hsize = uint64_t(double(rsize) * w.hot_fraction) & ~3ULL;
      if (hsize < 4) hsize = 4;
      if (hsize > rsize) hsize = rsize;
      bool hot = hsize == rsize || t.rng.next01() < w.hot_bias;
      if (hot)
        off = t.rng.next() % (hsize / 4) * 4;
      else
        off = hsize + t.rng.next() % ((rsize - hsize) / 4) * 4;
      break;
    }
  }
  addr = w.region.base + off;
  op = t.rng.next01() < w.write_ratio ? MemOp::Write : MemOp::Read;
}

void System::switch_in(unsigned c, int thread_idx) {
  Core& core = cores_[c];
  Thread& t = threads_[thread_idx];
  emit(make_switch(uint8_t(c), core.cur, cycle_, {t.pid, t.tid}));
  if (t.finished()) {
    // zero-op program: retires at dispatch
    core.thread = -1;
    core.cur = {0, 0};
    core.st = CoreState::Idle;
    threads_left_--;
    return;
  }
  core.thread = thread_idx;
  core.cur = {t.pid, t.tid};
  uint32_t cost = cfg_.scheduler.context_switch_cost_cycles;
  if (cost > 0) {
    core.st = CoreState::Switching;
    core.switch_end = cycle_ + cost;
    core.switch_len = cost;
  } else {
    core.st = CoreState::Running;
    core.probe_at = cycle_ + 1;
    core.quantum_start = cycle_;
  }
}

void System::complete_op(unsigned c, uint64_t completion_cycle) {
  Core& core = cores_[c];
  Thread& t = threads_[core.thread];
  t.op++;
  if (t.finished()) {
    core.thread = -1;
    core.cur = {0, 0};
    core.st = CoreState::Idle;
    threads_left_--;
  } else {
    core.probe_at = completion_cycle + 1 + t.spec->compute_gap;
  }
}

void System::step() {
  cycle_events_.clear();
  const uint64_t cyc = cycle_;
  const unsigned ncores = cfg_.ncores;

  // Phase A: dispatch, switch completion, preemption, probes (core order).
  for (unsigned c = 0; c < ncores; ++c) {
    Core& core = cores_[c];
    switch (core.st) {
      case CoreState::Idle:
        if (has_runnable(c)) switch_in(c, pop_runnable(c));
        break;
      case CoreState::Switching:
        if (cyc == core.switch_end) {
          emit(make_stall(uint8_t(c), core.cur, cyc, core.switch_len));
          core.st = CoreState::Running;
          core.probe_at = cyc + 1;
          core.quantum_start = cyc;
        }
        break;
      case CoreState::Running: {
        if (cyc >= core.quantum_start + cfg_.scheduler.quantum_cycles &&
            has_runnable(c)) {
          int next = pop_runnable(c);
          push_runnable(c, core.thread);
          switch_in(c, next);
          break;
        }
        if (cyc == core.probe_at) {
          Thread& t = threads_[core.thread];
          uint64_t addr;
          MemOp op;
          gen_op(t, addr, op);
          if (caches_[c].access(addr).hit) {
            emit(make_access(uint8_t(c), core.cur, cyc, addr, op, 1));
            emit(make_instr(uint8_t(c), core.cur, cyc, instr_pc(t)));
            complete_op(c, cyc);
          } else {
            core.st = CoreState::Waiting;
            core.requested_at = cyc;
            core.granted = false;
            core.pending_addr = addr;
            core.pending_op = op;
            bus_.request(c);
          }
        }
        break;
      }
      case CoreState::Waiting:
        break;
    }
  }

  // Phase B: bus arbitration (the monitor's DMA engine competes only in
  // contention mode; default is a dedicated port).
  if (mon_ && mon_->dma_wants_bus()) bus_.request(ncores);
  for (unsigned slot : bus_.arbitrate(cyc)) {
    if (slot == ncores) {
      mon_->dma_bus_granted(bus_.transfer_cycles());
    } else {
      Core& core = cores_[slot];
      core.granted = true;
      core.completes_at = cyc + bus_.transfer_cycles() + cfg_.memory.latency_cycles;
    }
  }

  // Phase C: miss completions (core order).
  for (unsigned c = 0; c < ncores; ++c) {
    Core& core = cores_[c];
    if (core.st == CoreState::Waiting && core.granted && core.completes_at == cyc) {
      Thread& t = threads_[core.thread];
      uint64_t latency = cyc - core.requested_at + 1;
      if (latency > 1) emit(make_stall(uint8_t(c), core.cur, cyc, latency - 1));
      emit(make_access(uint8_t(c), core.cur, cyc, core.pending_addr, core.pending_op,
                       latency));
      emit(make_instr(uint8_t(c), core.cur, cyc, instr_pc(t)));
      core.st = CoreState::Running;
      complete_op(c, cyc);
    }
  }

  // Log order within a cycle: by core, emission order preserved per core.
  std::stable_sort(cycle_events_.begin(), cycle_events_.end(),
                   [](const CoreEvent& a, const CoreEvent& b) { return a.core < b.core; });

  events_emitted_ += cycle_events_.size();
  if (record_log_) log_.insert(log_.end(), cycle_events_.begin(), cycle_events_.end());
  if (mon_) mon_->step(cycle_events_);
  cycle_++;
}

uint64_t System::state_digest() const {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= v >> (8 * i) & 0xFF;
      h *= 1099511628211ULL;
    }
  };
  mix(cycle_);
  mix(threads_left_);
  for (const Thread& t : threads_) {
    mix(uint64_t(t.pid) << 16 | t.tid);
    mix(t.op);
    mix(t.rng.state);
  }
  for (const Core& core : cores_) {
    mix(uint64_t(core.thread + 1));
    mix(uint64_t(core.st));
    mix(pack_proc(core.cur));
    mix(core.probe_at);
  }
  for (const auto& q : queues_) {
    mix(q.size());
    for (int t : q) mix(uint64_t(t));
  }
  return h;
}

const EventLog& run(System& sys, uint64_t max_cycles) {
  while (!sys.done() && sys.cycle() < max_cycles) sys.step();
  return sys.log();
}

}  // namespace abacus
