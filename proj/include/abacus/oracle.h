#pragma once

#include <cstdint>
#include <vector>

#include "abacus/control.h"
#include "abacus/events.h"
#include "abacus/monitor_config.h"
#include "abacus/report.h"

namespace abacus {

struct OracleOptions {
  unsigned ncores = 1;
  bool ts_enabled = true;
};

struct OracleResult {
  Report report;
  // Serialized payload per configured *enabled* unit, ascending index,
  // byte-identical to the corresponding DMA record payloads.
  std::vector<std::vector<uint8_t>> unit_payloads;
  WindowState window;
};

// Brute-force reference profiler: recomputes every unit's payload with a
// plain offline pass over the log. The accumulation and serialization here
// deliberately share no code with the streaming monitor units so that a bug
// cannot hide on both sides of the equivalence tests.
OracleResult oracle_profile(const EventLog& log, const MonitorConfig& cfg,
                            const OracleOptions& opts);

}  // namespace abacus
