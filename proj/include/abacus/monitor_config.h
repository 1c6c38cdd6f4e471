#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "abacus/control.h"
#include "abacus/units.h"

#include <json.hpp>

namespace abacus {

// High-level monitor configuration. Every field maps onto a documented
// register write; dev_configure expands a config into a deterministic write
// sequence (units ascending, then triggers, then global enable last).

struct HistParams {
  uint64_t base = 0;
  uint32_t shift = HistUnit::kDefaultShift;
  uint32_t nbuckets = HistUnit::kDefaultBuckets;
  bool operator==(const HistParams&) const = default;
};

struct TraceParams {
  uint32_t capacity = TraceUnit::kDefaultCapacity;
  uint32_t mode = TraceUnit::kModeWrap;
  bool include_instr = false;
  bool operator==(const TraceParams&) const = default;
};

struct LatParams {
  uint32_t bucket_width = LatUnit::kDefaultWidth;
  uint32_t nbuckets = LatUnit::kDefaultBuckets;
  uint32_t irq_threshold = 0;
  bool operator==(const LatParams&) const = default;
};

struct StallParams {
  uint64_t irq_threshold = 0;
  bool operator==(const StallParams&) const = default;
};

using UnitParams = std::variant<HistParams, TraceParams, LatParams, StallParams>;

struct UnitSettings {
  uint32_t index = 0;
  UnitType type = UnitType::Hist;
  bool enable = true;
  uint32_t core_mask = 0xFF;
  std::optional<uint16_t> pid_filter;
  bool attr_mode = false;
  UnitParams params;
  bool operator==(const UnitSettings&) const = default;
};

struct MonitorConfig {
  std::optional<TriggerSpec> trigger_start;
  std::optional<TriggerSpec> trigger_stop;
  std::vector<UnitSettings> units;
  std::optional<bool> dma_on_stop;
  std::optional<bool> irq_enable;
  bool operator==(const MonitorConfig&) const = default;
};

// Structural validation independent of any device instance: unit indices in
// range and unique, params matching the unit type, trigger modes known.
// Throws ConfigError naming the offending field path.
void validate_monitor_config(const MonitorConfig& cfg);

// Additional check against an installed unit list (index i must host a unit
// of the configured type).
void validate_monitor_config_against(const MonitorConfig& cfg,
                                     const std::vector<UnitType>& installed);

MonitorConfig monitor_config_from_json(const nlohmann::json& j);
nlohmann::json monitor_config_to_json(const MonitorConfig& cfg);

uint32_t trigger_mode_from_json(const nlohmann::json& v, const std::string& path);
UnitType unit_type_from_json(const nlohmann::json& v, const std::string& path);

}  // namespace abacus
