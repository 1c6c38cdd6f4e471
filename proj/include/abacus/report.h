#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "abacus/units.h"

#include <json.hpp>

namespace abacus {

// Decoded per-unit results, mirroring the serialized payload layouts.

struct HistData {
  uint64_t base = 0;
  uint32_t shift = 0;
  uint32_t nbuckets = 0;
  uint64_t out_of_range = 0;
  std::vector<uint64_t> counts;
  bool operator==(const HistData&) const = default;
};

struct TraceData {
  uint32_t capacity = 0;
  uint32_t mode = 0;
  uint32_t count = 0;
  uint64_t dropped = 0;
  std::vector<TraceRecord> entries;
  bool operator==(const TraceData&) const = default;
};

struct LatData {
  uint32_t bucket_width = 0;
  uint32_t nbuckets = 0;
  std::vector<uint64_t> counts;
  bool operator==(const LatData&) const = default;
};

struct StallData {
  uint32_t ncores = 0;
  uint64_t total = 0;
  std::vector<uint64_t> per_core;
  bool operator==(const StallData&) const = default;
};

struct AttrEntry {
  uint32_t pid = 0;
  uint64_t value = 0;
  bool operator==(const AttrEntry&) const = default;
};

struct UnitReport {
  uint32_t index = 0;
  UnitType type = UnitType::Absent;
  bool overflow = false;
  bool attr_present = false;
  std::variant<HistData, TraceData, LatData, StallData> data;
  std::vector<AttrEntry> attribution;  // OTHER (pid 0xFFFF) last
  bool operator==(const UnitReport&) const = default;
};

struct Report {
  uint32_t schema_version = 1;
  uint64_t snapshot_cycle = 0;
  std::vector<UnitReport> units;
  bool operator==(const Report&) const = default;
};

nlohmann::json report_to_json(const Report& r);

// Canonical text form used for golden files and cross-tool equality.
std::string canonical_json(const nlohmann::json& j);

// One CSV file per unit under dir, named unit<i>_<type>.csv.
void write_report_csv(const Report& r, const std::filesystem::path& dir);

}  // namespace abacus
