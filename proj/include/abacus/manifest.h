#pragma once

#include <optional>
#include <string>

#include "abacus/monitor_config.h"
#include "abacus/simsys.h"

#include <json.hpp>

namespace abacus {

// Run manifest consumed by the CLI: a full system description, the monitor
// configuration to boot with, a cycle budget and optional output paths.
struct RunManifest {
  SystemConfig system;
  MonitorConfig monitor;
  uint64_t max_cycles = 1;
  std::optional<std::string> report_path;
  std::optional<std::string> log_path;
  std::optional<std::string> page_path;
};

SystemConfig system_config_from_json(const nlohmann::json& j);
RunManifest manifest_from_json(const nlohmann::json& j);

}  // namespace abacus
