#include "abacus/manifest.h"

#include "abacus/errors.h"

namespace abacus {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

uint64_t get_uint(const json& j, const char* key, const std::string& path,
                  uint64_t fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) bad(path + "." + key, "missing required field");
    return fallback;
  }
  const json& v = j.at(key);
  if (!v.is_number_unsigned()) bad(path + "." + key, "expected unsigned integer");
  return v.get<uint64_t>();
}

double get_num(const json& j, const char* key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) bad(path + "." + key, "expected number");
  return v.get<double>();
}

bool get_bool(const json& j, const char* key, const std::string& path, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) bad(path + "." + key, "expected boolean");
  return v.get<bool>();
}

Pattern pattern_from_json(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected pattern name");
  std::string s = v.get<std::string>();
  if (s == "seq_scan") return Pattern::SeqScan;
  if (s == "strided") return Pattern::Strided;
  if (s == "random_uniform") return Pattern::RandomUniform;
  if (s == "hot_cold") return Pattern::HotCold;
  bad(path, "unknown pattern '" + s + "'");
}

WorkloadSpec workload_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected object");
  WorkloadSpec w;
  if (!j.contains("pattern")) bad(path + ".pattern", "missing required field");
  w.pattern = pattern_from_json(j.at("pattern"), path + ".pattern");
  w.stride = get_uint(j, "stride", path, w.stride);
  w.hot_fraction = get_num(j, "hot_fraction", path, w.hot_fraction);
  w.hot_bias = get_num(j, "hot_bias", path, w.hot_bias);
  if (j.contains("region")) {
    const json& r = j.at("region");
    if (!r.is_object()) bad(path + ".region", "expected object");
    w.region.base = get_uint(r, "base", path + ".region", 0);
    w.region.size_bytes = get_uint(r, "size_bytes", path + ".region", 0, true);
  }
  w.ops = get_uint(j, "ops", path, 0);
  w.write_ratio = get_num(j, "write_ratio", path, 0.0);
  w.compute_gap = uint32_t(get_uint(j, "compute_gap", path, 0));
  return w;
}

}  // namespace

SystemConfig system_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("system: expected object");
  SystemConfig cfg;
  cfg.ncores = uint8_t(get_uint(j, "ncores", "system", 1));
  if (j.contains("cache")) {
    const json& c = j.at("cache");
    cfg.cache.size_bytes = get_uint(c, "size_bytes", "system.cache", cfg.cache.size_bytes);
    cfg.cache.line_bytes = get_uint(c, "line_bytes", "system.cache", cfg.cache.line_bytes);
  }
  if (j.contains("bus")) {
    const json& b = j.at("bus");
    cfg.bus.transfer_cycles =
        uint32_t(get_uint(b, "transfer_cycles", "system.bus", cfg.bus.transfer_cycles));
    cfg.bus.dma_contention = get_bool(b, "dma_contention", "system.bus", false);
  }
  if (j.contains("memory")) {
    const json& m = j.at("memory");
    cfg.memory.latency_cycles =
        uint32_t(get_uint(m, "latency_cycles", "system.memory", cfg.memory.latency_cycles));
    cfg.memory.size_bytes = get_uint(m, "size_bytes", "system.memory", cfg.memory.size_bytes);
  }
  if (j.contains("scheduler")) {
    const json& s = j.at("scheduler");
    cfg.scheduler.quantum_cycles =
        get_uint(s, "quantum_cycles", "system.scheduler", cfg.scheduler.quantum_cycles);
    cfg.scheduler.context_switch_cost_cycles = uint32_t(get_uint(
        s, "context_switch_cost_cycles", "system.scheduler", 0));
    cfg.scheduler.pinned = get_bool(s, "pinned", "system.scheduler", false);
  }
  if (j.contains("processes")) {
    const json& procs = j.at("processes");
    if (!procs.is_array()) throw ConfigError("system.processes: expected array");
    for (size_t i = 0; i < procs.size(); ++i) {
      std::string path = "system.processes[" + std::to_string(i) + "]";
      const json& jp = procs[i];
      if (!jp.is_object()) bad(path, "expected object");
      ProcessConfig p;
      p.pid = uint16_t(get_uint(jp, "pid", path, 0, true));
      p.threads = uint16_t(get_uint(jp, "threads", path, 1));
      if (!jp.contains("program")) bad(path + ".program", "missing required field");
      p.program = workload_from_json(jp.at("program"), path + ".program");
      p.seed = get_uint(jp, "seed", path, 1);
      cfg.processes.push_back(std::move(p));
    }
  }
  auto errors = validate_system_config(cfg);
  if (!errors.empty()) {
    std::string msg = "system";
    for (const auto& m : errors) msg += "; system." + m;
    throw ConfigError(msg);
  }
  return cfg;
}

RunManifest manifest_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("manifest: expected object");
  RunManifest m;
  if (!j.contains("system")) throw ConfigError("system: missing required section");
  m.system = system_config_from_json(j.at("system"));
  if (!j.contains("monitor")) throw ConfigError("monitor: missing required section");
  m.monitor = monitor_config_from_json(j.at("monitor"));
  m.max_cycles = get_uint(j, "max_cycles", "manifest", 0, true);
  if (m.max_cycles < 1) throw ConfigError("max_cycles: must be >= 1");
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    if (!o.is_object()) throw ConfigError("outputs: expected object");
    if (o.contains("report")) m.report_path = o.at("report").get<std::string>();
    if (o.contains("log")) m.log_path = o.at("log").get<std::string>();
    if (o.contains("page")) m.page_path = o.at("page").get<std::string>();
  }
  return m;
}

}  // namespace abacus
