#include "abacus/monitor_config.h"

#include <set>
#include <string>

#include "abacus/errors.h"
#include "abacus/regmap.h"

namespace abacus {

using nlohmann::json;

namespace {

std::string upath(size_t i, const char* field) {
  return "units[" + std::to_string(i) + "]." + field;
}

void check_trigger(const std::optional<TriggerSpec>& t, const char* name) {
  if (t && !trigger_mode_valid(t->mode))
    throw ConfigError(std::string(name) + ".mode: unknown trigger mode " +
                      std::to_string(t->mode));
}

UnitType params_type(const UnitParams& p) {
  switch (p.index()) {
    case 0: return UnitType::Hist;
    case 1: return UnitType::Trace;
    case 2: return UnitType::Lat;
    default: return UnitType::Stall;
  }
}

}  // namespace

void validate_monitor_config(const MonitorConfig& cfg) {
  check_trigger(cfg.trigger_start, "trigger_start");
  check_trigger(cfg.trigger_stop, "trigger_stop");

  std::set<uint32_t> seen;
  for (size_t i = 0; i < cfg.units.size(); ++i) {
    const UnitSettings& u = cfg.units[i];
    if (u.index >= reg::kMaxUnits)
      throw ConfigError(upath(i, "index") + ": out of range (max " +
                        std::to_string(reg::kMaxUnits - 1) + ")");
    if (!seen.insert(u.index).second)
      throw ConfigError(upath(i, "index") + ": duplicate unit index " +
                        std::to_string(u.index));
    if (u.type == UnitType::Absent)
      throw ConfigError(upath(i, "type") + ": absent is not configurable");
    if (params_type(u.params) != u.type)
      throw ConfigError(upath(i, "params") + ": params do not match unit type");
    if (u.core_mask > 0xFF)
      throw ConfigError(upath(i, "core_mask") + ": must fit in 8 bits");

    if (const auto* h = std::get_if<HistParams>(&u.params)) {
      if (h->shift > 63) throw ConfigError(upath(i, "params.shift") + ": must be <= 63");
      if (h->nbuckets < 1 || h->nbuckets > HistUnit::kMaxBuckets)
        throw ConfigError(upath(i, "params.nbuckets") + ": must be in [1, " +
                          std::to_string(HistUnit::kMaxBuckets) + "]");
    } else if (const auto* t = std::get_if<TraceParams>(&u.params)) {
      if (t->capacity < 1 || t->capacity > TraceUnit::kMaxCapacity)
        throw ConfigError(upath(i, "params.capacity") + ": must be in [1, " +
                          std::to_string(TraceUnit::kMaxCapacity) + "]");
      if (t->mode > 1)
        throw ConfigError(upath(i, "params.mode") + ": must be wrap or stop_on_full");
    } else if (const auto* l = std::get_if<LatParams>(&u.params)) {
      if (l->bucket_width < 1)
        throw ConfigError(upath(i, "params.bucket_width") + ": must be >= 1");
      if (l->nbuckets < 1 || l->nbuckets > LatUnit::kMaxBuckets)
        throw ConfigError(upath(i, "params.nbuckets") + ": must be in [1, " +
                          std::to_string(LatUnit::kMaxBuckets) + "]");
    }
  }
}

void validate_monitor_config_against(const MonitorConfig& cfg,
                                     const std::vector<UnitType>& installed) {
  validate_monitor_config(cfg);
  for (size_t i = 0; i < cfg.units.size(); ++i) {
    const UnitSettings& u = cfg.units[i];
    if (u.index >= installed.size())
      throw ConfigError(upath(i, "index") + ": no unit installed at index " +
                        std::to_string(u.index));
    if (installed[u.index] != u.type)
      throw ConfigError(upath(i, "type") + ": installed unit at index " +
                        std::to_string(u.index) + " is " +
                        unit_type_name(installed[u.index]) + ", not " +
                        unit_type_name(u.type));
  }
}

// ------------------------------------------------------------------- JSON

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

bool get_bool(const json& j, const char* key, const std::string& path, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) bad(path + "." + key, "expected boolean");
  return v.get<bool>();
}

TriggerSpec trigger_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected object with mode/arg");
  TriggerSpec t;
  if (!j.contains("mode")) bad(path + ".mode", "missing required field");
  t.mode = trigger_mode_from_json(j.at("mode"), path + ".mode");
  t.arg = get_uint(j, "arg", path, 0);
  return t;
}

}  // namespace

uint32_t trigger_mode_from_json(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<uint32_t>();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s == "immediate" || s == "never") return kTrigImmediateOrNever;
    if (s == "cycle_count") return kTrigCycleCount;
    if (s == "mem_addr_access") return kTrigMemAddrAccess;
    if (s == "instr_addr") return kTrigInstrAddr;
    if (s == "pid_scheduled") return kTrigPidScheduled;
    bad(path, "unknown trigger mode '" + s + "'");
  }
  bad(path, "expected trigger mode number or name");
}

UnitType unit_type_from_json(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) {
    uint32_t n = v.get<uint32_t>();
    if (n >= 1 && n <= 4) return UnitType(n);
    bad(path, "unit type number must be 1..4");
  }
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s == "hist") return UnitType::Hist;
    if (s == "trace") return UnitType::Trace;
    if (s == "lat") return UnitType::Lat;
    if (s == "stall") return UnitType::Stall;
    bad(path, "unknown unit type '" + s + "'");
  }
  bad(path, "expected unit type number or name");
}

MonitorConfig monitor_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("monitor: expected object");
  MonitorConfig cfg;
  if (j.contains("trigger_start"))
    cfg.trigger_start = trigger_from_json(j.at("trigger_start"), "trigger_start");
  if (j.contains("trigger_stop"))
    cfg.trigger_stop = trigger_from_json(j.at("trigger_stop"), "trigger_stop");
  if (j.contains("dma_on_stop"))
    cfg.dma_on_stop = get_bool(j, "dma_on_stop", "monitor", false);
  if (j.contains("irq_enable")) cfg.irq_enable = get_bool(j, "irq_enable", "monitor", false);

  if (j.contains("units")) {
    const json& units = j.at("units");
    if (!units.is_array()) throw ConfigError("units: expected array");
    for (size_t i = 0; i < units.size(); ++i) {
      const json& ju = units[i];
      std::string path = "units[" + std::to_string(i) + "]";
      if (!ju.is_object()) bad(path, "expected object");
      UnitSettings u;
      u.index = uint32_t(get_uint(ju, "index", path, 0, true));
      if (!ju.contains("type")) bad(path + ".type", "missing required field");
      u.type = unit_type_from_json(ju.at("type"), path + ".type");
      u.enable = get_bool(ju, "enable", path, true);
      u.core_mask = uint32_t(get_uint(ju, "core_mask", path, 0xFF));
      if (ju.contains("pid_filter") && !ju.at("pid_filter").is_null()) {
        uint64_t pid = get_uint(ju, "pid_filter", path, 0);
        if (pid > 0xFFFF) bad(path + ".pid_filter", "pid must fit in 16 bits");
        u.pid_filter = uint16_t(pid);
      }
      u.attr_mode = get_bool(ju, "attr_mode", path, false);

      json params = ju.contains("params") ? ju.at("params") : json::object();
      std::string ppath = path + ".params";
      if (!params.is_object()) bad(ppath, "expected object");
      switch (u.type) {
        case UnitType::Hist: {
          HistParams p;
          p.base = get_uint(params, "base", ppath, p.base);
          p.shift = uint32_t(get_uint(params, "shift", ppath, p.shift));
          p.nbuckets = uint32_t(get_uint(params, "nbuckets", ppath, p.nbuckets));
          u.params = p;
          break;
        }
        case UnitType::Trace: {
          TraceParams p;
          p.capacity = uint32_t(get_uint(params, "capacity", ppath, p.capacity));
          if (params.contains("mode")) {
            const json& m = params.at("mode");
            if (m.is_string()) {
              std::string s = m.get<std::string>();
              if (s == "wrap") p.mode = TraceUnit::kModeWrap;
              else if (s == "stop_on_full") p.mode = TraceUnit::kModeStopOnFull;
              else bad(ppath + ".mode", "expected wrap or stop_on_full");
            } else if (m.is_number_unsigned()) {
              p.mode = m.get<uint32_t>();
            } else {
              bad(ppath + ".mode", "expected mode name or number");
            }
          }
          p.include_instr = get_bool(params, "include_instr", ppath, false);
          u.params = p;
          break;
        }
        case UnitType::Lat: {
          LatParams p;
          p.bucket_width = uint32_t(get_uint(params, "bucket_width", ppath, p.bucket_width));
          p.nbuckets = uint32_t(get_uint(params, "nbuckets", ppath, p.nbuckets));
          p.irq_threshold = uint32_t(get_uint(params, "irq_threshold", ppath, 0));
          u.params = p;
          break;
        }
        case UnitType::Stall: {
          StallParams p;
          p.irq_threshold = get_uint(params, "irq_threshold", ppath, 0);
          u.params = p;
          break;
        }
        default:
          bad(path + ".type", "absent is not configurable");
      }
      cfg.units.push_back(std::move(u));
    }
  }
  validate_monitor_config(cfg);
  return cfg;
}

nlohmann::json monitor_config_to_json(const MonitorConfig& cfg) {
  json j = json::object();
  auto trig = [](const TriggerSpec& t) {
    return json{{"mode", t.mode}, {"arg", t.arg}};
  };
  if (cfg.trigger_start) j["trigger_start"] = trig(*cfg.trigger_start);
  if (cfg.trigger_stop) j["trigger_stop"] = trig(*cfg.trigger_stop);
  if (cfg.dma_on_stop) j["dma_on_stop"] = *cfg.dma_on_stop;
  if (cfg.irq_enable) j["irq_enable"] = *cfg.irq_enable;

  json units = json::array();
  for (const UnitSettings& u : cfg.units) {
    json ju{{"index", u.index},
            {"type", unit_type_name(u.type)},
            {"enable", u.enable},
            {"core_mask", u.core_mask},
            {"attr_mode", u.attr_mode}};
    if (u.pid_filter) ju["pid_filter"] = *u.pid_filter;
    json params = json::object();
    if (const auto* h = std::get_if<HistParams>(&u.params)) {
      params = {{"base", h->base}, {"shift", h->shift}, {"nbuckets", h->nbuckets}};
    } else if (const auto* t = std::get_if<TraceParams>(&u.params)) {
      params = {{"capacity", t->capacity},
                {"mode", t->mode == TraceUnit::kModeWrap ? "wrap" : "stop_on_full"},
                {"include_instr", t->include_instr}};
    } else if (const auto* l = std::get_if<LatParams>(&u.params)) {
      params = {{"bucket_width", l->bucket_width},
                {"nbuckets", l->nbuckets},
                {"irq_threshold", l->irq_threshold}};
    } else if (const auto* s = std::get_if<StallParams>(&u.params)) {
      params = {{"irq_threshold", s->irq_threshold}};
    }
    ju["params"] = params;
    units.push_back(ju);
  }
  j["units"] = units;
  return j;
}

}  // namespace abacus
