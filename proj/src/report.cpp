#include "abacus/report.h"

#include <fstream>

#include "abacus/errors.h"

namespace abacus {

using nlohmann::json;

namespace {

const char* trace_kind_name(uint8_t k) {
  switch (k) {
    case 0: return "read";
    case 1: return "write";
    case 2: return "instr";
    default: return "unknown";
  }
}

json attribution_to_json(const std::vector<AttrEntry>& attr) {
  json a = json::array();
  for (const AttrEntry& e : attr) a.push_back({{"pid", e.pid}, {"value", e.value}});
  return a;
}

}  // namespace

json report_to_json(const Report& r) {
  json units = json::array();
  for (const UnitReport& u : r.units) {
    json ju{{"index", u.index},
            {"type", unit_type_name(u.type)},
            {"overflow", u.overflow},
            {"attr_present", u.attr_present}};
    if (const auto* h = std::get_if<HistData>(&u.data)) {
      ju["base"] = h->base;
      ju["shift"] = h->shift;
      ju["nbuckets"] = h->nbuckets;
      ju["out_of_range"] = h->out_of_range;
      ju["counts"] = h->counts;
    } else if (const auto* t = std::get_if<TraceData>(&u.data)) {
      ju["capacity"] = t->capacity;
      ju["mode"] = t->mode == 0 ? "wrap" : "stop_on_full";
      ju["count"] = t->count;
      ju["dropped"] = t->dropped;
      json entries = json::array();
      for (const TraceRecord& e : t->entries)
        entries.push_back({{"timestamp", e.timestamp},
                           {"addr", e.addr},
                           {"pid", e.pid},
                           {"core", e.core},
                           {"kind", trace_kind_name(e.kind)},
                           {"latency", e.latency}});
      ju["entries"] = entries;
    } else if (const auto* l = std::get_if<LatData>(&u.data)) {
      ju["bucket_width"] = l->bucket_width;
      ju["nbuckets"] = l->nbuckets;
      ju["counts"] = l->counts;
    } else if (const auto* s = std::get_if<StallData>(&u.data)) {
      ju["ncores"] = s->ncores;
      ju["total"] = s->total;
      ju["per_core"] = s->per_core;
    }
    if (u.attr_present) ju["attribution"] = attribution_to_json(u.attribution);
    units.push_back(ju);
  }
  return json{{"schema_version", r.schema_version},
              {"snapshot_cycle", r.snapshot_cycle},
              {"units", units}};
}

std::string canonical_json(const json& j) { return j.dump(2) + "\n"; }

void write_report_csv(const Report& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const UnitReport& u : r.units) {
    std::filesystem::path file =
        dir / ("unit" + std::to_string(u.index) + "_" + unit_type_name(u.type) + ".csv");
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());

    if (const auto* h = std::get_if<HistData>(&u.data)) {
      out << "bucket_index,range_lo,range_hi,count\n";
      uint64_t width = uint64_t(1) << h->shift;
      for (size_t i = 0; i < h->counts.size(); ++i) {
        uint64_t lo = h->base + i * width;
        out << i << "," << lo << "," << lo + width - 1 << "," << h->counts[i] << "\n";
      }
      out << "out_of_range,,," << h->out_of_range << "\n";
    } else if (const auto* t = std::get_if<TraceData>(&u.data)) {
      out << "timestamp,addr,pid,core,kind,latency\n";
      for (const TraceRecord& e : t->entries)
        out << e.timestamp << "," << e.addr << "," << e.pid << "," << int(e.core) << ","
            << trace_kind_name(e.kind) << "," << e.latency << "\n";
    } else if (const auto* l = std::get_if<LatData>(&u.data)) {
      out << "bucket_index,range_lo,range_hi,count\n";
      for (size_t i = 0; i < l->counts.size(); ++i) {
        uint64_t lo = uint64_t(i) * l->bucket_width;
        if (i + 1 == l->counts.size())
          out << i << "," << lo << ",inf," << l->counts[i] << "\n";
        else
          out << i << "," << lo << "," << lo + l->bucket_width - 1 << "," << l->counts[i]
              << "\n";
      }
    } else if (const auto* s = std::get_if<StallData>(&u.data)) {
      out << "core,stall_cycles\n";
      for (size_t i = 0; i < s->per_core.size(); ++i)
        out << i << "," << s->per_core[i] << "\n";
      out << "total," << s->total << "\n";
    }

    if (u.attr_present) {
      out << "\npid,value\n";
      for (const AttrEntry& e : u.attribution) out << e.pid << "," << e.value << "\n";
    }
  }
}

}  // namespace abacus
