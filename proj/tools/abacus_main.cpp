// Command-line harness: run synthetic workloads under monitoring, replay
// recorded logs, decode snapshot pages, and cross-check against the oracle.
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 bad binary
// input (event log or snapshot page).

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "abacus/driver.h"
#include "abacus/errors.h"
#include "abacus/manifest.h"
#include "abacus/monitor.h"
#include "abacus/oracle.h"
#include "abacus/replay.h"
#include "abacus/report.h"
#include "abacus/simsys.h"
#include "abacus/snapshot.h"

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using namespace abacus;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitBadInput = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const void* data, size_t size) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(static_cast<const char*>(data), std::streamsize(size));
  if (!out) throw IoError("write failed for " + path);
}

json parse_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw ConfigError(std::string(what) + ": malformed JSON in " + path);
  return j;
}

// Installed unit list implied by the configured units: slot i hosts the unit
// configured at index i.
std::vector<UnitType> installed_units(const MonitorConfig& cfg) {
  uint32_t max_index = 0;
  for (const UnitSettings& u : cfg.units) max_index = std::max(max_index, u.index);
  std::vector<UnitType> installed(cfg.units.empty() ? 0 : max_index + 1,
                                  UnitType::Absent);
  for (const UnitSettings& u : cfg.units) installed[u.index] = u.type;
  // Absent gaps are not installable; fail early with the offending index.
  for (size_t i = 0; i < installed.size(); ++i)
    if (installed[i] == UnitType::Absent)
      throw ConfigError("units: no unit configured at index " + std::to_string(i) +
                        " (indices must be dense)");
  return installed;
}

unsigned ncores_from_log(const EventLog& log) {
  unsigned n = 1;
  for (const CoreEvent& e : log) n = std::max(n, unsigned(e.core) + 1);
  return n;
}

// Takes the end-of-run snapshot into a fresh page and returns its bytes.
// The clock keeps stepping (idle) until the transfer completes.
std::vector<uint8_t> final_snapshot(Device& dev, ClockSource& clock) {
  Monitor& mon = dev.monitor();
  if (mon.dma_busy()) {
    // Let an in-flight (dma_on_stop) transfer drain first.
    while (mon.dma_busy()) clock.step_one();
  }
  dev.ioctl_write(reg::IRQ_ACK, kIrqDmaDone);
  int page = dev.alloc_page();
  dev.ioctl_write(reg::DMA_DEST, uint32_t(page));
  dev.ioctl_write(reg::DMA_CTRL,
                  (dev.ioctl_read(reg::DMA_CTRL) & reg::DMA_ON_STOP) | reg::DMA_START);
  if (dev.ioctl_read(reg::DMA_STATUS) & reg::DMA_OVERFLOW)
    throw ConfigError("monitor: serialized snapshot exceeds the page size");
  while (!(dev.ioctl_read(reg::DMA_STATUS) & reg::DMA_DONE)) clock.step_one();
  auto bytes = mon.page_bytes(size_t(page));
  return std::vector<uint8_t>(bytes.begin(), bytes.end());
}

void write_report_outputs(const Report& report, const std::string& out_path,
                          const std::string& csv_dir) {
  std::string text = canonical_json(report_to_json(report));
  write_file(out_path, text.data(), text.size());
  if (!csv_dir.empty()) write_report_csv(report, csv_dir);
}

int cmd_run(const std::string& config_path, std::string out_path, std::string log_path,
            std::string page_path, const std::string& csv_dir) {
  RunManifest manifest = manifest_from_json(parse_json_file(config_path, "config"));
  if (out_path.empty() && manifest.report_path) out_path = *manifest.report_path;
  if (out_path.empty()) throw ConfigError("outputs.report: no report path given");
  if (log_path.empty() && manifest.log_path) log_path = *manifest.log_path;
  if (page_path.empty() && manifest.page_path) page_path = *manifest.page_path;

  System sys(manifest.system);
  Monitor mon(manifest.system.ncores, installed_units(manifest.monitor));
  sys.attach_monitor(mon);
  Device dev(mon, &sys);
  dev.alloc_page();                 // page 0: dma_on_stop destination
  dev.ioctl_write(reg::DMA_DEST, 0);
  dev.configure(manifest.monitor);

  run(sys, manifest.max_cycles);

  if (!log_path.empty()) {
    std::vector<uint8_t> bytes = encode_event_log(sys.log());
    write_file(log_path, bytes.data(), bytes.size());
  }

  std::vector<uint8_t> page = final_snapshot(dev, sys);
  if (!page_path.empty()) write_file(page_path, page.data(), page.size());

  write_report_outputs(decode_page(page), out_path, csv_dir);
  return kExitOk;
}

int cmd_replay(const std::string& log_path, const std::string& monitor_path,
               const std::string& out_path, const std::string& csv_dir) {
  EventLog log;
  try {
    std::vector<uint8_t> bytes = read_file(log_path);
    log = decode_event_log(bytes);
  } catch (const DecodeError& e) {
    std::cerr << "error: bad log: " << e.what() << "\n";
    return kExitBadInput;
  }
  for (size_t i = 1; i < log.size(); ++i) {
    if (log[i].cycle < log[i - 1].cycle) {
      std::cerr << "error: bad log: record " << i << " not sorted by cycle\n";
      return kExitBadInput;
    }
  }

  MonitorConfig cfg =
      monitor_config_from_json(parse_json_file(monitor_path, "monitor config"));
  unsigned ncores = ncores_from_log(log);
  Monitor mon(ncores, installed_units(cfg));
  LogReplayer replayer(log, mon);
  Device dev(mon, &replayer);
  dev.alloc_page();
  dev.ioctl_write(reg::DMA_DEST, 0);
  dev.configure(cfg);

  uint64_t end = log.empty() ? 0 : log.back().cycle + 1;
  while (mon.cycle() < end) replayer.step_one();

  std::vector<uint8_t> page = final_snapshot(dev, replayer);
  write_report_outputs(decode_page(page), out_path, csv_dir);
  return kExitOk;
}

int cmd_decode(const std::string& page_path, const std::string& out_path) {
  Report report;
  try {
    std::vector<uint8_t> bytes = read_file(page_path);
    report = decode_page(bytes);
  } catch (const DecodeError& e) {
    std::cerr << "error: bad page: " << e.what() << "\n";
    return kExitBadInput;
  }
  write_report_outputs(report, out_path, "");
  return kExitOk;
}

int cmd_oracle(const std::string& log_path, const std::string& monitor_path,
               const std::string& out_path) {
  EventLog log;
  try {
    std::vector<uint8_t> bytes = read_file(log_path);
    log = decode_event_log(bytes);
  } catch (const DecodeError& e) {
    std::cerr << "error: bad log: " << e.what() << "\n";
    return kExitBadInput;
  }
  MonitorConfig cfg =
      monitor_config_from_json(parse_json_file(monitor_path, "monitor config"));
  installed_units(cfg);  // same density requirement as replay
  OracleOptions opts;
  opts.ncores = ncores_from_log(log);
  OracleResult res = oracle_profile(log, cfg, opts);
  write_report_outputs(res.report, out_path, "");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-intrusive performance-monitor device model"};
  app.require_subcommand(1);

  std::string config_path, out_path, log_path, page_path, csv_dir, monitor_path;

  CLI::App* run = app.add_subcommand("run", "run a workload under monitoring");
  run->add_option("--config", config_path, "run manifest (JSON)")->required();
  run->add_option("--out", out_path, "report output path (JSON)");
  run->add_option("--emit-log", log_path, "write the event log (ABLG)");
  run->add_option("--dump-page", page_path, "write the final snapshot page (ABAC)");
  run->add_option("--csv", csv_dir, "write per-unit CSV files into this directory");

  CLI::App* replay = app.add_subcommand("replay", "re-monitor a recorded event log");
  replay->add_option("--log", log_path, "event log (ABLG)")->required();
  replay->add_option("--monitor", monitor_path, "monitor config (JSON)")->required();
  replay->add_option("--out", out_path, "report output path (JSON)")->required();
  replay->add_option("--csv", csv_dir, "write per-unit CSV files into this directory");

  CLI::App* decode = app.add_subcommand("decode", "decode a snapshot page");
  decode->add_option("--page", page_path, "snapshot page (ABAC)")->required();
  decode->add_option("--out", out_path, "report output path (JSON)")->required();

  CLI::App* oracle = app.add_subcommand("oracle", "reference profile of an event log");
  oracle->add_option("--log", log_path, "event log (ABLG)")->required();
  oracle->add_option("--monitor", monitor_path, "monitor config (JSON)")->required();
  oracle->add_option("--out", out_path, "report output path (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_path, log_path, page_path, csv_dir);
    if (replay->parsed()) return cmd_replay(log_path, monitor_path, out_path, csv_dir);
    if (decode->parsed()) return cmd_decode(page_path, out_path);
    if (oracle->parsed()) return cmd_oracle(log_path, monitor_path, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DeviceError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
