#include <doctest.h>

#include "abacus/bytes.h"
#include "abacus/monitor.h"
#include "abacus/oracle.h"
#include "abacus/snapshot.h"
#include "test_util.h"

using namespace abacus;
using namespace abacus::testutil;
using namespace abacus::reg;

namespace {

// One DMA round: start, step to completion, return the page image.
std::vector<uint8_t> snapshot_now(Monitor& mon, uint32_t dest) {
  mon.reg_write(DMA_DEST, dest);
  mon.reg_write(IRQ_ACK, kIrqDmaDone);
  mon.reg_write(DMA_CTRL, DMA_START);
  while (mon.dma_busy()) mon.step({});
  auto b = mon.page_bytes(dest);
  return std::vector<uint8_t>(b.begin(), b.end());
}

}  // namespace

TEST_SUITE("dma") {

TEST_CASE("no enabled units: header only, stamped with the current cycle") {
  Monitor mon(2, four_units());
  mon.alloc_page();
  for (int i = 0; i < 42; ++i) mon.step({});
  auto page = snapshot_now(mon, 0);
  Report r = decode_page(page);
  CHECK(r.units.empty());
  CHECK(r.snapshot_cycle == 42);
}

TEST_CASE("single stall unit record has the expected payload length") {
  Monitor mon(2, {UnitType::Stall});
  mon.alloc_page();
  mon.reg_write(unit_window(0) + UNIT_CTRL, UCTRL_ENABLE | 0xFFu << UCTRL_CORE_MASK_SHIFT);
  mon.reg_write(GLOBAL_CTRL, CTRL_ENABLE);
  auto page = snapshot_now(mon, 0);
  CHECK(get_u32(page, 16) == 1);                    // nrecords
  CHECK(get_u32(page, 24) == uint32_t(UnitType::Stall));
  CHECK(get_u32(page, 32) == 8 + 8 + 16);           // payload_len, 2 cores
}

TEST_CASE("transfer takes payload_bytes/4 cycles, then DONE and the irq") {
  Monitor mon(1, {UnitType::Stall});
  mon.alloc_page();
  mon.reg_write(unit_window(0) + UNIT_CTRL, UCTRL_ENABLE | 0xFFu << UCTRL_CORE_MASK_SHIFT);
  mon.reg_write(GLOBAL_CTRL, CTRL_ENABLE);
  size_t image = mon.build_snapshot_image().size();
  mon.reg_write(DMA_CTRL, DMA_START);
  CHECK(mon.reg_read(DMA_STATUS) == DMA_BUSY);
  for (size_t i = 0; i < (image + 3) / 4 - 1; ++i) {
    mon.step({});
    CHECK(mon.reg_read(DMA_STATUS) == DMA_BUSY);
  }
  mon.step({});
  CHECK(mon.reg_read(DMA_STATUS) == DMA_DONE);
  CHECK((mon.reg_read(IRQ_CAUSE) & kIrqDmaDone) != 0);
  mon.reg_write(IRQ_ACK, kIrqDmaDone);
  CHECK(mon.reg_read(DMA_STATUS) == 0);  // ack clears DONE
}

TEST_CASE("mid-run snapshots equal the oracle over the clipped log") {
  SystemConfig scfg = random_system_config(301);
  MonitorConfig mcfg;
  for (uint32_t i = 0; i < 4; ++i) {
    UnitSettings u;
    u.index = i;
    u.type = UnitType(i + 1);
    u.attr_mode = i != 1;
    u.params = i == 0 ? UnitParams(HistParams{0, 6, 64})
               : i == 1 ? UnitParams(TraceParams{32, TraceUnit::kModeWrap, false})
               : i == 2 ? UnitParams(LatParams{})
                       : UnitParams(StallParams{});
    mcfg.units.push_back(u);
  }

  System sys(scfg);
  Monitor mon(scfg.ncores, installed_from(mcfg));
  sys.attach_monitor(mon);
  Device dev(mon, &sys);
  dev.alloc_page();
  dev.alloc_page();
  dev.configure(mcfg);

  // run halfway, snapshot, run to the end, snapshot again
  for (int i = 0; i < 400 && !sys.done(); ++i) sys.step();
  uint64_t t1 = mon.cycle();
  mon.reg_write(DMA_DEST, 0);
  mon.reg_write(DMA_CTRL, DMA_START);
  while (mon.dma_busy()) sys.step();
  run(sys, 1000000);
  uint64_t t2 = mon.cycle();
  mon.reg_write(IRQ_ACK, kIrqDmaDone);
  mon.reg_write(DMA_DEST, 1);
  mon.reg_write(DMA_CTRL, DMA_START);
  while (mon.dma_busy()) sys.step();

  Report first = decode_page(mon.page_bytes(0));
  Report second = decode_page(mon.page_bytes(1));
  CHECK(first.snapshot_cycle == t1);
  CHECK(second.snapshot_cycle == t2);

  auto clip = [&](uint64_t bound) {
    EventLog clipped;
    for (const CoreEvent& e : sys.log())
      if (e.cycle < bound) clipped.push_back(e);
    return clipped;
  };
  OracleResult o1 = oracle_profile(clip(t1), mcfg, {scfg.ncores, true});
  OracleResult o2 = oracle_profile(clip(t2), mcfg, {scfg.ncores, true});
  CHECK(first.units == o1.report.units);
  CHECK(second.units == o2.report.units);
}

TEST_CASE("snapshot is atomic: page equals the image frozen at START") {
  Monitor mon(1, four_units());
  mon.alloc_page();
  enable_all(mon);
  EventLog log = random_valid_log(17, 300);
  LogReplayer rep(log, mon);
  for (int i = 0; i < 50; ++i) rep.step_one();

  auto frozen = mon.build_snapshot_image();
  mon.reg_write(DMA_CTRL, DMA_START);
  // keep accumulating during the transfer
  while (mon.dma_busy()) rep.step_one();
  auto page = mon.page_bytes(0);
  CHECK(std::equal(frozen.begin(), frozen.end(), page.begin()));
  // and the live units moved on
  CHECK(mon.build_snapshot_image() != frozen);
}

TEST_CASE("data port reads the same bytes the DMA copies") {
  Monitor mon(2, four_units());
  mon.alloc_page();
  enable_all(mon);
  feed_log(mon, random_valid_log(23, 400));

  auto page = snapshot_now(mon, 0);
  Report r = decode_page(page);
  REQUIRE(r.units.size() == 4);

  size_t pos = kPageHeaderSize;
  for (size_t i = 0; i < 4; ++i) {
    uint32_t len = get_u32(page, pos + 8);
    std::span<const uint8_t> dma_payload(page.data() + pos + 16, len);
    std::vector<uint8_t> port;
    for (uint32_t w = 0; w < (len + 3) / 4; ++w) {
      mon.reg_write(unit_window(uint32_t(i)) + UNIT_DATA_INDEX, w);
      put_u32(port, mon.reg_read(unit_window(uint32_t(i)) + UNIT_DATA_VALUE));
    }
    CHECK(std::equal(dma_payload.begin(), dma_payload.end(), port.begin()));
    pos += 16 + len;
  }
  // out-of-range word index reads 0
  mon.reg_write(unit_window(0) + UNIT_DATA_INDEX, 1u << 24);
  CHECK(mon.reg_read(unit_window(0) + UNIT_DATA_VALUE) == 0);
}

TEST_CASE("oversized snapshot aborts with OVERFLOW and an empty page header") {
  Monitor mon(1, {UnitType::Trace});
  mon.alloc_page();  // 65536 bytes
  mon.reg_write(unit_window(0) + 0x10, 4096);  // capacity
  mon.reg_write(unit_window(0) + UNIT_CTRL, UCTRL_ENABLE | 0xFFu << UCTRL_CORE_MASK_SHIFT);
  mon.reg_write(GLOBAL_CTRL, CTRL_ENABLE);

  EventLog log;
  for (uint64_t i = 0; i < 3000; ++i)
    log.push_back(make_access(0, {1, 1}, i, i * 64, MemOp::Read, 2));
  feed_log(mon, log);
  REQUIRE(mon.build_snapshot_image().size() > kDefaultPageSize);

  mon.reg_write(DMA_CTRL, DMA_START);
  CHECK(mon.reg_read(DMA_STATUS) == DMA_OVERFLOW);
  Report r = decode_page(mon.page_bytes(0));
  CHECK(r.units.empty());

  // a fitting snapshot afterwards clears the overflow flag
  mon.reg_write(unit_window(0) + 0x10, 8);
  mon.reg_write(DMA_CTRL, DMA_START);
  while (mon.dma_busy()) mon.step({});
  CHECK(mon.reg_read(DMA_STATUS) == DMA_DONE);
}

TEST_CASE("START with an unallocated destination flags a config error") {
  Monitor mon(1, four_units());
  mon.reg_write(DMA_DEST, 3);
  mon.reg_write(DMA_CTRL, DMA_START);
  CHECK((mon.reg_read(GLOBAL_STATUS) & STATUS_CFG_ERR) != 0);
  CHECK(mon.reg_read(DMA_STATUS) == 0);
}

TEST_CASE("decode_page round-trips every field") {
  Monitor mon(3, four_units());
  mon.alloc_page();
  for (size_t i = 0; i < 4; ++i) {
    uint32_t ctrl = UCTRL_ENABLE | 0xFFu << UCTRL_CORE_MASK_SHIFT;
    if (i == 0 || i == 3) ctrl |= UCTRL_ATTR_MODE;
    mon.reg_write(unit_window(uint32_t(i)) + UNIT_CTRL, ctrl);
  }
  mon.reg_write(GLOBAL_CTRL, CTRL_ENABLE);
  feed_log(mon, random_valid_log(29, 500));

  auto page = snapshot_now(mon, 0);
  Report r = decode_page(page);
  REQUIRE(r.units.size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(r.units[i].index == i);
    CHECK(r.units[i].type == UnitType(i + 1));
    CHECK(r.units[i].attr_present == (i == 0 || i == 3));
    if (r.units[i].attr_present) CHECK(r.units[i].attribution.back().pid == 0xFFFF);
  }
}

TEST_CASE("a page of zeros fails with bad magic at offset 0") {
  std::vector<uint8_t> zeros(kDefaultPageSize, 0);
  try {
    decode_page(zeros);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.offset == 0);
    CHECK(std::string(e.what()) == "bad magic at offset 0");
  }
}

TEST_CASE("truncated pages report the offending offset") {
  Monitor mon(1, {UnitType::Lat});
  mon.alloc_page();
  mon.reg_write(unit_window(0) + UNIT_CTRL, UCTRL_ENABLE | 0xFFu << UCTRL_CORE_MASK_SHIFT);
  mon.reg_write(GLOBAL_CTRL, CTRL_ENABLE);
  auto page = snapshot_now(mon, 0);
  std::vector<uint8_t> cut(page.begin(), page.begin() + 30);
  CHECK_THROWS_AS(decode_page(cut), DecodeError);
}

}  // TEST_SUITE
