#include <doctest.h>

#include "abacus/events.h"
#include "test_util.h"

using namespace abacus;
using namespace abacus::testutil;

TEST_SUITE("events") {

TEST_CASE("empty log encodes to header only") {
  auto bytes = encode_event_log({});
  REQUIRE(bytes.size() == 8);
  // magic 0x41424C47, version 1, little-endian
  CHECK(bytes[0] == 0x47);
  CHECK(bytes[1] == 0x4C);
  CHECK(bytes[2] == 0x42);
  CHECK(bytes[3] == 0x41);
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 0);
  CHECK(bytes[7] == 0);
}

TEST_CASE("single record layout is bit-exact") {
  CoreEvent e = make_instr(0, {1, 1}, 5, 0x1000);
  auto bytes = encode_event_log(std::vector{e});
  REQUIRE(bytes.size() == 40);
  CHECK(bytes[8] == 0);     // rec_type InstrRetired
  CHECK(bytes[9] == 0);     // core
  CHECK(bytes[10] == 255);  // access n/a
  CHECK(bytes[11] == 0);    // pad
  CHECK(bytes[12] == 1);    // pid lo
  CHECK(bytes[13] == 0);
  CHECK(bytes[14] == 1);  // tid lo
  CHECK(bytes[15] == 0);
  // cycle field: 05 00 00 00 00 00 00 00
  CHECK(bytes[16] == 5);
  for (int i = 17; i < 24; ++i) CHECK(bytes[i] == 0);
  // addr 0x1000
  CHECK(bytes[24] == 0x00);
  CHECK(bytes[25] == 0x10);
  for (int i = 26; i < 32; ++i) CHECK(bytes[i] == 0);
  // aux 0
  for (int i = 32; i < 40; ++i) CHECK(bytes[i] == 0);
}

TEST_CASE("round-trip of randomized valid logs") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    EventLog log = random_valid_log(seed, 1000);
    auto bytes = encode_event_log(log);
    EventLog back = decode_event_log(bytes);
    CHECK(back == log);
    CHECK(encode_event_log(back) == bytes);  // bit-exact re-encode
  }
}

TEST_CASE("decode of header-only input yields empty log") {
  auto bytes = encode_event_log({});
  CHECK(decode_event_log(bytes).empty());
}

TEST_CASE("decode rejects bad magic with offset 0") {
  std::vector<uint8_t> bytes{0xEF, 0xBE, 0xAD, 0xDE, 1, 0, 0, 0};
  try {
    decode_event_log(bytes);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.offset == 0);
    CHECK(std::string(e.what()) == "bad magic at offset 0");
  }
}

TEST_CASE("decode rejects bad version with offset 4") {
  auto bytes = encode_event_log({});
  bytes[4] = 9;
  try {
    decode_event_log(bytes);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.offset == 4);
  }
}

TEST_CASE("decode rejects truncated records at the record boundary") {
  EventLog log = random_valid_log(7, 3);
  auto bytes = encode_event_log(log);
  bytes.resize(bytes.size() - 5);
  try {
    decode_event_log(bytes);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.offset == 8 + 2 * 32);
  }
}

TEST_CASE("decode rejects unknown rec_type at the record offset") {
  auto bytes = encode_event_log(std::vector{make_instr(0, {1, 1}, 0, 0)});
  bytes[8] = 77;
  try {
    decode_event_log(bytes);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.offset == 8);
    CHECK(std::string(e.what()).find("unknown rec_type") != std::string::npos);
  }
}

TEST_CASE("validate: empty stream has no violations") {
  CHECK(validate_event_stream({}).empty());
}

TEST_CASE("validate: zero-latency access is flagged with its index") {
  EventLog log{make_switch(0, {0, 0}, 0, {1, 1}),
               make_access(0, {1, 1}, 1, 0x100, MemOp::Read, 0)};
  auto v = validate_event_stream(log);
  REQUIRE(v.size() == 1);
  CHECK(v[0].index == 1);
  CHECK(v[0].message.find("latency") != std::string::npos);
}

TEST_CASE("validate: zero-length stall is flagged") {
  EventLog log{make_stall(0, {1, 1}, 0, 0)};
  auto v = validate_event_stream(log);
  REQUIRE(v.size() == 1);
  CHECK(v[0].message.find("stall") != std::string::npos);
}

TEST_CASE("validate: pid continuity across a context switch") {
  EventLog log{make_switch(0, {0, 0}, 0, {3, 1}),
               make_access(0, {7, 1}, 1, 0x100, MemOp::Read, 1)};
  auto v = validate_event_stream(log);
  REQUIRE(v.size() == 1);
  CHECK(v[0].index == 1);
  CHECK(v[0].message.find("continuity") != std::string::npos);
}

TEST_CASE("validate: per-core cycle monotonicity") {
  EventLog log{make_instr(0, {1, 1}, 10, 0), make_instr(0, {1, 1}, 9, 0)};
  auto v = validate_event_stream(log);
  REQUIRE(v.size() == 1);
  CHECK(v[0].message.find("regression") != std::string::npos);
}

TEST_CASE("validate: events on different cores are independent") {
  EventLog log{make_instr(1, {1, 1}, 10, 0), make_instr(0, {2, 1}, 9, 0)};
  CHECK(validate_event_stream(log).empty());
}

TEST_CASE("validate: reserved OTHER pid is rejected") {
  EventLog log{make_instr(0, {0xFFFF, 1}, 0, 0)};
  CHECK(validate_event_stream(log).size() == 1);
}

TEST_CASE("encode rejects invalid streams with the offending record index") {
  EventLog log{make_instr(0, {1, 1}, 0, 0),
               make_access(0, {1, 1}, 1, 0, MemOp::Read, 0)};
  try {
    encode_event_log(log);
    FAIL("expected EncodeError");
  } catch (const EncodeError& e) {
    CHECK(e.record_index == 1);
  }
}

}  // TEST_SUITE
