#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace abacus {

// Encoding rejected because a record violates a stream invariant.
struct EncodeError : std::runtime_error {
  EncodeError(size_t index, const std::string& msg)
      : std::runtime_error("record " + std::to_string(index) + ": " + msg),
        record_index(index) {}
  size_t record_index;
};

// Malformed binary input; offset is the byte position of the problem.
struct DecodeError : std::runtime_error {
  DecodeError(size_t off, const std::string& msg)
      : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
  size_t offset;
};

// Unaligned or out-of-range register access.
struct AddressFault : std::runtime_error {
  explicit AddressFault(uint32_t a)
      : std::runtime_error("address fault at 0x" + to_hex(a)), addr(a) {}
  uint32_t addr;

 private:
  static std::string to_hex(uint32_t v) {
    static const char* d = "0123456789abcdef";
    std::string s;
    for (int i = 28; i >= 0; i -= 4) s.push_back(d[(v >> i) & 0xF]);
    return s;
  }
};

// Invalid configuration; the message names the offending field path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Driver-level failures (closed handle, page limit, ...).
struct DeviceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace abacus
