#pragma once

#include <cstddef>
#include <cstdint>

namespace subspect {

// CRC-64/XZ (reflected, poly 0xC96C5795D7870F42, init/xorout ~0).
class Crc64 {
 public:
  Crc64() {
    for (uint64_t i = 0; i < 256; i++) {
      uint64_t c = i;
      for (int b = 0; b < 8; b++)
        c = (c & 1) ? (c >> 1) ^ 0xC96C5795D7870F42ULL : c >> 1;
      table_[i] = c;
    }
  }
  void update(const void* buf, size_t n) {
    const auto* p = static_cast<const uint8_t*>(buf);
    for (size_t i = 0; i < n; i++)
      crc_ = table_[(crc_ ^ p[i]) & 0xff] ^ (crc_ >> 8);
  }
  uint64_t value() const { return ~crc_; }

 private:
  uint64_t crc_ = ~0ULL;
  uint64_t table_[256];
};

}  // namespace subspect
