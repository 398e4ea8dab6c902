#include "cdsh/bytes.hpp"

#include <algorithm>

namespace cdsh {

std::string to_hex(ByteView b) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(b.size() * 2);
  for (std::uint8_t v : b) {
    s.push_back(kDigits[v >> 4]);
    s.push_back(kDigits[v & 0xF]);
  }
  return s;
}

Bytes from_hex(std::string_view hex) {
  auto value = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = value(hex[i]);
    const int lo = value(hex[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit");
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

void ByteReader::fail() const { throw Error(error_code_); }

ByteView ByteReader::take(std::size_t n) {
  if (n > remaining()) fail();
  const ByteView out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint32_t ByteReader::u32() {
  const ByteView b = take(4);
  return static_cast<std::uint32_t>(b[0]) << 24 | static_cast<std::uint32_t>(b[1]) << 16 |
         static_cast<std::uint32_t>(b[2]) << 8 | static_cast<std::uint32_t>(b[3]);
}

std::uint64_t ByteReader::u64() {
  const std::uint64_t hi = u32();
  return hi << 32 | u32();
}

ByteView ByteReader::prefixed() { return take(u32()); }

Digest ByteReader::digest() {
  Digest d;
  const ByteView b = take(d.size());
  std::copy(b.begin(), b.end(), d.begin());
  return d;
}

void ByteReader::expect_done() const {
  if (!done()) fail();
}

}  // namespace cdsh
