#include "cdsh/uint256.hpp"

#include <stdexcept>

namespace cdsh {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

U256 U256::from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty() || hex.size() > 64) throw std::invalid_argument("bad hex width");
  U256 r;
  unsigned pos = 0;
  for (auto it = hex.rbegin(); it != hex.rend(); ++it, ++pos) {
    const int v = hex_value(*it);
    if (v < 0) throw std::invalid_argument("bad hex digit");
    r.limb[pos / 16] |= static_cast<std::uint64_t>(v) << ((pos % 16) * 4);
  }
  return r;
}

U256 U256::from_be_bytes(std::span<const std::uint8_t> bytes) {
  U256 r;
  const std::size_t n = bytes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t pos = n - 1 - i;  // byte significance
    if (pos >= 32) {
      if (bytes[i] != 0) throw std::invalid_argument("integer exceeds 256 bits");
      continue;
    }
    r.limb[pos / 8] |= static_cast<std::uint64_t>(bytes[i]) << ((pos % 8) * 8);
  }
  return r;
}

void U256::to_be_bytes(std::span<std::uint8_t> out) const {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t pos = n - 1 - i;
    out[i] = pos < 32 ? static_cast<std::uint8_t>(limb[pos / 8] >> ((pos % 8) * 8)) : 0;
  }
}

std::vector<std::uint8_t> U256::to_be_bytes(std::size_t width) const {
  std::vector<std::uint8_t> out(width);
  to_be_bytes(std::span<std::uint8_t>(out));
  return out;
}

std::string U256::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(64, '0');
  for (unsigned i = 0; i < 64; ++i) s[63 - i] = kDigits[nibble(i)];
  return s;
}

unsigned U256::bit_length() const {
  for (int i = 3; i >= 0; --i) {
    if (limb[i] != 0) return static_cast<unsigned>(i * 64 + 64 - __builtin_clzll(limb[i]));
  }
  return 0;
}

}  // namespace cdsh
