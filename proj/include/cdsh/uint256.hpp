#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cdsh {

using u128 = unsigned __int128;

/// Fixed-width 256-bit unsigned integer, four little-endian 64-bit limbs.
///
/// Arithmetic helpers below are branch-free on operand values; only the
/// bit-scanning helpers (bit_length, the hex parser) look at the data.
struct U256 {
  std::array<std::uint64_t, 4> limb{};

  constexpr U256() = default;
  constexpr explicit U256(std::uint64_t v) : limb{v, 0, 0, 0} {}
  constexpr U256(std::uint64_t l0, std::uint64_t l1, std::uint64_t l2,
                 std::uint64_t l3)
      : limb{l0, l1, l2, l3} {}

  static U256 from_hex(std::string_view hex);
  /// Big-endian bytes; inputs longer than 32 bytes must have leading zeros.
  static U256 from_be_bytes(std::span<const std::uint8_t> bytes);

  /// Writes the low `width` bytes big-endian (width <= 32).
  void to_be_bytes(std::span<std::uint8_t> out) const;
  std::vector<std::uint8_t> to_be_bytes(std::size_t width) const;
  std::string to_hex() const;

  constexpr bool is_zero() const {
    return (limb[0] | limb[1] | limb[2] | limb[3]) == 0;
  }
  constexpr bool bit(unsigned i) const { return (limb[i / 64] >> (i % 64)) & 1U; }
  unsigned bit_length() const;
  /// Four-bit window starting at bit 4*i.
  constexpr unsigned nibble(unsigned i) const {
    return static_cast<unsigned>((limb[i / 16] >> ((i % 16) * 4)) & 0xF);
  }

  friend constexpr bool operator==(const U256&, const U256&) = default;
  friend std::strong_ordering operator<=>(const U256& a, const U256& b) {
    for (int i = 3; i >= 0; --i) {
      if (a.limb[i] != b.limb[i]) return a.limb[i] <=> b.limb[i];
    }
    return std::strong_ordering::equal;
  }
};

/// r = a + b, returns carry out.
inline std::uint64_t add_with_carry(U256& r, const U256& a, const U256& b) {
  u128 acc = 0;
  for (int i = 0; i < 4; ++i) {
    acc += static_cast<u128>(a.limb[i]) + b.limb[i];
    r.limb[i] = static_cast<std::uint64_t>(acc);
    acc >>= 64;
  }
  return static_cast<std::uint64_t>(acc);
}

/// r = a - b, returns borrow out (0 or 1).
inline std::uint64_t sub_with_borrow(U256& r, const U256& a, const U256& b) {
  std::uint64_t borrow = 0;
  for (int i = 0; i < 4; ++i) {
    const u128 d = static_cast<u128>(a.limb[i]) - b.limb[i] - borrow;
    r.limb[i] = static_cast<std::uint64_t>(d);
    borrow = static_cast<std::uint64_t>(d >> 64) & 1U;
  }
  return borrow;
}

/// Returns `a` when mask is all-ones, `b` when mask is zero.
inline U256 select(std::uint64_t mask, const U256& a, const U256& b) {
  U256 r;
  for (int i = 0; i < 4; ++i) r.limb[i] = (a.limb[i] & mask) | (b.limb[i] & ~mask);
  return r;
}

inline U256 shr1(const U256& a) {
  U256 r;
  for (int i = 0; i < 4; ++i) {
    r.limb[i] = a.limb[i] >> 1;
    if (i < 3) r.limb[i] |= a.limb[i + 1] << 63;
  }
  return r;
}

}  // namespace cdsh
