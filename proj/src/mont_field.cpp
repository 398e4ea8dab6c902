#include "cdsh/mont_field.hpp"

#include <array>
#include <stdexcept>

namespace cdsh {

MontgomeryField::MontgomeryField(const U256& modulus) : m_(modulus) {
  if ((m_.limb[0] & 1U) == 0 || m_ <= U256{1}) {
    throw std::invalid_argument("Montgomery modulus must be odd and > 1");
  }
  // Newton iteration for m^{-1} mod 2^64.
  std::uint64_t inv = 1;
  for (int i = 0; i < 6; ++i) inv *= 2 - m_.limb[0] * inv;
  n0_ = ~inv + 1;

  // R^2 mod m by doubling 1 a total of 512 times.
  U256 x{1};
  for (int i = 0; i < 512; ++i) x = add(x, x);
  r2_ = x;
  one_ = mul(U256{1}, r2_);
}

U256 MontgomeryField::mul(const U256& a, const U256& b) const {
  std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    u128 c = 0;
    for (int j = 0; j < 4; ++j) {
      c += static_cast<u128>(a.limb[j]) * b.limb[i] + t[j];
      t[j] = static_cast<std::uint64_t>(c);
      c >>= 64;
    }
    c += t[4];
    t[4] = static_cast<std::uint64_t>(c);
    t[5] = static_cast<std::uint64_t>(c >> 64);

    const std::uint64_t mm = t[0] * n0_;
    c = static_cast<u128>(mm) * m_.limb[0] + t[0];
    c >>= 64;
    for (int j = 1; j < 4; ++j) {
      c += static_cast<u128>(mm) * m_.limb[j] + t[j];
      t[j - 1] = static_cast<std::uint64_t>(c);
      c >>= 64;
    }
    c += t[4];
    t[3] = static_cast<std::uint64_t>(c);
    t[4] = t[5] + static_cast<std::uint64_t>(c >> 64);
  }
  // t < 2m; subtract m once if t >= m.
  U256 lo{t[0], t[1], t[2], t[3]};
  U256 diff;
  const std::uint64_t borrow = sub_with_borrow(diff, lo, m_);
  // Keep diff when the 5-limb value did not underflow.
  const std::uint64_t keep_lo = static_cast<std::uint64_t>(0) - ((borrow & ~t[4]) & 1U);
  return select(keep_lo, lo, diff);
}

U256 MontgomeryField::add(const U256& a, const U256& b) const {
  U256 s;
  const std::uint64_t carry = add_with_carry(s, a, b);
  U256 d;
  const std::uint64_t borrow = sub_with_borrow(d, s, m_);
  const std::uint64_t keep_s = static_cast<std::uint64_t>(0) - ((borrow & ~carry) & 1U);
  return select(keep_s, s, d);
}

U256 MontgomeryField::sub(const U256& a, const U256& b) const {
  U256 d;
  const std::uint64_t borrow = sub_with_borrow(d, a, b);
  U256 fixed;
  add_with_carry(fixed, d, m_);
  return select(static_cast<std::uint64_t>(0) - borrow, fixed, d);
}

U256 MontgomeryField::pow(const U256& a, const U256& e) const {
  // Fixed 4-bit window.
  std::array<U256, 16> table;
  table[0] = one_;
  table[1] = a;
  for (int d = 2; d < 16; ++d) table[d] = mul(table[d - 1], a);
  U256 result = one_;
  const unsigned nibbles = (e.bit_length() + 3) / 4;
  for (unsigned i = nibbles; i-- > 0;) {
    if (i + 1 != nibbles) {
      for (int k = 0; k < 4; ++k) result = sqr(result);
    }
    const unsigned d = e.nibble(i);
    if (d != 0) result = mul(result, table[d]);
  }
  return result;
}

namespace {

constexpr U256 kP256Prime{0xffffffffffffffffULL, 0x00000000ffffffffULL, 0x0000000000000000ULL,
                          0xffffffff00000001ULL};

}  // namespace

U256 MontgomeryField::inv(const U256& a) const {
  if (m_ == kP256Prime) {
    // Addition chain for p - 2: 255 squarings, 12 multiplications.
    auto sqn = [&](U256 x, int n) {
      while (n-- > 0) x = sqr(x);
      return x;
    };
    const U256 x2 = mul(sqr(a), a);
    const U256 x3 = mul(sqr(x2), a);
    const U256 x6 = mul(sqn(x3, 3), x3);
    const U256 x12 = mul(sqn(x6, 6), x6);
    const U256 x15 = mul(sqn(x12, 3), x3);
    const U256 x30 = mul(sqn(x15, 15), x15);
    const U256 x32 = mul(sqn(x30, 2), x2);
    U256 t = mul(sqn(x32, 32), a);
    t = sqn(t, 96);
    t = mul(sqn(t, 32), x32);
    t = mul(sqn(t, 32), x32);
    t = mul(sqn(t, 30), x30);
    return mul(sqn(t, 2), a);
  }
  U256 e;
  sub_with_borrow(e, m_, U256{2});
  return pow(a, e);
}

bool MontgomeryField::is_probable_prime(const U256& m) {
  if (m < U256{2}) return false;
  static constexpr std::uint64_t kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
  for (std::uint64_t p : kSmall) {
    if (m == U256{p}) return true;
  }
  if (!m.bit(0)) return false;

  const MontgomeryField f(m);
  U256 m_minus_1;
  sub_with_borrow(m_minus_1, m, U256{1});
  U256 d = m_minus_1;
  unsigned s = 0;
  while (!d.bit(0)) {
    d = shr1(d);
    ++s;
  }
  const U256 minus_one = f.to_mont(m_minus_1);

  // Bases: the 13 primes above, then 11 pseudo-random odd bases.
  std::uint64_t extra = 0x9e3779b97f4a7c15ULL;
  for (int round = 0; round < 24; ++round) {
    U256 base;
    if (round < 13) {
      base = U256{kSmall[round]};
    } else {
      extra = extra * 6364136223846793005ULL + 1442695040888963407ULL;
      base = U256{extra | 3, extra ^ 0x5851f42d4c957f2dULL, extra >> 3, 0};
    }
    const U256 b = f.to_mont(base);
    if (b.is_zero()) continue;
    U256 x = f.pow(b, d);
    if (x == f.one() || x == minus_one) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = f.sqr(x);
      if (x == minus_one) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace cdsh
