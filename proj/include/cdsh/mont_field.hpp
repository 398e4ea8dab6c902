#pragma once

#include "cdsh/uint256.hpp"

namespace cdsh {

/// Arithmetic modulo an odd modulus m < 2^256 in Montgomery form (R = 2^256).
///
/// Elements handed to mul/add/sub must already be reduced (< m). mul, add,
/// sub and neg run in a fixed instruction sequence regardless of operand
/// values. pow() scans the exponent, so only use it with public exponents.
class MontgomeryField {
 public:
  explicit MontgomeryField(const U256& modulus);

  const U256& modulus() const { return m_; }
  const U256& one() const { return one_; }  // R mod m

  U256 mul(const U256& a, const U256& b) const;
  U256 sqr(const U256& a) const { return mul(a, a); }
  U256 add(const U256& a, const U256& b) const;
  U256 sub(const U256& a, const U256& b) const;
  U256 neg(const U256& a) const { return sub(U256{}, a); }

  /// Montgomery form of any 256-bit value (the input need not be < m).
  U256 to_mont(const U256& a) const { return mul(a, r2_); }
  U256 from_mont(const U256& a) const { return mul(a, U256{1}); }
  /// a mod m for an arbitrary 256-bit value.
  U256 reduce(const U256& a) const { return from_mont(to_mont(a)); }

  /// a^e in Montgomery form; e is a plain integer and treated as public.
  U256 pow(const U256& a, const U256& e) const;
  /// Inverse via Fermat; valid only for prime moduli. inv(0) = 0.
  U256 inv(const U256& a) const;

  /// Miller-Rabin over fixed bases, deterministic for m < 3.3e24 and
  /// probabilistic (error < 4^-24) above that.
  static bool is_probable_prime(const U256& m);

 private:
  U256 m_;
  U256 one_;
  U256 r2_;
  std::uint64_t n0_ = 0;  // -m^{-1} mod 2^64
};

}  // namespace cdsh
