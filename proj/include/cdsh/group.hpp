#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdsh/bytes.hpp"
#include "cdsh/mont_field.hpp"
#include "cdsh/rng.hpp"
#include "cdsh/uint256.hpp"

namespace cdsh {

/// Short Weierstrass curve y^2 = x^3 + ax + b over F_p with a prime-order
/// generator (cofactor 1).
struct CurveSpec {
  std::string name;
  U256 p;
  U256 a;
  U256 b;
  U256 q;
  U256 gx;
  U256 gy;
};

/// NIST P-256.
CurveSpec p256_spec();
/// 1009-element curve used for exhaustive algebra checks (see toy_curve.hpp).
CurveSpec toy_spec();

/// Integer in [0, q). Only a Group can mint one, which keeps it reduced.
class Scalar {
 public:
  Scalar() = default;
  const U256& value() const { return v_; }
  bool is_zero() const { return v_.is_zero(); }
  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  friend class Group;
  explicit Scalar(const U256& v) : v_(v) {}
  U256 v_;
};

/// Affine point or the identity. Non-identity points minted by a Group are
/// always on that group's curve.
class Point {
 public:
  Point() = default;  // identity
  static Point identity() { return {}; }
  bool is_identity() const { return inf_; }
  const U256& x() const { return x_; }
  const U256& y() const { return y_; }
  friend bool operator==(const Point&, const Point&) = default;

 private:
  friend class Group;
  Point(const U256& x, const U256& y) : x_(x), y_(y), inf_(false) {}
  U256 x_;
  U256 y_;
  bool inf_ = true;
};

using ScalarPoint = std::pair<Scalar, Point>;

/// Prime-order elliptic-curve group plus its scalar field.
///
/// Immutable after construction and safe to share across threads. The
/// constructor validates the curve (non-singular, q prime, generator of
/// order q) and throws Error(kInvalidParams) otherwise.
///
/// mul() and mul_base() use fixed 4-bit windows, constant-time table
/// lookups and complete addition formulas, so their instruction trace does
/// not depend on the scalar. msm() is variable-time and intended for
/// verification, where every input is public.
class Group {
 public:
  explicit Group(CurveSpec spec);

  static std::shared_ptr<const Group> production();
  static std::shared_ptr<const Group> toy();
  /// "production" | "p256" | "toy"
  static std::shared_ptr<const Group> by_name(std::string_view name);

  const std::string& name() const { return spec_.name; }
  const CurveSpec& spec() const { return spec_; }
  const U256& order() const { return spec_.q; }
  const Point& generator() const { return g_; }
  std::size_t field_bytes() const { return field_bytes_; }
  std::size_t scalar_bytes() const { return scalar_bytes_; }
  std::size_t point_bytes() const { return 2 * field_bytes_; }

  // Scalars ----------------------------------------------------------------
  Scalar scalar(std::uint64_t v) const;
  /// v mod q.
  Scalar scalar(const U256& v) const;
  Scalar scalar_from_digest(const Digest& d) const;
  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar sub(const Scalar& a, const Scalar& b) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;
  Scalar neg(const Scalar& a) const;
  /// Uniform in [1, q-1].
  Scalar random_scalar(Rng& rng) const;

  Bytes encode_scalar(const Scalar& s) const;
  Scalar decode_scalar(ByteView bytes) const;

  // Points -----------------------------------------------------------------
  /// Validated construction from affine coordinates.
  Point make_point(const U256& x, const U256& y) const;
  bool on_curve(const Point& pt) const;

  Point add(const Point& a, const Point& b) const;
  Point negate(const Point& a) const;
  Point mul(const Scalar& k, const Point& a) const;
  Point mul_base(const Scalar& k) const;
  /// sum k_i * A_i; throws Error(kEmptyMultiscalar) on empty input.
  Point msm(std::span<const ScalarPoint> pairs) const;
  /// Sum of points without scalars.
  Point sum(std::span<const Point> points) const;

  /// Big-endian x || y, field_bytes() each; identity is all zeros.
  Bytes encode_point(const Point& pt) const;
  void encode_point_into(const Point& pt, Bytes& out) const;
  Point decode_point(ByteView bytes) const;

 private:
  struct Proj {
    U256 x;
    U256 y;
    U256 z;
  };

  Proj to_proj(const Point& pt) const;
  Point to_affine(const Proj& pt) const;
  Proj proj_identity() const { return {U256{}, fp_.one(), U256{}}; }
  Proj padd(const Proj& a, const Proj& b) const;
  Proj pdbl(const Proj& a) const { return padd(a, a); }
  static Proj ct_lookup(std::span<const Proj> table, unsigned index);

  CurveSpec spec_;
  MontgomeryField fp_;
  MontgomeryField fq_;
  U256 a_mont_;
  U256 b3_mont_;
  U256 b_mont_;
  Point g_;
  std::size_t field_bytes_;
  std::size_t scalar_bytes_;
  unsigned q_bits_;
  std::vector<Proj> base_table_;  // 64 windows x 16 entries of d * 16^w * G
};

}  // namespace cdsh
