#include "cdsh/group.hpp"

#include <algorithm>

#include "cdsh/error.hpp"
#include "cdsh/toy_curve.hpp"

namespace cdsh {
namespace {

std::size_t bytes_for(const U256& v) { return (v.bit_length() + 7) / 8; }

}  // namespace

CurveSpec p256_spec() {
  return CurveSpec{
      "p256",
      U256::from_hex("ffffffff00000001000000000000000000000000ffffffffffffffffffffffff"),
      U256::from_hex("ffffffff00000001000000000000000000000000fffffffffffffffffffffffc"),
      U256::from_hex("5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b"),
      U256::from_hex("ffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551"),
      U256::from_hex("6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"),
      U256::from_hex("4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5"),
  };
}

CurveSpec toy_spec() {
  return CurveSpec{"toy",        U256{toy::kP},  U256{toy::kA},  U256{toy::kB},
                   U256{toy::kOrder}, U256{toy::kGx}, U256{toy::kGy}};
}

Group::Group(CurveSpec spec)
    : spec_(std::move(spec)),
      fp_(spec_.p),
      fq_(spec_.q),
      field_bytes_(bytes_for(spec_.p)),
      scalar_bytes_(bytes_for(spec_.q)),
      q_bits_(spec_.q.bit_length()) {
  if (!MontgomeryField::is_probable_prime(spec_.p)) {
    throw Error(ErrorCode::kInvalidParams, "field modulus is not prime");
  }
  if (!MontgomeryField::is_probable_prime(spec_.q)) {
    throw Error(ErrorCode::kInvalidParams, "group order is not prime");
  }
  if (spec_.a >= spec_.p || spec_.b >= spec_.p) {
    throw Error(ErrorCode::kInvalidParams, "curve coefficients not reduced");
  }
  a_mont_ = fp_.to_mont(spec_.a);
  b_mont_ = fp_.to_mont(spec_.b);
  b3_mont_ = fp_.add(fp_.add(b_mont_, b_mont_), b_mont_);

  // 4a^3 + 27b^2 != 0
  const U256 a3 = fp_.mul(fp_.sqr(a_mont_), a_mont_);
  const U256 b2 = fp_.sqr(b_mont_);
  const U256 disc = fp_.add(fp_.mul(fp_.to_mont(U256{4}), a3), fp_.mul(fp_.to_mont(U256{27}), b2));
  if (disc.is_zero()) throw Error(ErrorCode::kInvalidParams, "singular curve");

  g_ = Point(spec_.gx, spec_.gy);
  if (spec_.gx >= spec_.p || spec_.gy >= spec_.p || !on_curve(g_)) {
    throw Error(ErrorCode::kInvalidParams, "generator not on curve");
  }

  // Fixed-base table: entry [w][d] = d * 16^w * G.
  base_table_.resize(64 * 16);
  Proj window_base = to_proj(g_);
  for (int w = 0; w < 64; ++w) {
    Proj* row = &base_table_[static_cast<std::size_t>(w) * 16];
    row[0] = proj_identity();
    for (int d = 1; d < 16; ++d) row[d] = padd(row[d - 1], window_base);
    window_base = padd(row[15], window_base);
  }

  // q * G must be the identity. Computed as (q-1)G + G so the scalar stays
  // in range.
  U256 q_minus_1;
  sub_with_borrow(q_minus_1, spec_.q, U256{1});
  if (!add(mul_base(Scalar(q_minus_1)), g_).is_identity()) {
    throw Error(ErrorCode::kInvalidParams, "generator order is not q");
  }
}

std::shared_ptr<const Group> Group::production() {
  static const auto g = std::make_shared<const Group>(p256_spec());
  return g;
}

std::shared_ptr<const Group> Group::toy() {
  static const auto g = std::make_shared<const Group>(toy_spec());
  return g;
}

std::shared_ptr<const Group> Group::by_name(std::string_view name) {
  if (name == "production" || name == "p256") return production();
  if (name == "toy") return toy();
  throw Error(ErrorCode::kConfig, "unknown group '" + std::string(name) + "'");
}

// Scalars --------------------------------------------------------------------

Scalar Group::scalar(std::uint64_t v) const { return scalar(U256{v}); }

Scalar Group::scalar(const U256& v) const { return Scalar(fq_.reduce(v)); }

Scalar Group::scalar_from_digest(const Digest& d) const {
  return scalar(U256::from_be_bytes(d));
}

Scalar Group::add(const Scalar& a, const Scalar& b) const { return Scalar(fq_.add(a.v_, b.v_)); }

Scalar Group::sub(const Scalar& a, const Scalar& b) const { return Scalar(fq_.sub(a.v_, b.v_)); }

Scalar Group::mul(const Scalar& a, const Scalar& b) const {
  // mont(a) * b = a * b * R * R^-1
  return Scalar(fq_.mul(fq_.to_mont(a.v_), b.v_));
}

Scalar Group::neg(const Scalar& a) const { return Scalar(fq_.neg(a.v_)); }

Scalar Group::random_scalar(Rng& rng) const {
  std::array<std::uint8_t, 32> buf;
  for (;;) {
    rng.fill(buf);
    U256 v = U256::from_be_bytes(buf);
    for (unsigned i = q_bits_; i < 256; ++i) v.limb[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    if (!v.is_zero() && v < spec_.q) return Scalar(v);
  }
}

Bytes Group::encode_scalar(const Scalar& s) const { return s.v_.to_be_bytes(scalar_bytes_); }

Scalar Group::decode_scalar(ByteView bytes) const {
  if (bytes.size() != scalar_bytes_) throw Error(ErrorCode::kInvalidScalarEncoding);
  const U256 v = U256::from_be_bytes(bytes);
  if (v >= spec_.q) throw Error(ErrorCode::kInvalidScalarEncoding);
  return Scalar(v);
}

// Points ---------------------------------------------------------------------

bool Group::on_curve(const Point& pt) const {
  if (pt.inf_) return true;
  if (pt.x_ >= spec_.p || pt.y_ >= spec_.p) return false;
  const U256 x = fp_.to_mont(pt.x_);
  const U256 y = fp_.to_mont(pt.y_);
  const U256 rhs = fp_.add(fp_.mul(fp_.add(fp_.sqr(x), a_mont_), x), b_mont_);
  return fp_.sqr(y) == rhs;
}

Point Group::make_point(const U256& x, const U256& y) const {
  Point pt(x, y);
  if (!on_curve(pt)) throw Error(ErrorCode::kInvalidPointEncoding);
  return pt;
}

Group::Proj Group::to_proj(const Point& pt) const {
  if (pt.inf_) return proj_identity();
  return {fp_.to_mont(pt.x_), fp_.to_mont(pt.y_), fp_.one()};
}

Point Group::to_affine(const Proj& pt) const {
  if (pt.z.is_zero()) return Point::identity();
  const U256 zinv = fp_.inv(pt.z);
  return Point(fp_.from_mont(fp_.mul(pt.x, zinv)), fp_.from_mont(fp_.mul(pt.y, zinv)));
}

// Complete addition for short Weierstrass curves of odd order
// (Renes-Costello-Batina 2016, Algorithm 1; 12M + 3m_a + 2m_3b + 23a).
Group::Proj Group::padd(const Proj& p1, const Proj& p2) const {
  const MontgomeryField& f = fp_;
  U256 t0 = f.mul(p1.x, p2.x);
  U256 t1 = f.mul(p1.y, p2.y);
  U256 t2 = f.mul(p1.z, p2.z);
  U256 t3 = f.add(p1.x, p1.y);
  U256 t4 = f.add(p2.x, p2.y);
  t3 = f.mul(t3, t4);
  t4 = f.add(t0, t1);
  t3 = f.sub(t3, t4);
  t4 = f.add(p1.x, p1.z);
  U256 t5 = f.add(p2.x, p2.z);
  t4 = f.mul(t4, t5);
  t5 = f.add(t0, t2);
  t4 = f.sub(t4, t5);
  t5 = f.add(p1.y, p1.z);
  U256 x3 = f.add(p2.y, p2.z);
  t5 = f.mul(t5, x3);
  x3 = f.add(t1, t2);
  t5 = f.sub(t5, x3);
  U256 z3 = f.mul(a_mont_, t4);
  x3 = f.mul(b3_mont_, t2);
  z3 = f.add(x3, z3);
  x3 = f.sub(t1, z3);
  z3 = f.add(t1, z3);
  U256 y3 = f.mul(x3, z3);
  t1 = f.add(t0, t0);
  t1 = f.add(t1, t0);
  t2 = f.mul(a_mont_, t2);
  t4 = f.mul(b3_mont_, t4);
  t1 = f.add(t1, t2);
  t2 = f.sub(t0, t2);
  t2 = f.mul(a_mont_, t2);
  t4 = f.add(t4, t2);
  t2 = f.mul(t1, t4);
  y3 = f.add(y3, t2);
  t2 = f.mul(t5, t4);
  x3 = f.mul(x3, t3);
  x3 = f.sub(x3, t2);
  t2 = f.mul(t3, t1);
  z3 = f.mul(z3, t5);
  z3 = f.add(z3, t2);
  return {x3, y3, z3};
}

Group::Proj Group::ct_lookup(std::span<const Proj> table, unsigned index) {
  Proj out{};
  for (unsigned i = 0; i < table.size(); ++i) {
    const std::uint64_t mask =
        static_cast<std::uint64_t>(0) - ((static_cast<std::uint64_t>(i ^ index) - 1) >> 63);
    out.x = select(mask, table[i].x, out.x);
    out.y = select(mask, table[i].y, out.y);
    out.z = select(mask, table[i].z, out.z);
  }
  return out;
}

Point Group::add(const Point& a, const Point& b) const {
  return to_affine(padd(to_proj(a), to_proj(b)));
}

Point Group::negate(const Point& a) const {
  if (a.inf_) return a;
  return Point(a.x_, fp_.from_mont(fp_.neg(fp_.to_mont(a.y_))));
}

Point Group::mul(const Scalar& k, const Point& a) const {
  std::array<Proj, 16> table;
  table[0] = proj_identity();
  table[1] = to_proj(a);
  for (int d = 2; d < 16; ++d) table[d] = padd(table[d - 1], table[1]);

  Proj acc = proj_identity();
  for (int w = 63; w >= 0; --w) {
    acc = pdbl(pdbl(pdbl(pdbl(acc))));
    acc = padd(acc, ct_lookup(table, k.v_.nibble(static_cast<unsigned>(w))));
  }
  return to_affine(acc);
}

Point Group::mul_base(const Scalar& k) const {
  Proj acc = proj_identity();
  for (unsigned w = 0; w < 64; ++w) {
    const std::span<const Proj> row(&base_table_[w * 16], 16);
    acc = padd(acc, ct_lookup(row, k.v_.nibble(w)));
  }
  return to_affine(acc);
}

Point Group::msm(std::span<const ScalarPoint> pairs) const {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyMultiscalar);

  // Interleaved 4-bit windows (Straus). Variable time: inputs are public.
  unsigned top = 0;
  std::vector<std::array<Proj, 16>> tables(pairs.size());
  std::vector<unsigned> needed(pairs.size(), 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const U256& k = pairs[i].first.v_;
    const unsigned windows = (k.bit_length() + 3) / 4;
    top = std::max(top, windows);
    if (windows == 0 || pairs[i].second.inf_) continue;
    unsigned max_digit = 0;
    for (unsigned w = 0; w < windows; ++w) max_digit = std::max(max_digit, k.nibble(w));
    needed[i] = max_digit;
    auto& t = tables[i];
    t[1] = to_proj(pairs[i].second);
    for (unsigned d = 2; d <= max_digit; ++d) t[d] = padd(t[d - 1], t[1]);
  }

  Proj acc = proj_identity();
  for (unsigned w = top; w-- > 0;) {
    acc = pdbl(pdbl(pdbl(pdbl(acc))));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (needed[i] == 0) continue;
      const unsigned d = pairs[i].first.v_.nibble(w);
      if (d != 0) acc = padd(acc, tables[i][d]);
    }
  }
  return to_affine(acc);
}

Point Group::sum(std::span<const Point> points) const {
  Proj acc = proj_identity();
  for (const Point& pt : points) acc = padd(acc, to_proj(pt));
  return to_affine(acc);
}

void Group::encode_point_into(const Point& pt, Bytes& out) const {
  const std::size_t start = out.size();
  out.resize(start + point_bytes(), 0);
  if (pt.inf_) return;
  const std::span<std::uint8_t> dst(out.data() + start, point_bytes());
  pt.x_.to_be_bytes(dst.first(field_bytes_));
  pt.y_.to_be_bytes(dst.subspan(field_bytes_));
}

Bytes Group::encode_point(const Point& pt) const {
  Bytes out;
  out.reserve(point_bytes());
  encode_point_into(pt, out);
  return out;
}

Point Group::decode_point(ByteView bytes) const {
  if (bytes.size() != point_bytes()) throw Error(ErrorCode::kInvalidPointEncoding);
  if (std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; })) {
    return Point::identity();
  }
  const U256 x = U256::from_be_bytes(bytes.first(field_bytes_));
  const U256 y = U256::from_be_bytes(bytes.subspan(field_bytes_));
  return make_point(x, y);
}

}  // namespace cdsh
