#include <map>

#include "cdsh/error.hpp"
#include "cdsh/group.hpp"
#include "cdsh/mont_field.hpp"
#include "cdsh/rng.hpp"
#include "cdsh/toy_curve.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace cdsh;
using oracle::cpp_int;

namespace {

cpp_int random_below(Rng& rng, const cpp_int& bound) {
  Digest d;
  rng.fill(d);
  return oracle::to_int(U256::from_be_bytes(d)) % bound;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kConfig;
}

}  // namespace

TEST_CASE("U256 byte and hex round trips") {
  const U256 v = U256::from_hex("0123456789abcdeffedcba98765432100f1e2d3c4b5a69788796a5b4c3d2e1f0");
  CHECK(U256::from_be_bytes(v.to_be_bytes(32)) == v);
  CHECK(U256::from_hex(v.to_hex()) == v);
  CHECK(v.bit_length() == 249);
  CHECK(v.nibble(0) == 0x0);
  CHECK(v.nibble(1) == 0xf);
  CHECK(v.nibble(63) == 0x0);
  CHECK(v.nibble(62) == 0x1);

  U256 r;
  const U256 max(~0ULL, ~0ULL, ~0ULL, ~0ULL);
  CHECK(add_with_carry(r, max, U256{1}) == 1);
  CHECK(r.is_zero());
  CHECK(sub_with_borrow(r, U256{}, U256{1}) == 1);
  CHECK(r == max);
}

TEST_CASE("Montgomery arithmetic agrees with big-integer arithmetic") {
  Rng rng(11);
  for (const CurveSpec& spec : {p256_spec(), toy_spec()}) {
    for (const U256& modulus : {spec.p, spec.q}) {
      const MontgomeryField f(modulus);
      const cpp_int m = oracle::to_int(modulus);
      for (int i = 0; i < 200; ++i) {
        const cpp_int a = random_below(rng, m);
        const cpp_int b = random_below(rng, m);
        const U256 am = f.to_mont(oracle::to_u256(a));
        const U256 bm = f.to_mont(oracle::to_u256(b));
        CHECK(oracle::to_int(f.from_mont(f.mul(am, bm))) == (a * b) % m);
        CHECK(oracle::to_int(f.from_mont(f.add(am, bm))) == (a + b) % m);
        CHECK(oracle::to_int(f.from_mont(f.sub(am, bm))) == oracle::mod(a - b, m));
        CHECK(oracle::to_int(f.from_mont(f.pow(am, oracle::to_u256(b)))) ==
              boost::multiprecision::powm(a, b, m));
        if (a != 0) {
          CHECK(oracle::to_int(f.from_mont(f.inv(am))) == oracle::inv(a, m));
        }
      }
    }
  }
}

TEST_CASE("primality test") {
  CHECK(MontgomeryField::is_probable_prime(p256_spec().p));
  CHECK(MontgomeryField::is_probable_prime(p256_spec().q));
  CHECK(MontgomeryField::is_probable_prime(U256{1009}));
  CHECK_FALSE(MontgomeryField::is_probable_prime(U256{561}));   // Carmichael
  CHECK_FALSE(MontgomeryField::is_probable_prime(U256{1}));
  CHECK_FALSE(MontgomeryField::is_probable_prime(U256{1019ULL * 1009ULL}));
  CHECK(MontgomeryField::is_probable_prime(U256{2}));
  // 2^255 - 19 is prime, 2^255 - 21 is not.
  CHECK(MontgomeryField::is_probable_prime(
      U256::from_hex("7fffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffed")));
  CHECK_FALSE(MontgomeryField::is_probable_prime(
      U256::from_hex("7fffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffeb")));
}

TEST_CASE("pinned toy curve has the stated prime order") {
  const oracle::Curve c(toy_spec());
  long count = 1;  // identity
  for (long x = 0; x < toy::kP; ++x) {
    const long rhs = ((x * x % toy::kP) * x + toy::kA * x + toy::kB) % toy::kP;
    for (long y = 0; y < toy::kP; ++y) {
      if (y * y % toy::kP == rhs) ++count;
    }
  }
  CHECK(count == toy::kOrder);
  CHECK(c.on_curve(c.g));
  CHECK_FALSE(c.mul(toy::kOrder - 1, c.g) == std::nullopt);
}

TEST_CASE("toy group: every multiple of G matches the oracle") {
  const auto g = Group::toy();
  const oracle::Curve c(g->spec());
  oracle::Pt acc;
  for (std::uint64_t k = 0; k < toy::kOrder; ++k) {
    const Scalar s = g->scalar(k);
    CHECK(c.same(acc, g->mul_base(s)));
    CHECK(c.same(acc, g->mul(s, g->generator())));
    acc = c.add(acc, c.g);
  }
  CHECK_FALSE(acc.has_value());
}

TEST_CASE("toy group: addition table rows match the oracle") {
  const auto g = Group::toy();
  const oracle::Curve c(g->spec());
  std::vector<Point> pts;
  std::vector<oracle::Pt> opts;
  oracle::Pt acc;
  for (std::uint64_t k = 0; k < toy::kOrder; ++k) {
    pts.push_back(g->mul_base(g->scalar(k)));
    opts.push_back(acc);
    acc = c.add(acc, c.g);
  }
  Rng rng(5);
  // 24 random rows plus the identity row, each against every point.
  std::vector<std::size_t> rows = {0};
  for (int i = 0; i < 24; ++i) rows.push_back(rng.uniform(toy::kOrder));
  for (std::size_t i : rows) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      REQUIRE(c.same(c.add(opts[i], opts[j]), g->add(pts[i], pts[j])));
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(g->add(pts[i], g->negate(pts[i])).is_identity());
  }
}

TEST_CASE("P-256 doubling test vector") {
  const auto g = Group::production();
  const Point two_g = g->add(g->generator(), g->generator());
  CHECK(two_g.x() ==
        U256::from_hex("7cf27b188d034f7e8a52380304b51ac3c08969e277f21b35a60b48fc47669978"));
  CHECK(two_g.y() ==
        U256::from_hex("07775510db8ed040293d9ac69f7430dbba7dade63ce982299e04b79d227873d1"));
  CHECK(g->mul_base(g->scalar(2)) == two_g);
}

TEST_CASE("P-256 scalar multiplication matches the oracle") {
  const auto g = Group::production();
  const oracle::Curve c(g->spec());
  Rng rng(99);
  for (int i = 0; i < 12; ++i) {
    const cpp_int k = random_below(rng, c.q);
    const Scalar s = g->scalar(oracle::to_u256(k));
    const oracle::Pt expect = c.mul(k, c.g);
    CHECK(c.same(expect, g->mul_base(s)));
    const cpp_int k2 = random_below(rng, c.q);
    const Point base = g->mul_base(g->scalar(oracle::to_u256(k2)));
    CHECK(c.same(c.mul(k, c.mul(k2, c.g)), g->mul(s, base)));
  }
  // Edge scalars.
  const Scalar q_minus_1 = g->neg(g->scalar(1));
  CHECK(g->mul_base(q_minus_1) == g->negate(g->generator()));
  CHECK(g->mul_base(g->scalar(0)).is_identity());
  CHECK(g->mul(g->scalar(5), Point::identity()).is_identity());
}

TEST_CASE("msm equals the naive fold") {
  for (const auto& g : {Group::production(), Group::toy()}) {
    Rng rng(3);
    for (std::size_t n : {1U, 2U, 7U, 33U}) {
      std::vector<ScalarPoint> pairs;
      Point naive;
      for (std::size_t i = 0; i < n; ++i) {
        const Scalar k = g->random_scalar(rng);
        const Point p = g->mul_base(g->random_scalar(rng));
        pairs.emplace_back(k, p);
        naive = g->add(naive, g->mul(k, p));
      }
      pairs.emplace_back(g->scalar(4), Point::identity());
      CHECK(g->msm(pairs) == naive);
    }
    CHECK(code_of([&] { g->msm({}); }) == ErrorCode::kEmptyMultiscalar);
  }
}

TEST_CASE("scalar field operations") {
  const auto g = Group::production();
  const oracle::Curve c(g->spec());
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Scalar a = g->random_scalar(rng);
    const Scalar b = g->random_scalar(rng);
    const cpp_int ai = oracle::to_int(a.value());
    const cpp_int bi = oracle::to_int(b.value());
    CHECK(oracle::to_int(g->mul(a, b).value()) == (ai * bi) % c.q);
    CHECK(oracle::to_int(g->add(a, b).value()) == (ai + bi) % c.q);
    CHECK(oracle::to_int(g->sub(a, b).value()) == oracle::mod(ai - bi, c.q));
  }
  // Reduction of an out-of-range value.
  const U256 big = U256::from_hex("ffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffff");
  CHECK(oracle::to_int(g->scalar(big).value()) == oracle::to_int(big) % c.q);
}

TEST_CASE("random_scalar is uniform on the toy group") {
  const auto g = Group::toy();
  Rng rng(2024);
  const std::size_t draws = 100'800;
  std::map<std::uint64_t, std::size_t> counts;
  for (std::size_t i = 0; i < draws; ++i) {
    const Scalar s = g->random_scalar(rng);
    REQUIRE_FALSE(s.is_zero());
    ++counts[s.value().limb[0]];
  }
  CHECK(counts.size() == toy::kOrder - 1);
  const double expected = static_cast<double>(draws) / (toy::kOrder - 1);
  double chi2 = 0;
  for (const auto& [v, n] : counts) {
    const double d = static_cast<double>(n) - expected;
    chi2 += d * d / expected;
  }
  // df = 1007; the 0.999 quantile is about 1148.
  CHECK(chi2 < 1148.0);
}

TEST_CASE("point and scalar encodings") {
  const auto g = Group::production();
  Rng rng(8);
  const Point p = g->mul_base(g->random_scalar(rng));
  const Bytes enc = g->encode_point(p);
  CHECK(enc.size() == 64);
  CHECK(g->decode_point(enc) == p);
  CHECK(g->decode_point(Bytes(64, 0)).is_identity());
  CHECK(code_of([&] { g->decode_point(Bytes(63, 1)); }) == ErrorCode::kInvalidPointEncoding);

  const Scalar s = g->random_scalar(rng);
  CHECK(g->decode_scalar(g->encode_scalar(s)) == s);
  CHECK(code_of([&] { g->decode_scalar(g->order().to_be_bytes(32)); }) ==
        ErrorCode::kInvalidScalarEncoding);
  CHECK(code_of([&] { g->decode_scalar(Bytes(31, 0)); }) == ErrorCode::kInvalidScalarEncoding);

  const auto toy = Group::toy();
  CHECK(toy->point_bytes() == 4);
  CHECK(toy->scalar_bytes() == 2);
}

TEST_CASE("decoding rejects single-byte corruptions") {
  const auto g = Group::production();
  Rng rng(77);
  const Point p = g->mul_base(g->random_scalar(rng));
  const Bytes enc = g->encode_point(p);
  std::size_t rejected = 0;
  std::size_t off_curve_accepted = 0;
  for (int i = 0; i < 10'000; ++i) {
    Bytes b = enc;
    const std::size_t pos = rng.uniform(b.size());
    b[pos] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
    try {
      const Point q = g->decode_point(b);
      if (!g->on_curve(q)) ++off_curve_accepted;
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::kInvalidPointEncoding);
      ++rejected;
    }
  }
  CHECK(off_curve_accepted == 0);
  CHECK(rejected == 10'000);
}

TEST_CASE("group construction validates parameters") {
  CurveSpec bad_g = toy_spec();
  bad_g.gy = U256{100};
  CHECK(code_of([&] { Group g(bad_g); }) == ErrorCode::kInvalidParams);

  // y^2 = x^3 - 3x + 2 has a double root at x = 1; (2, 2) lies on it.
  CurveSpec singular = toy_spec();
  singular.a = U256{toy::kP - 3};
  singular.b = U256{2};
  singular.gx = U256{2};
  singular.gy = U256{2};
  CHECK(code_of([&] { Group g(singular); }) == ErrorCode::kInvalidParams);

  CurveSpec wrong_order = toy_spec();
  wrong_order.q = U256{1013};
  CHECK(code_of([&] { Group g(wrong_order); }) == ErrorCode::kInvalidParams);

  CHECK(code_of([] { Group::by_name("nope"); }) == ErrorCode::kConfig);
  CHECK(Group::by_name("p256") == Group::production());
}
