#include <set>

#include "cdsh/aead.hpp"
#include "cdsh/error.hpp"
#include "cdsh/hash_suite.hpp"
#include "cdsh/rng.hpp"
#include "cdsh/sha256.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace cdsh;

namespace {

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

Bytes bytes_of(std::string_view s) { return Bytes(s.begin(), s.end()); }

void put_field(Bytes& out, ByteView b) {
  append_u32(out, static_cast<std::uint32_t>(b.size()));
  append(out, b);
}

}  // namespace

TEST_CASE("SHA-256 known answers and reference agreement") {
  CHECK(to_hex(sha256(bytes_of("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(to_hex(sha256(Bytes{})) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  Rng rng(1);
  for (std::size_t len : {1U, 55U, 56U, 63U, 64U, 65U, 200U, 1000U}) {
    Bytes m(len);
    rng.fill(m);
    CHECK(sha256(m) == oracle::sha256(m));
    Sha256 inc;
    inc.update(ByteView(m).first(len / 3));
    inc.update(ByteView(m).subspan(len / 3));
    CHECK(inc.finish() == oracle::sha256(m));
  }
}

TEST_CASE("hex helpers and ByteReader") {
  const Bytes b = from_hex("00ff10");
  CHECK(b == Bytes{0x00, 0xff, 0x10});
  CHECK(to_hex(b) == "00ff10");
  Bytes buf;
  append_u32(buf, 7);
  append_prefixed(buf, b);
  ByteReader r(buf, ErrorCode::kMessageParse);
  CHECK(r.u32() == 7);
  const ByteView p = r.prefixed();
  CHECK(Bytes(p.begin(), p.end()) == b);
  CHECK(r.done());
  CHECK(code_of([&] { r.u8(); }) == ErrorCode::kMessageParse);
}

TEST_CASE("Rng is deterministic and forks independently") {
  Rng a(42), b(42), c(43);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  Rng f1 = a.fork("x");
  Rng f2 = a.fork("y");
  CHECK(f1.next_u64() != f2.next_u64());
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform(7) < 7);
}

TEST_CASE("H1 matches an independent SHA-256 evaluation of the canonical layout") {
  const auto g = Group::toy();
  const HashSuite h(*g);
  const Scalar s = g->scalar(7);
  const Bytes did = bytes_of("dev-1");

  Bytes layout = bytes_of("CDSH-H1");
  put_field(layout, did);
  put_field(layout, Bytes{0x00, 0x07});
  const auto digest = oracle::sha256(layout);
  const auto expected = oracle::to_int(U256::from_be_bytes(digest)) % 1009;
  REQUIRE(expected != 0);
  CHECK(oracle::to_int(h.h1(did, s).value()) == expected);
}

TEST_CASE("H7 and H9 match the canonical layout on the production group") {
  const auto g = Group::production();
  const HashSuite h(*g);
  Rng rng(6);
  const Point r2 = g->mul_base(g->random_scalar(rng));
  const Timestamp t = 0x01020304;

  Bytes layout = bytes_of("CDSH-H7");
  put_field(layout, g->encode_point(r2));
  put_field(layout, Bytes{1, 2, 3, 4});
  CHECK(h.h7(r2, t) == oracle::sha256(layout));

  Digest hr3;
  rng.fill(hr3);
  Bytes l9 = bytes_of("CDSH-H9");
  put_field(l9, hr3);
  put_field(l9, Bytes{1, 2, 3, 4});
  CHECK(h.h9(hr3, t) == oracle::sha256(l9));
}

TEST_CASE("hash functions are domain separated") {
  const auto g = Group::production();
  const Bytes a = bytes_of("a"), b = bytes_of("b"), c = bytes_of("c");
  const hash::Field f[] = {hash::field(a), hash::field(b), hash::field(c)};
  // H3 and H8 share the input signature (Bytes x3).
  CHECK(hash::digest_fields(3, *g, f) != hash::digest_fields(8, *g, f));
  std::set<Digest> outs;
  for (int k = 1; k <= 9; ++k) outs.insert(hash::digest_fields(k, *g, f));
  CHECK(outs.size() == 9);

  // Field boundaries are framed: ("ab","c") != ("a","bc").
  const Bytes ab = bytes_of("ab"), bc = bytes_of("bc");
  const hash::Field f1[] = {hash::field(ab), hash::field(c)};
  const hash::Field f2[] = {hash::field(a), hash::field(bc)};
  CHECK(hash::digest_fields(9, *g, f1) != hash::digest_fields(9, *g, f2));
}

TEST_CASE("hash input signatures are enforced") {
  const auto g = Group::production();
  const Bytes x = bytes_of("x");
  const hash::Field one[] = {hash::field(x)};
  CHECK(code_of([&] { hash::hash_bytes(2, *g, one); }) == ErrorCode::kHashSignatureViolation);
  CHECK(code_of([&] { hash::hash_bytes(9, *g, one); }) == ErrorCode::kHashSignatureViolation);
  const hash::Field two[] = {hash::field(x), hash::field(x)};
  CHECK(code_of([&] { hash::hash_bytes(1, *g, two); }) == ErrorCode::kHashSignatureViolation);
  CHECK(code_of([&] { hash::hash_scalar(9, *g, two); }) == ErrorCode::kHashSignatureViolation);
  CHECK(hash::is_scalar_valued(1));
  CHECK(hash::is_scalar_valued(5));
  CHECK(hash::is_scalar_valued(8));
  CHECK_FALSE(hash::is_scalar_valued(2));
}

TEST_CASE("scalar-valued hashes re-hash instead of returning zero") {
  const auto g = Group::toy();
  // Search a preimage whose plain digest is 0 mod q.
  const Bytes a = bytes_of("type"), t = bytes_of("tttt");
  bool found = false;
  for (std::uint32_t i = 0; i < 200'000 && !found; ++i) {
    Bytes pid;
    append_u32(pid, i);
    const hash::Field f[] = {hash::field(a), hash::field(pid), hash::field(t)};
    const Digest d = hash::digest_fields(8, *g, f);
    if (!g->scalar_from_digest(d).is_zero()) continue;
    found = true;
    const Scalar s = hash::hash_scalar(8, *g, f);
    CHECK_FALSE(s.is_zero());
    int counter = 1;
    Scalar expect = g->scalar_from_digest(hash::digest_fields(8, *g, f, counter));
    while (expect.is_zero()) expect = g->scalar_from_digest(hash::digest_fields(8, *g, f, ++counter));
    CHECK(s == expect);
  }
  CHECK(found);
}

TEST_CASE("AEAD round trip and failure modes") {
  SymKey key;
  Rng rng(10);
  rng.fill(key.bytes);
  const Bytes m = bytes_of("sensor reading 42");
  const Bytes pid = bytes_of("pseudonym-bytes");
  const Timestamp t = 1234;

  const Bytes c = aead::encrypt(key, m, pid, t);
  CHECK(c.size() == aead::kOverhead + 4 + m.size() + 4 + pid.size() + 4);
  const Plaintext p = aead::decrypt(key, c);
  CHECK(p.m == m);
  CHECK(p.pid == pid);
  CHECK(p.t == t);
  CHECK(aead::encrypt(key, m, pid, t) == c);

  for (std::size_t i = 0; i < c.size(); ++i) {
    for (int bit = 0; bit < 8; ++bit) {
      Bytes bad = c;
      bad[i] ^= static_cast<std::uint8_t>(1U << bit);
      REQUIRE(code_of([&] { aead::decrypt(key, bad); }) == ErrorCode::kCiphertextAuthFailed);
    }
  }
  SymKey other = key;
  other.bytes[0] ^= 1;
  CHECK(code_of([&] { aead::decrypt(other, c); }) == ErrorCode::kCiphertextAuthFailed);
  CHECK(code_of([&] { aead::decrypt(key, ByteView(c).first(27)); }) == ErrorCode::kCiphertextParse);
  CHECK(code_of([&] { aead::decrypt(key, ByteView(c).first(c.size() - 1)); }) ==
        ErrorCode::kCiphertextAuthFailed);

  const Bytes empty_c = aead::encrypt(key, {}, pid, t);
  CHECK(aead::decrypt(key, empty_c).m.empty());
}
