#include "cdsh/hash_suite.hpp"

#include "cdsh/error.hpp"
#include "cdsh/sha256.hpp"

namespace cdsh::hash {
namespace {

using K = FieldKind;

// Input signatures as declared for H1..H9. Where a pseudonym appears as a
// whole ({0,1}* slots of H3 and H8) it is passed as its byte encoding; where
// the first slot is a group element (H5, H6) PID1 and PID2 are separate.
constexpr K kH1[] = {K::kBytes, K::kScalar};
constexpr K kH2[] = {K::kPoint};
constexpr K kH3[] = {K::kBytes, K::kBytes, K::kBytes};
constexpr K kH4[] = {K::kScalar, K::kPoint, K::kBytes};
constexpr K kH5[] = {K::kPoint, K::kBytes, K::kBytes, K::kBytes, K::kBytes};
constexpr K kH6[] = {K::kPoint, K::kBytes, K::kBytes, K::kBytes, K::kBytes, K::kBytes};
constexpr K kH7[] = {K::kPoint, K::kBytes};
constexpr K kH8[] = {K::kBytes, K::kBytes, K::kBytes};
constexpr K kH9[] = {K::kBytes, K::kBytes};

void check_index(int k) {
  if (k < 1 || k > 9) throw Error(ErrorCode::kHashSignatureViolation, "no such function");
}

void check_signature(int k, std::span<const Field> fields) {
  const auto sig = signature(k);
  if (sig.size() != fields.size()) {
    throw Error(ErrorCode::kHashSignatureViolation, "arity mismatch for H" + std::to_string(k));
  }
  for (std::size_t i = 0; i < sig.size(); ++i) {
    const bool ok = (sig[i] == K::kPoint && std::holds_alternative<const Point*>(fields[i])) ||
                    (sig[i] == K::kScalar && std::holds_alternative<const Scalar*>(fields[i])) ||
                    (sig[i] == K::kBytes && std::holds_alternative<ByteView>(fields[i]));
    if (!ok) {
      throw Error(ErrorCode::kHashSignatureViolation,
                  "field " + std::to_string(i) + " has wrong type for H" + std::to_string(k));
    }
  }
}

}  // namespace

std::span<const FieldKind> signature(int k) {
  check_index(k);
  switch (k) {
    case 1: return kH1;
    case 2: return kH2;
    case 3: return kH3;
    case 4: return kH4;
    case 5: return kH5;
    case 6: return kH6;
    case 7: return kH7;
    case 8: return kH8;
    default: return kH9;
  }
}

bool is_scalar_valued(int k) { return k == 1 || k == 5 || k == 8; }

Digest digest_fields(int k, const Group& group, std::span<const Field> fields, int counter) {
  check_index(k);
  Bytes buf;
  append(buf, as_bytes(kTags[static_cast<std::size_t>(k - 1)]));
  for (const Field& f : fields) {
    if (const auto* p = std::get_if<const Point*>(&f)) {
      append_prefixed(buf, group.encode_point(**p));
    } else if (const auto* s = std::get_if<const Scalar*>(&f)) {
      append_prefixed(buf, group.encode_scalar(**s));
    } else {
      append_prefixed(buf, std::get<ByteView>(f));
    }
  }
  if (counter >= 0) buf.push_back(static_cast<std::uint8_t>(counter));
  return sha256(buf);
}

Digest hash_bytes(int k, const Group& group, std::span<const Field> fields) {
  check_index(k);
  if (is_scalar_valued(k)) {
    throw Error(ErrorCode::kHashSignatureViolation, "H" + std::to_string(k) + " is scalar-valued");
  }
  check_signature(k, fields);
  return digest_fields(k, group, fields);
}

Scalar hash_scalar(int k, const Group& group, std::span<const Field> fields) {
  check_index(k);
  if (!is_scalar_valued(k)) {
    throw Error(ErrorCode::kHashSignatureViolation, "H" + std::to_string(k) + " is string-valued");
  }
  check_signature(k, fields);
  Scalar s = group.scalar_from_digest(digest_fields(k, group, fields));
  for (int counter = 1; s.is_zero(); ++counter) {
    // Reaching 256 consecutive zero reductions has probability q^-256.
    if (counter > 255) throw Error(ErrorCode::kHashSignatureViolation, "rehash budget exhausted");
    s = group.scalar_from_digest(digest_fields(k, group, fields, counter));
  }
  return s;
}

}  // namespace cdsh::hash

namespace cdsh {

Scalar HashSuite::h1(ByteView did, const Scalar& s) const {
  const hash::Field f[] = {hash::field(did), hash::field(s)};
  return hash::hash_scalar(1, group, f);
}

Digest HashSuite::h2(const Point& r) const {
  const hash::Field f[] = {hash::field(r)};
  return hash::hash_bytes(2, group, f);
}

Digest HashSuite::h3(ByteView m, ByteView pid, Timestamp t) const {
  const Bytes tb = timestamp_bytes(t);
  const hash::Field f[] = {hash::field(m), hash::field(pid), hash::field(tb)};
  return hash::hash_bytes(3, group, f);
}

Digest HashSuite::h4(const Scalar& sv, const Point& r2, Timestamp t) const {
  const Bytes tb = timestamp_bytes(t);
  const hash::Field f[] = {hash::field(sv), hash::field(r2), hash::field(tb)};
  return hash::hash_bytes(4, group, f);
}

Scalar HashSuite::h5(const Point& pid1, const Digest& pid2, ByteView c, const Digest& rv,
                     Timestamp t) const {
  const Bytes tb = timestamp_bytes(t);
  const hash::Field f[] = {hash::field(pid1), hash::field(pid2), hash::field(c), hash::field(rv),
                           hash::field(tb)};
  return hash::hash_scalar(5, group, f);
}

Digest HashSuite::h6(const Point& pid1, const Digest& pid2, ByteView c, const Digest& rv,
                     const Digest& index, Timestamp t) const {
  const Bytes tb = timestamp_bytes(t);
  const hash::Field f[] = {hash::field(pid1), hash::field(pid2), hash::field(c),
                           hash::field(rv),   hash::field(index), hash::field(tb)};
  return hash::hash_bytes(6, group, f);
}

Digest HashSuite::h7(const Point& r2, Timestamp t) const {
  const Bytes tb = timestamp_bytes(t);
  const hash::Field f[] = {hash::field(r2), hash::field(tb)};
  return hash::hash_bytes(7, group, f);
}

Scalar HashSuite::h8(ByteView m_type, ByteView pid, Timestamp t) const {
  const Bytes tb = timestamp_bytes(t);
  const hash::Field f[] = {hash::field(m_type), hash::field(pid), hash::field(tb)};
  return hash::hash_scalar(8, group, f);
}

Digest HashSuite::h9(const Digest& hr3, Timestamp t) const {
  const Bytes tb = timestamp_bytes(t);
  const hash::Field f[] = {hash::field(hr3), hash::field(tb)};
  return hash::hash_bytes(9, group, f);
}

}  // namespace cdsh
