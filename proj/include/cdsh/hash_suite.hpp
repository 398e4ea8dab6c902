#pragma once

#include <array>
#include <initializer_list>
#include <span>
#include <string_view>
#include <variant>

#include "cdsh/bytes.hpp"
#include "cdsh/group.hpp"

namespace cdsh {

/// Domain-separated hash functions H1..H9 over SHA-256.
///
/// Layout hashed for H_k:
///   "CDSH-Hk" || for each field: u32_be(len) || field bytes [|| counter]
/// Points and scalars contribute their group encodings. Scalar-valued
/// functions (H1, H5, H8) reduce the digest mod q and, if that is zero,
/// re-hash with a trailing counter byte 1, 2, ...
///
/// The tags are a wire-format constant; changing one breaks every stored
/// V, pindex and signature.
namespace hash {

enum class FieldKind { kPoint, kScalar, kBytes };

/// One typed hash input; non-owning.
using Field = std::variant<const Point*, const Scalar*, ByteView>;

inline Field field(const Point& p) { return &p; }
inline Field field(const Scalar& s) { return &s; }
inline Field field(ByteView b) { return b; }
inline Field field(const Digest& d) { return ByteView(d); }
inline Field field(const Bytes& b) { return ByteView(b); }

inline constexpr std::array<std::string_view, 9> kTags = {
    "CDSH-H1", "CDSH-H2", "CDSH-H3", "CDSH-H4", "CDSH-H5",
    "CDSH-H6", "CDSH-H7", "CDSH-H8", "CDSH-H9"};

/// Declared input signature of H_k (k in 1..9).
std::span<const FieldKind> signature(int k);
/// True for H1, H5, H8.
bool is_scalar_valued(int k);

/// Raw digest of the canonical layout; counter < 0 means "no counter byte".
Digest digest_fields(int k, const Group& group, std::span<const Field> fields, int counter = -1);

/// H_k for string-valued k; throws Error(kHashSignatureViolation) on an
/// arity/type mismatch or a scalar-valued k.
Digest hash_bytes(int k, const Group& group, std::span<const Field> fields);
/// H_k for scalar-valued k (never returns zero).
Scalar hash_scalar(int k, const Group& group, std::span<const Field> fields);

}  // namespace hash

/// Typed front-ends matching each function's role in the protocol.
struct HashSuite {
  explicit HashSuite(const Group& g) : group(g) {}

  /// SV = H1(DID, s)
  Scalar h1(ByteView did, const Scalar& s) const;
  /// H2(R)
  Digest h2(const Point& r) const;
  /// RV = H3(M, PID, T)
  Digest h3(ByteView m, ByteView pid, Timestamp t) const;
  /// key = H4(SV, R2, T)
  Digest h4(const Scalar& sv, const Point& r2, Timestamp t) const;
  /// alpha = H5(PID1, PID2, C, RV, T)
  Scalar h5(const Point& pid1, const Digest& pid2, ByteView c, const Digest& rv, Timestamp t) const;
  /// V = H6(PID1, PID2, C, RV, index, T)
  Digest h6(const Point& pid1, const Digest& pid2, ByteView c, const Digest& rv,
            const Digest& index, Timestamp t) const;
  /// H7(R2', T)
  Digest h7(const Point& r2, Timestamp t) const;
  /// beta = H8(M_Type, PID, T)
  Scalar h8(ByteView m_type, ByteView pid, Timestamp t) const;
  /// H9(HR3, T)
  Digest h9(const Digest& hr3, Timestamp t) const;

  const Group& group;
};

}  // namespace cdsh
