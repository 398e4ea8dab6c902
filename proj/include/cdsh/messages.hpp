#pragma once

#include <string>
#include <string_view>

#include "cdsh/bytes.hpp"
#include "cdsh/group.hpp"

namespace cdsh {

/// Real device identity in canonical 32-byte form.
struct Did {
  Digest bytes{};

  /// Zero-pads identities shorter than 32 bytes; longer ones throw
  /// Error(kInvalidIdentity).
  static Did from_string(std::string_view id);
  static Did from_bytes(ByteView b);
  /// Printable form: the identity with trailing zero padding stripped when
  /// it is plain ASCII, hex otherwise.
  std::string display() const;

  friend bool operator==(const Did&, const Did&) = default;
  friend auto operator<=>(const Did&, const Did&) = default;
};

/// PID = {PID1 = rP, PID2 = DID xor H2(r P_pub)}.
struct Pseudonym {
  Point pid1;
  Digest pid2{};
  friend bool operator==(const Pseudonym&, const Pseudonym&) = default;
};

/// SD -> ES upload: {M_Type, PID, theta, C, RV, T}.
struct UploadMessage {
  std::string m_type;
  Pseudonym pid;
  Scalar theta;
  Bytes c;
  Digest rv{};
  Timestamp t = 0;
  friend bool operator==(const UploadMessage&, const UploadMessage&) = default;
};

/// On-chain record: {M_Type, PID, V, pindex, T}.
struct LedgerRecord {
  std::string m_type;
  Pseudonym pid;
  Digest v{};
  Digest pindex{};
  Timestamp t = 0;
  friend bool operator==(const LedgerRecord&, const LedgerRecord&) = default;
};

/// SD -> ES request: {M_Type, PID, delta, T}.
struct RequestMessage {
  std::string m_type;
  Pseudonym pid;
  Scalar delta;
  Timestamp t = 0;
  friend bool operator==(const RequestMessage&, const RequestMessage&) = default;
};

/// ES -> SD transfer: {pindex', V, k, T_k}.
struct TransferResponse {
  Digest pindex_prime{};
  Digest v{};
  Digest k{};
  Timestamp t_k = 0;
  friend bool operator==(const TransferResponse&, const TransferResponse&) = default;
};

/// Wire encodings.
///
/// "core" encodings are the fixed-width field sequences that the size
/// accounting counts:
///   Upload   PID1 || PID2(32) || theta || RV(32) || T(4)
///   Record   PID1 || PID2(32) || V(32) || pindex(32) || T(4)
///   Request  PID1 || PID2(32) || delta || T(4)
///   Transfer pindex'(32) || V(32) || k(32) || T_k(4)
/// PID1 is group.point_bytes() wide and scalars group.scalar_bytes() wide
/// (64 and 32 on the production curve). "wire" encodings add the
/// length-prefixed M_Type in front and, for uploads, the length-prefixed
/// ciphertext at the end. Decoders throw Error(kMessageParse) on framing
/// problems and Error(kInvalidPointEncoding / kInvalidScalarEncoding) on
/// bad field values.
namespace wire {

Bytes encode_pseudonym(const Group& g, const Pseudonym& pid);
Pseudonym decode_pseudonym(const Group& g, ByteView b);

Bytes encode_core(const Group& g, const UploadMessage& m);
Bytes encode_core(const Group& g, const LedgerRecord& r);
Bytes encode_core(const Group& g, const RequestMessage& m);
Bytes encode_core(const TransferResponse& r);

Bytes encode(const Group& g, const UploadMessage& m);
Bytes encode(const Group& g, const LedgerRecord& r);
Bytes encode(const Group& g, const RequestMessage& m);
Bytes encode(const TransferResponse& r);

UploadMessage decode_upload(const Group& g, ByteView b);
LedgerRecord decode_record(const Group& g, ByteView b);
RequestMessage decode_request(const Group& g, ByteView b);
TransferResponse decode_transfer(ByteView b);

}  // namespace wire
}  // namespace cdsh
