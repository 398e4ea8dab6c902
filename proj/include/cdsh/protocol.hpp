#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cdsh/aead.hpp"
#include "cdsh/dkg.hpp"
#include "cdsh/error.hpp"
#include "cdsh/group.hpp"
#include "cdsh/hash_suite.hpp"
#include "cdsh/messages.hpp"
#include "cdsh/rng.hpp"

namespace cdsh {

class CloudStore;
class Ledger;
struct AccessToken;

/// Public system parameters {P, P_pub, H1..H9}. The system secret s is
/// returned separately by generate() and only ever handed to ESs.
struct SystemParams {
  std::shared_ptr<const Group> group;
  Point p_pub;

  const Group& g() const { return *group; }
  HashSuite hashes() const { return HashSuite(*group); }

  struct Generated;
  static Generated generate(std::shared_ptr<const Group> group, Rng& rng);
};

struct SystemParams::Generated {
  SystemParams params;
  Scalar s;
};

inline constexpr std::uint32_t kDefaultFreshnessWindow = 300;
inline constexpr unsigned kDefaultZeta = 8;

/// Resolves DIDs for verification. lookup_pk returns nullptr for an
/// unknown identity.
class IdentityDirectory {
 public:
  virtual ~IdentityDirectory() = default;
  virtual std::shared_ptr<const PublicKeySequence> lookup_pk(const Did& did) const = 0;
  virtual bool is_revoked(const Did&) const { return false; }
};

/// Directory backed by a ledger replica, with an optional revocation set.
class LedgerDirectory : public IdentityDirectory {
 public:
  LedgerDirectory(const Ledger& ledger, AccessToken token, std::string replica = {},
                  const std::set<Did>* revoked = nullptr);
  std::shared_ptr<const PublicKeySequence> lookup_pk(const Did& did) const override;
  bool is_revoked(const Did& did) const override;

 private:
  const Ledger& ledger_;
  std::unique_ptr<AccessToken> token_;
  std::string replica_;
  const std::set<Did>* revoked_;
};

/// Per-domain subscription table: DID -> permitted service types.
class AccessControlList {
 public:
  void grant(const Did& did, const std::string& m_type) { entries_[did].insert(m_type); }
  void revoke(const Did& did, const std::string& m_type);
  bool allows(const Did& did, const std::string& m_type) const;

 private:
  std::map<Did, std::set<std::string>> entries_;
};

/// Requester-side secret state kept between request and decryption.
struct RequestContext {
  Scalar r;
  Digest hr3{};  // H2(r * P_pub)
  Timestamp t = 0;
};

/// Device-side secrets behind one pseudonym.
struct PseudonymSecret {
  Pseudonym pid;
  Scalar r;
  Point r2;  // r * P_pub
};

struct VerifiedUpload {
  Did did;
  Point pk;
  Point r2_prime;  // s * PID1
};

struct VerifiedRequest {
  Did did;
  Digest hr3_prime{};
  Timestamp t_j = 0;
};

struct StoredUpload {
  Digest index{};
  LedgerRecord record;
};

struct RecoveredTransfer {
  Digest index{};
  SymKey key;
};

struct DecryptedData {
  Bytes m;
  Pseudonym pid;
  Timestamp t = 0;
};

/// Thrown by decrypt_and_verify when V' != V; carries the decrypted
/// pseudonym so the requester can report it for tracing.
class IntegrityFailure : public Error {
 public:
  explicit IntegrityFailure(Pseudonym pid)
      : Error(ErrorCode::kIntegrityCheckFailed), pid_(std::move(pid)) {}
  const Pseudonym& reported_pid() const { return pid_; }

 private:
  Pseudonym pid_;
};

enum class RecordSelection { kLatest, kEarliest };

/// Bit totals for the two phases, computed from actual serializations.
struct SizeReport {
  std::size_t upload_message_bits = 0;    // UploadMessage excl. M_Type, C
  std::size_t ledger_record_bits = 0;     // LedgerRecord excl. M_Type
  std::size_t request_message_bits = 0;   // RequestMessage excl. M_Type
  std::size_t transfer_response_bits = 0;
  std::size_t upload_phase_bits() const { return upload_message_bits + ledger_record_bits; }
  std::size_t request_phase_bits() const { return request_message_bits + transfer_response_bits; }
};

namespace protocol {

/// XOR of a DID into the 256-bit mask space (canonical 32-byte DIDs).
Digest mask_did(const Did& did, const Digest& mask);

/// key = H4(SV, R2, T)
SymKey upload_key(const SystemParams& sp, const Scalar& sv, const Point& r2, Timestamp t);
/// alpha = H5(PID, C, RV, T)
Scalar upload_challenge(const SystemParams& sp, const UploadMessage& msg);
/// beta = H8(M_Type, PID, T)
Scalar request_challenge(const SystemParams& sp, const RequestMessage& msg);

PseudonymSecret make_pseudonym(const SystemParams& sp, const DeviceCredentials& creds, Rng& rng);
/// The deterministic half of make_pseudonym for a given r (r != 0).
PseudonymSecret make_pseudonym_with(const SystemParams& sp, const Did& did, const Scalar& r);

UploadMessage make_upload(const SystemParams& sp, const DeviceCredentials& creds, ByteView m,
                          const std::string& m_type, Timestamp t, Rng& rng);
UploadMessage make_upload_with(const SystemParams& sp, const DeviceCredentials& creds,
                               const PseudonymSecret& ps, ByteView m, const std::string& m_type,
                               Timestamp t);

/// |now - t| > delta
bool is_stale(Timestamp t, Timestamp now, std::uint32_t delta);

/// theta*P == PID1 + alpha*pk with freshness and identity recovery. Rejections, in
/// precedence order: kStaleTimestamp, kUnknownIdentity, kDeviceRevoked,
/// kSignatureInvalid.
VerifiedUpload verify_upload(const SystemParams& sp, const Scalar& s, const UploadMessage& msg,
                             const IdentityDirectory& dir, Timestamp now, std::uint32_t delta);

/// ES-side identity recovery and composite key lookup without the
/// signature check; used to resolve keys ahead of a batch check.
VerifiedUpload resolve_upload(const SystemParams& sp, const Scalar& s, const UploadMessage& msg,
                              const IdentityDirectory& dir);

/// Small-exponent batch test: draws v_i in [1, 2^zeta] and checks
/// (sum v_i theta_i) P = sum v_i PID1_i + sum (v_i alpha_i) pk_i.
/// Throws Error(kEmptyBatch) for an empty batch.
bool batch_verify(const SystemParams& sp, std::span<const UploadMessage> msgs,
                  std::span<const Point> pks, unsigned zeta, Rng& rng);

/// Pure part of store_data: V and pindex for a known index.
LedgerRecord build_record(const SystemParams& sp, const VerifiedUpload& vu,
                          const UploadMessage& msg, const Digest& index);
/// Puts C in the cloud store and appends the record on the ledger.
StoredUpload store_data(const SystemParams& sp, const VerifiedUpload& vu, const UploadMessage& msg,
                        CloudStore& cloud, Ledger& ledger, const AccessToken& token);

std::pair<RequestMessage, RequestContext> make_request(const SystemParams& sp,
                                                       const DeviceCredentials& creds,
                                                       const std::string& m_type, Timestamp t,
                                                       Rng& rng);

/// Rejections: kStaleTimestamp, kUnknownIdentity, kDeviceRevoked,
/// kSignatureInvalid, kNotSubscribed.
VerifiedRequest verify_request(const SystemParams& sp, const Scalar& s, const RequestMessage& req,
                               const IdentityDirectory& dir, const AccessControlList& acl,
                               Timestamp now, std::uint32_t delta);

TransferResponse make_transfer(const SystemParams& sp, const Scalar& s, const LedgerRecord& record,
                               const VerifiedRequest& vr, Timestamp t_k);
/// Picks one record per the selection policy; kNoData when empty.
TransferResponse make_transfer(const SystemParams& sp, const Scalar& s,
                               std::span<const LedgerRecord> candidates, const VerifiedRequest& vr,
                               Timestamp t_k, RecordSelection selection = RecordSelection::kLatest);

/// The pindex' unmask uses only H9: pindex' = index xor H9(..) because the
/// ES already folded H7(R2', T_i) back out of pindex.
RecoveredTransfer recover_index_key(const SystemParams& sp, const TransferResponse& resp,
                                    const RequestContext& ctx, Timestamp now,
                                    std::uint32_t delta);

/// AEAD-decrypts, recomputes RV' and V', and returns the payload iff
/// V' == record_v. Throws Error(kCiphertextAuthFailed), Error(kMessageParse)
/// for an undecodable embedded PID, or IntegrityFailure.
DecryptedData decrypt_and_verify(const SystemParams& sp, ByteView c, const SymKey& key,
                                 const Digest& record_v, const Digest& index);

/// DID = PID2 xor H2(s * PID1).
Did trace_identity(const SystemParams& sp, const Pseudonym& pid, const Scalar& s);

SizeReport account_sizes(const Group& g);

}  // namespace protocol
}  // namespace cdsh
