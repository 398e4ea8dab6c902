#include "cdsh/protocol.hpp"

#include "cdsh/cloud_store.hpp"
#include "cdsh/ledger.hpp"

namespace cdsh {

SystemParams::Generated SystemParams::generate(std::shared_ptr<const Group> group, Rng& rng) {
  const Scalar s = group->random_scalar(rng);
  const Point p_pub = group->mul_base(s);
  return {SystemParams{std::move(group), p_pub}, s};
}

LedgerDirectory::LedgerDirectory(const Ledger& ledger, AccessToken token, std::string replica,
                                 const std::set<Did>* revoked)
    : ledger_(ledger),
      token_(std::make_unique<AccessToken>(std::move(token))),
      replica_(std::move(replica)),
      revoked_(revoked) {}

std::shared_ptr<const PublicKeySequence> LedgerDirectory::lookup_pk(const Did& did) const {
  try {
    return ledger_.lookup_pk(*token_, did, replica_);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnknownIdentity) return nullptr;
    throw;
  }
}

bool LedgerDirectory::is_revoked(const Did& did) const {
  return revoked_ != nullptr && revoked_->contains(did);
}

void AccessControlList::revoke(const Did& did, const std::string& m_type) {
  if (auto it = entries_.find(did); it != entries_.end()) it->second.erase(m_type);
}

bool AccessControlList::allows(const Did& did, const std::string& m_type) const {
  const auto it = entries_.find(did);
  return it != entries_.end() && it->second.contains(m_type);
}

namespace protocol {
namespace {

struct Recovered {
  Did did;
  Point shared;  // s * PID1
  Digest mask;   // H2(s * PID1)
};

Recovered recover(const SystemParams& sp, const Pseudonym& pid, const Scalar& s) {
  const Point shared = sp.g().mul(s, pid.pid1);
  const Digest mask = sp.hashes().h2(shared);
  return {Did{xor_digest(pid.pid2, mask)}, shared, mask};
}

std::shared_ptr<const PublicKeySequence> resolve(const IdentityDirectory& dir, const Did& did) {
  auto pk = dir.lookup_pk(did);
  if (!pk) throw Error(ErrorCode::kUnknownIdentity);
  if (dir.is_revoked(did)) throw Error(ErrorCode::kDeviceRevoked, did.display());
  return pk;
}

// theta * P == PID1 + c * pk
bool schnorr_check(const Group& g, const Scalar& theta, const Point& pid1, const Scalar& c,
                   const Point& pk) {
  if (pid1.is_identity()) return false;
  const ScalarPoint rhs[] = {{g.scalar(1), pid1}, {c, pk}};
  return g.mul_base(theta) == g.msm(rhs);
}

}  // namespace

Digest mask_did(const Did& did, const Digest& mask) { return xor_digest(did.bytes, mask); }

SymKey upload_key(const SystemParams& sp, const Scalar& sv, const Point& r2, Timestamp t) {
  return SymKey{sp.hashes().h4(sv, r2, t)};
}

Scalar upload_challenge(const SystemParams& sp, const UploadMessage& msg) {
  return sp.hashes().h5(msg.pid.pid1, msg.pid.pid2, msg.c, msg.rv, msg.t);
}

Scalar request_challenge(const SystemParams& sp, const RequestMessage& msg) {
  const Bytes pid = wire::encode_pseudonym(sp.g(), msg.pid);
  return sp.hashes().h8(as_bytes(msg.m_type), pid, msg.t);
}

PseudonymSecret make_pseudonym_with(const SystemParams& sp, const Did& did, const Scalar& r) {
  PseudonymSecret ps;
  ps.r = r;
  ps.pid.pid1 = sp.g().mul_base(r);
  ps.r2 = sp.g().mul(r, sp.p_pub);
  ps.pid.pid2 = mask_did(did, sp.hashes().h2(ps.r2));
  return ps;
}

PseudonymSecret make_pseudonym(const SystemParams& sp, const DeviceCredentials& creds, Rng& rng) {
  return make_pseudonym_with(sp, creds.did, sp.g().random_scalar(rng));
}

UploadMessage make_upload_with(const SystemParams& sp, const DeviceCredentials& creds,
                               const PseudonymSecret& ps, ByteView m, const std::string& m_type,
                               Timestamp t) {
  const Group& g = sp.g();
  const HashSuite h = sp.hashes();
  const Bytes pid_bytes = wire::encode_pseudonym(g, ps.pid);

  UploadMessage msg;
  msg.m_type = m_type;
  msg.pid = ps.pid;
  msg.t = t;
  msg.rv = h.h3(m, pid_bytes, t);
  const SymKey key = upload_key(sp, creds.sv, ps.r2, t);
  msg.c = aead::encrypt(key, m, pid_bytes, t);
  const Scalar alpha = upload_challenge(sp, msg);
  const Scalar sk = dkg::derive_private(g, ps.pid.pid2, creds.sk);
  msg.theta = g.add(ps.r, g.mul(alpha, sk));
  return msg;
}

UploadMessage make_upload(const SystemParams& sp, const DeviceCredentials& creds, ByteView m,
                          const std::string& m_type, Timestamp t, Rng& rng) {
  return make_upload_with(sp, creds, make_pseudonym(sp, creds, rng), m, m_type, t);
}

bool is_stale(Timestamp t, Timestamp now, std::uint32_t delta) {
  const std::uint64_t diff = t > now ? t - now : now - t;
  return diff > delta;
}

VerifiedUpload resolve_upload(const SystemParams& sp, const Scalar& s, const UploadMessage& msg,
                              const IdentityDirectory& dir) {
  const Recovered rec = recover(sp, msg.pid, s);
  const auto pk_seq = resolve(dir, rec.did);
  return VerifiedUpload{rec.did, dkg::derive_public(sp.g(), msg.pid.pid2, *pk_seq), rec.shared};
}

VerifiedUpload verify_upload(const SystemParams& sp, const Scalar& s, const UploadMessage& msg,
                             const IdentityDirectory& dir, Timestamp now, std::uint32_t delta) {
  if (is_stale(msg.t, now, delta)) throw Error(ErrorCode::kStaleTimestamp);
  VerifiedUpload vu = resolve_upload(sp, s, msg, dir);
  const Scalar alpha = upload_challenge(sp, msg);
  if (!schnorr_check(sp.g(), msg.theta, msg.pid.pid1, alpha, vu.pk)) {
    throw Error(ErrorCode::kSignatureInvalid);
  }
  return vu;
}

bool batch_verify(const SystemParams& sp, std::span<const UploadMessage> msgs,
                  std::span<const Point> pks, unsigned zeta, Rng& rng) {
  if (msgs.empty()) throw Error(ErrorCode::kEmptyBatch);
  if (msgs.size() != pks.size()) throw Error(ErrorCode::kInvalidParams, "one pk per message");
  if (zeta == 0 || zeta > 32) throw Error(ErrorCode::kInvalidParams, "zeta out of range");
  const Group& g = sp.g();

  Scalar lhs = g.scalar(0);
  std::vector<ScalarPoint> terms;
  terms.reserve(2 * msgs.size());
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    const UploadMessage& m = msgs[i];
    if (m.pid.pid1.is_identity()) return false;
    const Scalar v = g.scalar(rng.uniform(std::uint64_t{1} << zeta) + 1);
    lhs = g.add(lhs, g.mul(v, m.theta));
    terms.emplace_back(v, m.pid.pid1);
    terms.emplace_back(g.mul(v, upload_challenge(sp, m)), pks[i]);
  }
  return g.mul_base(lhs) == g.msm(terms);
}

LedgerRecord build_record(const SystemParams& sp, const VerifiedUpload& vu,
                          const UploadMessage& msg, const Digest& index) {
  const HashSuite h = sp.hashes();
  LedgerRecord rec;
  rec.m_type = msg.m_type;
  rec.pid = msg.pid;
  rec.t = msg.t;
  rec.v = h.h6(msg.pid.pid1, msg.pid.pid2, msg.c, msg.rv, index, msg.t);
  rec.pindex = xor_digest(h.h7(vu.r2_prime, msg.t), index);
  return rec;
}

StoredUpload store_data(const SystemParams& sp, const VerifiedUpload& vu, const UploadMessage& msg,
                        CloudStore& cloud, Ledger& ledger, const AccessToken& token) {
  StoredUpload out;
  out.index = cloud.put(msg.c);
  out.record = build_record(sp, vu, msg, out.index);
  ledger.append_record(token, out.record);
  return out;
}

std::pair<RequestMessage, RequestContext> make_request(const SystemParams& sp,
                                                       const DeviceCredentials& creds,
                                                       const std::string& m_type, Timestamp t,
                                                       Rng& rng) {
  const Group& g = sp.g();
  const Scalar r = g.random_scalar(rng);
  RequestContext ctx;
  ctx.r = r;
  ctx.t = t;
  ctx.hr3 = sp.hashes().h2(g.mul(r, sp.p_pub));

  RequestMessage req;
  req.m_type = m_type;
  req.pid.pid1 = g.mul_base(r);
  req.pid.pid2 = mask_did(creds.did, ctx.hr3);
  req.t = t;
  const Scalar beta = request_challenge(sp, req);
  const Scalar sk = dkg::derive_private(g, req.pid.pid2, creds.sk);
  req.delta = g.add(r, g.mul(beta, sk));
  return {std::move(req), ctx};
}

VerifiedRequest verify_request(const SystemParams& sp, const Scalar& s, const RequestMessage& req,
                               const IdentityDirectory& dir, const AccessControlList& acl,
                               Timestamp now, std::uint32_t delta) {
  if (is_stale(req.t, now, delta)) throw Error(ErrorCode::kStaleTimestamp);
  const Recovered rec = recover(sp, req.pid, s);
  const auto pk_seq = resolve(dir, rec.did);
  const Point pk = dkg::derive_public(sp.g(), req.pid.pid2, *pk_seq);
  if (!schnorr_check(sp.g(), req.delta, req.pid.pid1, request_challenge(sp, req), pk)) {
    throw Error(ErrorCode::kSignatureInvalid);
  }
  if (!acl.allows(rec.did, req.m_type)) throw Error(ErrorCode::kNotSubscribed, req.m_type);
  return VerifiedRequest{rec.did, rec.mask, req.t};
}

TransferResponse make_transfer(const SystemParams& sp, const Scalar& s, const LedgerRecord& record,
                               const VerifiedRequest& vr, Timestamp t_k) {
  const HashSuite h = sp.hashes();
  const Recovered producer = recover(sp, record.pid, s);
  const SymKey key_prime = upload_key(sp, h.h1(producer.did.bytes, s), producer.shared, record.t);
  const Digest requester_mask = h.h9(vr.hr3_prime, vr.t_j);

  TransferResponse resp;
  resp.k = xor_digest(key_prime.bytes, requester_mask);
  resp.pindex_prime =
      xor_digest(xor_digest(record.pindex, h.h7(producer.shared, record.t)), requester_mask);
  resp.v = record.v;
  resp.t_k = t_k;
  return resp;
}

TransferResponse make_transfer(const SystemParams& sp, const Scalar& s,
                               std::span<const LedgerRecord> candidates, const VerifiedRequest& vr,
                               Timestamp t_k, RecordSelection selection) {
  if (candidates.empty()) throw Error(ErrorCode::kNoData);
  const LedgerRecord& chosen =
      selection == RecordSelection::kLatest ? candidates.back() : candidates.front();
  return make_transfer(sp, s, chosen, vr, t_k);
}

RecoveredTransfer recover_index_key(const SystemParams& sp, const TransferResponse& resp,
                                    const RequestContext& ctx, Timestamp now,
                                    std::uint32_t delta) {
  if (is_stale(resp.t_k, now, delta)) throw Error(ErrorCode::kStaleTimestamp);
  const Digest mask = sp.hashes().h9(ctx.hr3, ctx.t);
  return RecoveredTransfer{xor_digest(resp.pindex_prime, mask), SymKey{xor_digest(resp.k, mask)}};
}

DecryptedData decrypt_and_verify(const SystemParams& sp, ByteView c, const SymKey& key,
                                 const Digest& record_v, const Digest& index) {
  const Plaintext plain = aead::decrypt(key, c);
  const HashSuite h = sp.hashes();
  DecryptedData out;
  out.pid = wire::decode_pseudonym(sp.g(), plain.pid);
  out.t = plain.t;
  const Digest rv = h.h3(plain.m, plain.pid, plain.t);
  const Digest v = h.h6(out.pid.pid1, out.pid.pid2, c, rv, index, plain.t);
  if (v != record_v) throw IntegrityFailure(out.pid);
  out.m = plain.m;
  return out;
}

Did trace_identity(const SystemParams& sp, const Pseudonym& pid, const Scalar& s) {
  return recover(sp, pid, s).did;
}

SizeReport account_sizes(const Group& g) {
  const Point p = g.generator();
  const Scalar x = g.scalar(1);
  const Pseudonym pid{p, Digest{}};

  SizeReport rep;
  rep.upload_message_bits = wire::encode_core(g, UploadMessage{"", pid, x, {}, {}, 0}).size() * 8;
  rep.ledger_record_bits = wire::encode_core(g, LedgerRecord{"", pid, {}, {}, 0}).size() * 8;
  rep.request_message_bits = wire::encode_core(g, RequestMessage{"", pid, x, 0}).size() * 8;
  rep.transfer_response_bits = wire::encode_core(TransferResponse{}).size() * 8;
  return rep;
}

}  // namespace protocol
}  // namespace cdsh
