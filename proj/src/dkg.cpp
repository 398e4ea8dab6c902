#include "cdsh/dkg.hpp"

#include "cdsh/error.hpp"
#include "cdsh/hash_suite.hpp"
#include "cdsh/ledger.hpp"

namespace cdsh::dkg {
namespace {

bool all_zero(const Digest& d) {
  for (std::uint8_t b : d) {
    if (b != 0) return false;
  }
  return true;
}

}  // namespace

bool selected(const Digest& pid2, std::size_t slot) {
  if (all_zero(pid2)) return true;
  return (pid2[slot / 8] >> (7 - slot % 8)) & 1U;
}

std::size_t selection_count(const Digest& pid2) {
  if (all_zero(pid2)) return kKeySequenceLength;
  std::size_t n = 0;
  for (std::uint8_t b : pid2) n += static_cast<std::size_t>(__builtin_popcount(b));
  return n;
}

Scalar derive_private(const Group& g, const Digest& pid2, const PrivateKeySequence& sk) {
  if (sk.psk.size() != kKeySequenceLength) throw Error(ErrorCode::kInvalidParams, "sequence length");
  Scalar acc = g.scalar(0);
  for (std::size_t b = 0; b < kKeySequenceLength; ++b) {
    if (selected(pid2, b)) acc = g.add(acc, sk.psk[b]);
  }
  return acc;
}

Point derive_public(const Group& g, const Digest& pid2, const PublicKeySequence& pk) {
  if (pk.ppk.size() != kKeySequenceLength) throw Error(ErrorCode::kInvalidParams, "sequence length");
  std::vector<ScalarPoint> pairs;
  pairs.reserve(kKeySequenceLength);
  const Scalar one = g.scalar(1);
  for (std::size_t b = 0; b < kKeySequenceLength; ++b) {
    if (selected(pid2, b)) pairs.emplace_back(one, pk.ppk[b]);
  }
  return g.msm(pairs);
}

Registration generate(const Group& g, const Did& did, std::span<const std::string> es_nodes,
                      const Scalar& s, Rng& rng) {
  if (es_nodes.empty()) throw Error(ErrorCode::kNoRegistrar);
  Registration reg;
  reg.contributors.assign(es_nodes.begin(), es_nodes.end());
  reg.shares.resize(es_nodes.size());
  for (auto& node_shares : reg.shares) {
    node_shares.reserve(kKeySequenceLength);
    for (std::size_t b = 0; b < kKeySequenceLength; ++b) node_shares.push_back(g.random_scalar(rng));
  }

  auto pk = std::make_shared<PublicKeySequence>();
  reg.creds.did = did;
  reg.creds.sk.psk.reserve(kKeySequenceLength);
  pk->ppk.reserve(kKeySequenceLength);
  for (std::size_t b = 0; b < kKeySequenceLength; ++b) {
    Scalar psk = g.scalar(0);
    for (const auto& node_shares : reg.shares) psk = g.add(psk, node_shares[b]);
    reg.creds.sk.psk.push_back(psk);
    pk->ppk.push_back(g.mul_base(psk));
  }
  reg.creds.sv = HashSuite(g).h1(did.bytes, s);
  reg.pk = std::move(pk);
  return reg;
}

Registration register_device(const Group& g, const Did& did, std::span<const std::string> es_nodes,
                             const Scalar& s, Rng& rng, Ledger& ledger, const AccessToken& token) {
  if (es_nodes.empty()) throw Error(ErrorCode::kNoRegistrar);
  if (ledger.is_registered(did)) throw Error(ErrorCode::kAlreadyRegistered, did.display());
  Registration reg = generate(g, did, es_nodes, s, rng);
  ledger.publish_pk(token, did, *reg.pk);
  return reg;
}

Bytes encode_public_sequence(const Group& g, const Did& did, const PublicKeySequence& pk) {
  Bytes out;
  out.reserve(4 + did.bytes.size() + pk.ppk.size() * g.point_bytes());
  append_prefixed(out, did.bytes);
  for (const Point& p : pk.ppk) g.encode_point_into(p, out);
  return out;
}

std::pair<Did, PublicKeySequence> decode_public_sequence(const Group& g, ByteView b) {
  ByteReader r(b, ErrorCode::kMessageParse);
  const Did did = Did::from_bytes(r.prefixed());
  PublicKeySequence pk;
  pk.ppk.reserve(kKeySequenceLength);
  for (std::size_t i = 0; i < kKeySequenceLength; ++i) {
    pk.ppk.push_back(g.decode_point(r.take(g.point_bytes())));
  }
  r.expect_done();
  return {did, std::move(pk)};
}

}  // namespace cdsh::dkg
