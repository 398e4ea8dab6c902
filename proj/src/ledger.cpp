#include "cdsh/ledger.hpp"

#include <fstream>
#include <mutex>
#include <utility>

#include "cdsh/error.hpp"
#include "cdsh/sha256.hpp"

namespace cdsh {
namespace {

constexpr char kDumpMagic[] = "CDSHCHN1";

Did payload_did(const Payload& p) {
  ByteReader r(p.bytes, ErrorCode::kMessageParse);
  return Did::from_bytes(r.prefixed());
}

std::string payload_type(const Payload& p) {
  ByteReader r(p.bytes, ErrorCode::kMessageParse);
  const ByteView t = r.prefixed();
  return std::string(t.begin(), t.end());
}

}  // namespace

// Block ------------------------------------------------------------------------

Bytes Block::encode_body() const {
  Bytes out;
  append_u64(out, height);
  append(out, prev_hash);
  append_u32(out, static_cast<std::uint32_t>(records.size()));
  for (const Payload& p : records) {
    out.push_back(static_cast<std::uint8_t>(p.kind));
    append_prefixed(out, p.bytes);
  }
  return out;
}

Digest Block::compute_hash() const { return sha256(encode_body()); }

Bytes Block::encode() const {
  Bytes out = encode_body();
  append(out, block_hash);
  return out;
}

Block Block::decode(ByteView b) {
  ByteReader r(b, ErrorCode::kMessageParse);
  Block blk;
  blk.height = r.u64();
  blk.prev_hash = r.digest();
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    Payload p;
    const std::uint8_t kind = r.u8();
    if (kind < 1 || kind > 3) throw Error(ErrorCode::kMessageParse, "unknown payload kind");
    p.kind = static_cast<PayloadKind>(kind);
    const ByteView body = r.prefixed();
    p.bytes.assign(body.begin(), body.end());
    blk.records.push_back(std::move(p));
  }
  blk.block_hash = r.digest();
  r.expect_done();
  return blk;
}

// Chain ------------------------------------------------------------------------

Chain::Chain() {
  Block genesis;
  genesis.block_hash = genesis.compute_hash();
  blocks_.push_back(std::move(genesis));
}

bool Chain::verify() const {
  for (std::size_t h = 0; h < blocks_.size(); ++h) {
    const Block& b = blocks_[h];
    if (b.height != h) return false;
    const Digest expected_prev = h == 0 ? Digest{} : blocks_[h - 1].block_hash;
    if (b.prev_hash != expected_prev) return false;
    if (b.compute_hash() != b.block_hash) return false;
  }
  return true;
}

void Chain::push(Block b) {
  blocks_.push_back(std::move(b));
  index_block(blocks_.back());
}

void Chain::index_block(const Block& b) {
  const auto h = static_cast<std::size_t>(b.height);
  for (std::size_t i = 0; i < b.records.size(); ++i) {
    const Payload& p = b.records[i];
    if (p.kind == PayloadKind::kDataRecord) {
      by_type_[payload_type(p)].emplace_back(h, i);
    } else {
      by_did_[payload_did(p)] = {h, i};
    }
  }
}

std::vector<const Payload*> Chain::records_of_type(const std::string& m_type) const {
  std::vector<const Payload*> out;
  const auto it = by_type_.find(m_type);
  if (it == by_type_.end()) return out;
  for (const auto& [h, i] : it->second) out.push_back(&blocks_[h].records[i]);
  return out;
}

const Payload* Chain::pk_entry(const Did& did) const {
  const auto it = by_did_.find(did);
  if (it == by_did_.end()) return nullptr;
  return &blocks_[it->second.first].records[it->second.second];
}

// Ledger -----------------------------------------------------------------------

Ledger::Ledger(std::shared_ptr<const Group> group, Options opts)
    : group_(std::move(group)), opts_(std::move(opts)) {
  if (opts_.replica_ids.empty()) throw Error(ErrorCode::kConfig, "ledger needs at least one replica");
  if (opts_.pk_mode == PkStorageMode::kDigest && !opts_.pk_store) {
    throw Error(ErrorCode::kConfig, "digest mode needs a cloud store");
  }
  for (const auto& id : opts_.replica_ids) {
    if (!replicas_.emplace(id, Chain{}).second) {
      throw Error(ErrorCode::kConfig, "duplicate replica id " + id);
    }
  }
}

void Ledger::require_es(const AccessToken& who) const {
  if (who.role != Role::kEdgeServer) throw Error(ErrorCode::kAccessDenied, who.holder);
}

const Chain& Ledger::chain(const std::string& replica) const {
  const auto it = replicas_.find(replica.empty() ? sequencer() : replica);
  if (it == replicas_.end()) throw Error(ErrorCode::kConfig, "no replica " + replica);
  return it->second;
}

Chain& Ledger::chain_mut(const std::string& replica) {
  return const_cast<Chain&>(std::as_const(*this).chain(replica));
}

BlockRef Ledger::append(const AccessToken& who, Payload payload) {
  require_es(who);
  std::unique_lock lock(mu_);
  Chain& seq = chain_mut(sequencer());

  if (diverge_next_) {
    // Simulated faulty replica: it silently drops its copy of the tip.
    Chain& bad = chain_mut(*diverge_next_);
    diverge_next_.reset();
    if (bad.blocks_.size() > 1) bad.blocks_.pop_back();
  }
  for (const auto& [id, replica] : replicas_) {
    if (replica.length() != seq.length() || replica.tip().block_hash != seq.tip().block_hash) {
      throw Error(ErrorCode::kReplicationFailure, "replica " + id + " diverged");
    }
  }

  Block b;
  b.height = seq.length();
  b.prev_hash = seq.tip().block_hash;
  b.records.push_back(std::move(payload));
  b.block_hash = b.compute_hash();
  const BlockRef ref{b.height, b.block_hash};
  for (auto& [id, replica] : replicas_) replica.push(b);
  return ref;
}

BlockRef Ledger::append_record(const AccessToken& who, const LedgerRecord& rec) {
  return append(who, Payload{PayloadKind::kDataRecord, wire::encode(*group_, rec)});
}

BlockRef Ledger::publish_pk(const AccessToken& who, const Did& did, const PublicKeySequence& pk) {
  require_es(who);
  Bytes full = dkg::encode_public_sequence(*group_, did, pk);
  if (opts_.pk_mode == PkStorageMode::kOnChain) {
    return append(who, Payload{PayloadKind::kPkRegistration, std::move(full)});
  }
  const Digest index = opts_.pk_store->put(full);
  Bytes entry;
  append_prefixed(entry, did.bytes);
  cdsh::append(entry, index);
  cdsh::append(entry, sha256(full));
  return append(who, Payload{PayloadKind::kPkDigest, std::move(entry)});
}

std::vector<LedgerRecord> Ledger::query_by_type(const AccessToken& who, const std::string& m_type,
                                                const std::string& replica) const {
  require_es(who);
  std::shared_lock lock(mu_);
  std::vector<LedgerRecord> out;
  for (const Payload* p : chain(replica).records_of_type(m_type)) {
    out.push_back(wire::decode_record(*group_, p->bytes));
  }
  return out;
}

std::shared_ptr<const PublicKeySequence> Ledger::lookup_pk(const AccessToken& who, const Did& did,
                                                           const std::string& replica) const {
  require_es(who);
  Bytes full;
  {
    std::shared_lock lock(mu_);
    const Payload* entry = chain(replica).pk_entry(did);
    if (entry == nullptr) throw Error(ErrorCode::kUnknownIdentity);
    if (entry->kind == PayloadKind::kPkRegistration) {
      full = entry->bytes;
    } else {
      ByteReader r(entry->bytes, ErrorCode::kMessageParse);
      r.prefixed();
      const Digest index = r.digest();
      const Digest expected = r.digest();
      if (!opts_.pk_store) throw Error(ErrorCode::kStorageUnavailable);
      auto blob = opts_.pk_store->get(index);
      if (!blob || sha256(*blob) != expected) throw Error(ErrorCode::kPublicKeyTampered);
      full = std::move(*blob);
    }
  }

  const Digest key = sha256(full);
  {
    std::lock_guard lock(cache_mu_);
    if (auto it = pk_cache_.find(key); it != pk_cache_.end()) return it->second;
  }
  auto [decoded_did, pk] = dkg::decode_public_sequence(*group_, full);
  if (decoded_did != did) throw Error(ErrorCode::kPublicKeyTampered);
  auto shared = std::make_shared<const PublicKeySequence>(std::move(pk));
  std::lock_guard lock(cache_mu_);
  pk_cache_.emplace(key, shared);
  return shared;
}

bool Ledger::is_registered(const Did& did) const {
  std::shared_lock lock(mu_);
  return chain({}).pk_entry(did) != nullptr;
}

bool Ledger::verify_chain(const std::string& replica) const {
  std::shared_lock lock(mu_);
  return chain(replica).verify();
}

bool Ledger::replicas_consistent() const {
  std::shared_lock lock(mu_);
  const Chain& ref = chain({});
  for (const auto& [id, replica] : replicas_) {
    if (replica.blocks() != ref.blocks()) return false;
  }
  return true;
}

std::uint64_t Ledger::length(const std::string& replica) const {
  std::shared_lock lock(mu_);
  return chain(replica).length();
}

Digest Ledger::state_digest() const {
  std::shared_lock lock(mu_);
  Sha256 h;
  for (const Block& b : chain({}).blocks()) h.update(b.encode());
  return h.finish();
}

void Ledger::dump(const std::filesystem::path& path) const {
  std::shared_lock lock(mu_);
  Bytes out;
  cdsh::append(out, as_bytes(std::string_view(kDumpMagic, 8)));
  const auto& blocks = chain({}).blocks();
  append_u64(out, blocks.size());
  for (const Block& b : blocks) append_prefixed(out, b.encode());
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorCode::kStorageUnavailable, "cannot write " + path.string());
}

void Ledger::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kStorageUnavailable, "cannot read " + path.string());
  const Bytes data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  ByteReader r(data, ErrorCode::kMessageParse);
  const ByteView magic = r.take(8);
  if (!std::equal(magic.begin(), magic.end(), kDumpMagic)) {
    throw Error(ErrorCode::kMessageParse, "bad chain dump magic");
  }
  const std::uint64_t n = r.u64();
  if (n == 0) throw Error(ErrorCode::kMessageParse, "chain dump without genesis");
  Chain loaded;
  for (std::uint64_t i = 0; i < n; ++i) {
    Block b = Block::decode(r.prefixed());
    if (i == 0) {
      if (b != loaded.blocks_.front()) throw Error(ErrorCode::kMessageParse, "foreign genesis");
      continue;
    }
    loaded.push(std::move(b));
  }
  r.expect_done();
  if (!loaded.verify()) throw Error(ErrorCode::kMessageParse, "chain dump fails verification");

  std::unique_lock lock(mu_);
  for (auto& [id, replica] : replicas_) replica = loaded;
}

void Ledger::tamper_record_byte(const std::string& replica, std::uint64_t height,
                                std::size_t byte_pos, std::uint8_t xor_mask) {
  std::unique_lock lock(mu_);
  Block& b = chain_mut(replica).blocks_.at(height);
  std::size_t pos = byte_pos;
  for (Payload& p : b.records) {
    if (pos < p.bytes.size()) {
      p.bytes[pos] ^= xor_mask;
      return;
    }
    pos -= p.bytes.size();
  }
  throw std::out_of_range("tamper position beyond block records");
}

void Ledger::truncate_replica(const std::string& replica, std::uint64_t new_length) {
  std::unique_lock lock(mu_);
  Chain& c = chain_mut(replica);
  if (new_length == 0 || new_length > c.blocks_.size()) throw std::out_of_range("bad truncation length");
  c.blocks_.resize(new_length);
  c.by_type_.clear();
  c.by_did_.clear();
  for (const Block& b : c.blocks_) c.index_block(b);
}

void Ledger::inject_divergence(const std::string& replica) {
  std::unique_lock lock(mu_);
  chain(replica);
  diverge_next_ = replica;
}

}  // namespace cdsh
