#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "cdsh/bytes.hpp"
#include "cdsh/cloud_store.hpp"
#include "cdsh/dkg.hpp"
#include "cdsh/messages.hpp"

namespace cdsh {

enum class Role { kEdgeServer, kSmartDevice };

/// Capability presented on every ledger call. Only edge servers may read
/// or append; smart devices have no viewing privileges.
struct AccessToken {
  Role role = Role::kSmartDevice;
  std::string holder;
};

enum class PayloadKind : std::uint8_t {
  kPkRegistration = 1,  // full public key sequence on chain
  kPkDigest = 2,        // cloud index + SHA-256 of the sequence encoding
  kDataRecord = 3,      // LedgerRecord wire encoding
};

struct Payload {
  PayloadKind kind = PayloadKind::kDataRecord;
  Bytes bytes;
  friend bool operator==(const Payload&, const Payload&) = default;
};

struct Block {
  std::uint64_t height = 0;
  Digest prev_hash{};
  std::vector<Payload> records;
  Digest block_hash{};

  /// u64 height || prev_hash || u32 count || (u8 kind || u32 len || bytes)*
  Bytes encode_body() const;
  Digest compute_hash() const;
  /// body || block_hash
  Bytes encode() const;
  static Block decode(ByteView b);
  friend bool operator==(const Block&, const Block&) = default;
};

struct BlockRef {
  std::uint64_t height = 0;
  Digest hash{};
};

enum class PkStorageMode { kOnChain, kDigest };

/// One replica's copy of the chain plus its query indexes.
class Chain {
 public:
  Chain();

  std::uint64_t length() const { return blocks_.size(); }  // including genesis
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& tip() const { return blocks_.back(); }

  /// True iff every block hash and back-link recomputes.
  bool verify() const;

  void push(Block b);
  std::vector<const Payload*> records_of_type(const std::string& m_type) const;
  const Payload* pk_entry(const Did& did) const;

 private:
  friend class Ledger;
  void index_block(const Block& b);

  std::vector<Block> blocks_;
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> by_type_;
  std::map<Did, std::pair<std::size_t, std::size_t>> by_did_;
};

/// Append-only hash-chained ledger replicated across all ES nodes.
///
/// The first replica acts as sequencer: it builds each block (one payload
/// per block) and pushes it synchronously to every replica before append()
/// returns. All domains share the one logical chain. Appends are serialized
/// by an internal lock; readers take a shared lock.
class Ledger {
 public:
  struct Options {
    std::vector<std::string> replica_ids;
    PkStorageMode pk_mode = PkStorageMode::kOnChain;
    /// Required in kDigest mode: where the PK sequences live.
    std::shared_ptr<CloudStore> pk_store;
  };

  Ledger(std::shared_ptr<const Group> group, Options opts);

  const Group& group() const { return *group_; }
  PkStorageMode pk_mode() const { return opts_.pk_mode; }
  const std::vector<std::string>& replica_ids() const { return opts_.replica_ids; }
  const std::string& sequencer() const { return opts_.replica_ids.front(); }

  BlockRef append(const AccessToken& who, Payload payload);
  BlockRef append_record(const AccessToken& who, const LedgerRecord& rec);
  /// Publishes PK according to pk_mode.
  BlockRef publish_pk(const AccessToken& who, const Did& did, const PublicKeySequence& pk);

  /// All records with this service type, in append order, read from the
  /// named replica (sequencer if empty).
  std::vector<LedgerRecord> query_by_type(const AccessToken& who, const std::string& m_type,
                                          const std::string& replica = {}) const;
  /// Throws Error(kUnknownIdentity) / Error(kPublicKeyTampered).
  std::shared_ptr<const PublicKeySequence> lookup_pk(const AccessToken& who, const Did& did,
                                                     const std::string& replica = {}) const;
  bool is_registered(const Did& did) const;

  bool verify_chain(const std::string& replica = {}) const;
  /// Byte-equality of every replica's chain.
  bool replicas_consistent() const;
  std::uint64_t length(const std::string& replica = {}) const;
  /// Digest over the sequencer's encoded chain.
  Digest state_digest() const;

  /// Length-prefixed block stream: "CDSHCHN1" || u64 n || (u32 len || block)*
  void dump(const std::filesystem::path& path) const;
  /// Loads a dump into every replica; throws Error(kMessageParse) when the
  /// stream is malformed or fails verification.
  void load(const std::filesystem::path& path);

  // Test hooks. They bypass the append-only API to simulate an attacker
  // or a faulty replica.
  void tamper_record_byte(const std::string& replica, std::uint64_t height, std::size_t byte_pos,
                          std::uint8_t xor_mask = 0x01);
  void truncate_replica(const std::string& replica, std::uint64_t new_length);
  /// The next append sees this replica diverge and throws kReplicationFailure.
  void inject_divergence(const std::string& replica);

 private:
  void require_es(const AccessToken& who) const;
  const Chain& chain(const std::string& replica) const;
  Chain& chain_mut(const std::string& replica);

  std::shared_ptr<const Group> group_;
  Options opts_;
  mutable std::shared_mutex mu_;
  std::map<std::string, Chain> replicas_;
  std::optional<std::string> diverge_next_;
  mutable std::map<Digest, std::shared_ptr<const PublicKeySequence>> pk_cache_;
  mutable std::mutex cache_mu_;
};

}  // namespace cdsh
