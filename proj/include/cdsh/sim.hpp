#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cdsh/cloud_store.hpp"
#include "cdsh/ledger.hpp"
#include "cdsh/protocol.hpp"

namespace cdsh::sim {

/// Workflow step tags (1 = system initialization ... 8 = revoking/reviewing).
enum class Step : std::uint8_t {
  kInit = 1,
  kRegister = 2,
  kUpload = 3,
  kStore = 4,
  kRequest = 5,
  kTransfer = 6,
  kDecrypt = 7,
  kRevoke = 8,
};

struct AclEntry {
  std::string device;
  std::vector<std::string> m_types;
};

struct WorldConfig {
  std::uint32_t domains = 2;
  std::uint32_t es_per_domain = 2;
  std::uint32_t sd_per_domain = 3;
  /// Types every device is subscribed to.
  std::vector<std::string> default_subscriptions;
  std::vector<AclEntry> acl;
  std::uint32_t delta = kDefaultFreshnessWindow;
  unsigned zeta = kDefaultZeta;
  std::uint64_t seed = 1;
  std::string group = "production";
  PkStorageMode pk_mode = PkStorageMode::kOnChain;
  Timestamp start_time = 1'700'000'000;
  /// Virtual seconds each message hop takes.
  std::uint32_t hop_ticks = 1;
  RecordSelection selection = RecordSelection::kLatest;

  /// Throws Error(kConfig) with a description of the first problem.
  void validate() const;
  static WorldConfig from_json(const std::string& text);
  static WorldConfig from_file(const std::filesystem::path& path);
  std::string to_json() const;
};

struct TranscriptEntry {
  Step step = Step::kInit;
  std::string sender;
  std::string receiver;
  std::string type;  // "upload", "record", "ciphertext", "request", "transfer", ...
  Bytes bytes;
  Timestamp time = 0;
};

class Transcript {
 public:
  void push(TranscriptEntry e);
  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  Transcript slice(std::size_t from) const;

  /// u8 step || str sender || str receiver || str type || u32 time || bytes,
  /// each str/bytes u32-length-prefixed; entries concatenated.
  Bytes export_binary() const;
  static Transcript import_binary(ByteView b);
  std::string export_log() const;
  Digest digest() const;
  /// Re-parses every entry as its declared type; false on the first failure.
  bool reparses(const Group& g) const;
  bool time_monotone() const;

 private:
  std::vector<TranscriptEntry> entries_;
};

class Metrics {
 public:
  void add(const std::string& key, std::uint64_t n = 1) { counters_[key] += n; }
  void set(const std::string& key, std::uint64_t v) { counters_[key] = v; }
  std::uint64_t get(const std::string& key) const;
  const std::map<std::string, std::uint64_t>& counters() const { return counters_; }
  Metrics delta_since(const Metrics& before) const;
  /// Sum of all "reject.*" counters.
  std::uint64_t rejections() const;
  /// "metric,value" rows.
  std::string to_csv() const;

 private:
  std::map<std::string, std::uint64_t> counters_;
};

struct Device {
  std::string name;
  std::uint32_t domain = 0;
  std::string home_es;
  DeviceCredentials creds;
};

struct Domain {
  std::uint32_t index = 0;
  std::vector<std::string> es_ids;
  std::vector<std::string> devices;
  AccessControlList acl;
};

/// Outcome of one upload as seen by the receiving ES.
struct UploadOutcome {
  std::optional<StoredUpload> stored;
  std::optional<ErrorCode> rejected;
};

/// Outcome of one request pipeline (steps 5-7) as seen by the requester.
struct RequestOutcome {
  bool recovered = false;
  Bytes m;
  std::optional<ErrorCode> error;
  std::optional<Pseudonym> producer_pid;  // decrypted or reported pseudonym
};

struct TamperReport {
  std::string reporter;
  Pseudonym pid;
};

struct ScriptStep {
  std::string op;  // upload | batch_upload | request | advance | register | grant | report
  std::string device;
  std::vector<std::string> devices;
  std::string m_type;
  std::optional<std::string> payload;
  std::size_t payload_size = 32;
  std::uint32_t seconds = 0;
  std::uint32_t domain = 0;
};

struct Script {
  std::vector<ScriptStep> steps;
  static Script from_json(const std::string& text);
  static Script from_file(const std::filesystem::path& path);
};

struct ScenarioResult {
  Transcript transcript;
  Metrics metrics;
  std::vector<RequestOutcome> requests;
};

enum class AdversaryKind { kReplay, kTamperBitflip, kImpersonateSd, kImpersonateEs, kEavesdrop };

AdversaryKind adversary_kind_from_string(const std::string& s);
std::string to_string(AdversaryKind k);

struct AdversaryScript {
  AdversaryKind kind = AdversaryKind::kReplay;
  std::size_t trials = 100;
  /// Victim / requester device; empty picks the first device of domain 0
  /// (uploader) and of the last domain (requester).
  std::string victim;
  std::string requester;
  std::string m_type = "adv";
};

struct AdversaryReport {
  AdversaryKind kind = AdversaryKind::kReplay;
  std::size_t trials = 0;
  std::size_t rejected = 0;
  std::size_t false_accepts = 0;        // forged/replayed/tampered message accepted
  std::size_t adversary_recoveries = 0;  // plaintext obtained through a forged path
  std::size_t leaks = 0;                 // secrets found in captured bytes
  Metrics metrics;
  bool safe() const { return false_accepts == 0 && adversary_recoveries == 0 && leaks == 0; }
};

/// Deterministic multi-domain world.
///
/// Single logical scheduler: every entity handler runs on the caller's
/// thread in script order. The seed determines every random draw, so two
/// worlds built from equal configs produce byte-identical transcripts.
class World {
 public:
  explicit World(WorldConfig cfg);

  const WorldConfig& config() const { return cfg_; }
  const SystemParams& params() const { return params_; }
  const Group& group() const { return params_.g(); }
  Ledger& ledger() { return *ledger_; }
  const Ledger& ledger() const { return *ledger_; }
  CloudStore& cloud() { return *cloud_; }
  const Transcript& transcript() const { return transcript_; }
  const Metrics& metrics() const { return metrics_; }
  Timestamp now() const { return now_; }
  void advance(std::uint32_t seconds) { now_ += seconds; }
  Rng& rng() { return rng_; }
  /// The system secret held by every ES. Exposed for tracing tools and tests.
  const Scalar& es_secret() const { return s_; }

  const std::vector<Domain>& domains() const { return domains_; }
  const Device& device(const std::string& name) const;
  std::vector<std::string> device_names() const;
  bool has_device(const std::string& name) const { return devices_.contains(name); }
  const std::set<Did>& revoked() const { return revoked_; }
  bool is_flagged(const Did& did) const { return revoked_.contains(did); }
  std::optional<std::string> device_by_did(const Did& did) const;

  /// Registers a new device in `domain` under `name` (also its DID).
  const Device& register_device(std::uint32_t domain, const std::string& name);
  void grant(const std::string& device, const std::string& m_type);

  // Pipeline pieces ----------------------------------------------------------
  UploadMessage device_upload(const std::string& name, ByteView m, const std::string& m_type);
  UploadOutcome es_receive_upload(const std::string& es_id, const UploadMessage& msg);
  std::vector<UploadOutcome> es_receive_batch(const std::string& es_id,
                                              const std::vector<UploadMessage>& msgs);
  std::pair<RequestMessage, RequestContext> device_request(const std::string& name,
                                                           const std::string& m_type);
  /// ES side of steps 5-6; returns the response or the rejection.
  std::variant<TransferResponse, ErrorCode> es_handle_request(const std::string& es_id,
                                                              const RequestMessage& req);
  /// Requester side of step 7 (fetch from cloud, decrypt, V check).
  RequestOutcome device_receive(const std::string& name, const TransferResponse& resp,
                                const RequestContext& ctx);
  /// Steps 5-7 end to end.
  RequestOutcome request_pipeline(const std::string& name, const std::string& m_type);

  /// Step 8. Throws Error(kUntraceableReport) when the PID does not trace
  /// to a registered device.
  Did revoke_flow(const TamperReport& report);

  ScenarioResult run_scenario(const Script& script);
  AdversaryReport inject_adversary(const AdversaryScript& adv);

  /// Every secret value an eavesdropper must never see (s, SVs, composite
  /// private keys, content keys), collected as the world runs.
  const std::vector<Bytes>& audit_secrets() const { return audit_secrets_; }
  /// Number of transcript messages containing any audit secret.
  std::size_t scan_for_secrets(const Transcript& t) const;

  /// Digest over the public world state: ledger chain, cloud contents,
  /// devices' DIDs and public key sequences.
  Digest state_digest() const;

  const AccessToken& es_token(const std::string& es_id) const;

 private:
  void record(Step step, const std::string& from, const std::string& to, std::string type,
              Bytes bytes);
  void reject(const std::string& where, ErrorCode code);
  /// Advances the clock by one message hop (never beyond delta).
  void hop();
  StoredUpload store_upload(const std::string& es_id, const VerifiedUpload& vu,
                            const UploadMessage& msg);
  const std::string& home_es(const std::string& device) const;
  std::string es_of_domain(std::uint32_t domain) const;
  std::uint32_t domain_of_es(const std::string& es_id) const;
  LedgerDirectory directory(const std::string& es_id) const;
  void keep_secret(Bytes b);

  WorldConfig cfg_;
  Rng rng_;
  SystemParams params_;
  Scalar s_;
  std::shared_ptr<CloudStore> cloud_;
  std::unique_ptr<Ledger> ledger_;
  std::vector<Domain> domains_;
  std::map<std::string, Device> devices_;
  std::map<std::string, AccessToken> es_tokens_;
  std::set<Did> revoked_;
  Timestamp now_;
  Transcript transcript_;
  Metrics metrics_;
  std::vector<Bytes> audit_secrets_;
  std::map<std::string, std::optional<Pseudonym>> last_received_pid_;
};

/// Builds a world; equivalent to World(cfg) after validation.
std::unique_ptr<World> build_world(const WorldConfig& cfg);

/// A script that uploads one record from the first device of domain 0 and
/// requests it from the first device of the last domain.
Script happy_path_script(const World& w, const std::string& m_type = "temp");

}  // namespace cdsh::sim
