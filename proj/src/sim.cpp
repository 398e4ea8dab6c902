#include "cdsh/sim.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>
#include <unordered_map>

#include "cdsh/error.hpp"
#include "cdsh/sha256.hpp"

namespace cdsh::sim {
namespace {

std::string slug(ErrorCode code) {
  std::string s(error_message(code));
  std::replace(s.begin(), s.end(), ' ', '_');
  return s;
}

void append_str(Bytes& out, std::string_view s) { append_prefixed(out, as_bytes(s)); }

std::string read_str(ByteReader& r) {
  const ByteView b = r.prefixed();
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

Bytes scalar_secret(const Group& g, const Scalar& x) { return g.encode_scalar(x); }

}  // namespace

// Transcript ----------------------------------------------------------------

void Transcript::push(TranscriptEntry e) { entries_.push_back(std::move(e)); }

Transcript Transcript::slice(std::size_t from) const {
  Transcript t;
  for (std::size_t i = from; i < entries_.size(); ++i) t.entries_.push_back(entries_[i]);
  return t;
}

Bytes Transcript::export_binary() const {
  Bytes out;
  for (const auto& e : entries_) {
    out.push_back(static_cast<std::uint8_t>(e.step));
    append_str(out, e.sender);
    append_str(out, e.receiver);
    append_str(out, e.type);
    append_u32(out, e.time);
    append_prefixed(out, e.bytes);
  }
  return out;
}

Transcript Transcript::import_binary(ByteView b) {
  ByteReader r(b, ErrorCode::kMessageParse);
  Transcript t;
  while (!r.done()) {
    TranscriptEntry e;
    const std::uint8_t step = r.u8();
    if (step < 1 || step > 8) throw Error(ErrorCode::kMessageParse, "step tag");
    e.step = static_cast<Step>(step);
    e.sender = read_str(r);
    e.receiver = read_str(r);
    e.type = read_str(r);
    e.time = r.u32();
    const ByteView body = r.prefixed();
    e.bytes.assign(body.begin(), body.end());
    t.entries_.push_back(std::move(e));
  }
  return t;
}

std::string Transcript::export_log() const {
  std::ostringstream os;
  for (const auto& e : entries_) {
    const std::size_t shown = std::min<std::size_t>(e.bytes.size(), 16);
    os << "t=" << e.time << " step=" << static_cast<int>(e.step) << ' ' << e.sender << " -> "
       << e.receiver << ' ' << e.type << " len=" << e.bytes.size() << ' '
       << to_hex(ByteView(e.bytes.data(), shown)) << (shown < e.bytes.size() ? "..." : "") << '\n';
  }
  return os.str();
}

Digest Transcript::digest() const { return sha256(export_binary()); }

bool Transcript::reparses(const Group& g) const {
  for (const auto& e : entries_) {
    try {
      if (e.type == "upload") {
        wire::decode_upload(g, e.bytes);
      } else if (e.type == "record") {
        wire::decode_record(g, e.bytes);
      } else if (e.type == "request") {
        wire::decode_request(g, e.bytes);
      } else if (e.type == "transfer") {
        wire::decode_transfer(e.bytes);
      } else if (e.type == "pid") {
        wire::decode_pseudonym(g, e.bytes);
      } else if (e.type == "pk") {
        dkg::decode_public_sequence(g, e.bytes);
      } else if (e.type == "params") {
        g.decode_point(e.bytes);
      } else if (e.type == "did" || e.type == "index") {
        if (e.bytes.size() != sizeof(Digest)) return false;
      } else if (e.type == "ciphertext") {
        if (e.bytes.size() < aead::kOverhead) return false;
      } else {
        return false;
      }
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

bool Transcript::time_monotone() const {
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].time < entries_[i - 1].time) return false;
  }
  return true;
}

// Metrics -------------------------------------------------------------------

std::uint64_t Metrics::get(const std::string& key) const {
  const auto it = counters_.find(key);
  return it == counters_.end() ? 0 : it->second;
}

Metrics Metrics::delta_since(const Metrics& before) const {
  Metrics d;
  for (const auto& [k, v] : counters_) {
    const std::uint64_t prev = before.get(k);
    if (v != prev) d.counters_[k] = v - prev;
  }
  return d;
}

std::uint64_t Metrics::rejections() const {
  std::uint64_t n = 0;
  for (const auto& [k, v] : counters_) {
    if (k.starts_with("reject.")) n += v;
  }
  return n;
}

std::string Metrics::to_csv() const {
  std::ostringstream os;
  os << "metric,value\n";
  for (const auto& [k, v] : counters_) os << k << ',' << v << '\n';
  return os.str();
}

// Adversary kinds -----------------------------------------------------------

AdversaryKind adversary_kind_from_string(const std::string& s) {
  std::string k = s;
  std::replace(k.begin(), k.end(), '_', '-');
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  if (k == "replay") return AdversaryKind::kReplay;
  if (k == "tamper-bitflip" || k == "tamper") return AdversaryKind::kTamperBitflip;
  if (k == "impersonate-sd") return AdversaryKind::kImpersonateSd;
  if (k == "impersonate-es") return AdversaryKind::kImpersonateEs;
  if (k == "eavesdrop") return AdversaryKind::kEavesdrop;
  throw Error(ErrorCode::kConfig, "unknown adversary kind '" + s + "'");
}

std::string to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::kReplay:
      return "replay";
    case AdversaryKind::kTamperBitflip:
      return "tamper-bitflip";
    case AdversaryKind::kImpersonateSd:
      return "impersonate-sd";
    case AdversaryKind::kImpersonateEs:
      return "impersonate-es";
    case AdversaryKind::kEavesdrop:
      return "eavesdrop";
  }
  return "unknown";
}

// World ---------------------------------------------------------------------

World::World(WorldConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed), now_(cfg_.start_time) {
  cfg_.validate();
  auto gen = SystemParams::generate(Group::by_name(cfg_.group), rng_);
  params_ = gen.params;
  s_ = gen.s;
  keep_secret(scalar_secret(group(), s_));

  cloud_ = std::make_shared<CloudStore>();
  Ledger::Options opts;
  opts.pk_mode = cfg_.pk_mode;
  opts.pk_store = cloud_;
  for (std::uint32_t d = 0; d < cfg_.domains; ++d) {
    Domain dom;
    dom.index = d;
    for (std::uint32_t j = 0; j < cfg_.es_per_domain; ++j) {
      std::string id = "d" + std::to_string(d) + "-es" + std::to_string(j);
      es_tokens_.emplace(id, AccessToken{Role::kEdgeServer, id});
      opts.replica_ids.push_back(id);
      dom.es_ids.push_back(std::move(id));
    }
    domains_.push_back(std::move(dom));
  }
  ledger_ = std::make_unique<Ledger>(params_.group, std::move(opts));

  for (const auto& es : ledger_->replica_ids()) {
    record(Step::kInit, "ta", es, "params", group().encode_point(params_.p_pub));
  }
  for (std::uint32_t d = 0; d < cfg_.domains; ++d) {
    for (std::uint32_t i = 0; i < cfg_.sd_per_domain; ++i) {
      register_device(d, "d" + std::to_string(d) + "-sd" + std::to_string(i));
    }
  }
  for (const auto& name : device_names()) {
    for (const auto& t : cfg_.default_subscriptions) grant(name, t);
  }
  for (const auto& e : cfg_.acl) {
    if (!has_device(e.device)) throw Error(ErrorCode::kConfig, "acl names unknown device " + e.device);
    for (const auto& t : e.m_types) grant(e.device, t);
  }
}

const Device& World::device(const std::string& name) const {
  const auto it = devices_.find(name);
  if (it == devices_.end()) throw Error(ErrorCode::kConfig, "unknown device " + name);
  return it->second;
}

std::vector<std::string> World::device_names() const {
  std::vector<std::string> out;
  for (const auto& dom : domains_) out.insert(out.end(), dom.devices.begin(), dom.devices.end());
  return out;
}

std::optional<std::string> World::device_by_did(const Did& did) const {
  const std::string name = did.display();
  const auto it = devices_.find(name);
  if (it == devices_.end() || it->second.creds.did != did) return std::nullopt;
  return name;
}

const AccessToken& World::es_token(const std::string& es_id) const {
  const auto it = es_tokens_.find(es_id);
  if (it == es_tokens_.end()) throw Error(ErrorCode::kConfig, "unknown edge server " + es_id);
  return it->second;
}

const std::string& World::home_es(const std::string& name) const { return device(name).home_es; }

std::string World::es_of_domain(std::uint32_t domain) const {
  if (domain >= domains_.size()) throw Error(ErrorCode::kConfig, "unknown domain");
  return domains_[domain].es_ids.front();
}

std::uint32_t World::domain_of_es(const std::string& es_id) const {
  for (const auto& dom : domains_) {
    if (std::find(dom.es_ids.begin(), dom.es_ids.end(), es_id) != dom.es_ids.end()) return dom.index;
  }
  throw Error(ErrorCode::kConfig, "unknown edge server " + es_id);
}

LedgerDirectory World::directory(const std::string& es_id) const {
  return LedgerDirectory(*ledger_, es_token(es_id), es_id, &revoked_);
}

void World::keep_secret(Bytes b) { audit_secrets_.push_back(std::move(b)); }

void World::record(Step step, const std::string& from, const std::string& to, std::string type,
                   Bytes bytes) {
  metrics_.add("step." + std::to_string(static_cast<int>(step)));
  metrics_.add("msg." + type);
  metrics_.add("bytes." + type, bytes.size());
  transcript_.push(TranscriptEntry{step, from, to, std::move(type), std::move(bytes), now_});
}

void World::reject(const std::string& where, ErrorCode code) {
  metrics_.add("reject." + where + "." + slug(code));
}

void World::hop() { advance(std::min(cfg_.hop_ticks, cfg_.delta)); }

const Device& World::register_device(std::uint32_t domain, const std::string& name) {
  if (domain >= domains_.size()) throw Error(ErrorCode::kConfig, "unknown domain");
  if (devices_.contains(name)) throw Error(ErrorCode::kAlreadyRegistered, name);
  const Did did = Did::from_string(name);
  Domain& dom = domains_[domain];
  const std::string es = dom.es_ids[dom.devices.size() % dom.es_ids.size()];

  record(Step::kRegister, name, es, "did", Bytes(did.bytes.begin(), did.bytes.end()));
  hop();
  Registration reg =
      dkg::register_device(group(), did, dom.es_ids, s_, rng_, *ledger_, es_token(es));
  // Credentials go back over the secure registration channel; only the
  // public sequence travels to the ledger (or the cloud in digest mode).
  record(Step::kRegister, es, cfg_.pk_mode == PkStorageMode::kOnChain ? "bc" : "cs", "pk",
         dkg::encode_public_sequence(group(), did, *reg.pk));
  metrics_.add("register.ok");

  keep_secret(scalar_secret(group(), reg.creds.sv));
  for (const Scalar& psk : reg.creds.sk.psk) keep_secret(scalar_secret(group(), psk));

  dom.devices.push_back(name);
  auto [it, _] = devices_.emplace(name, Device{name, domain, es, std::move(reg.creds)});
  return it->second;
}

void World::grant(const std::string& name, const std::string& m_type) {
  const Device& d = device(name);
  domains_[d.domain].acl.grant(d.creds.did, m_type);
}

UploadMessage World::device_upload(const std::string& name, ByteView m, const std::string& m_type) {
  const Device& d = device(name);
  const PseudonymSecret ps = protocol::make_pseudonym(params_, d.creds, rng_);
  keep_secret(scalar_secret(group(), dkg::derive_private(group(), ps.pid.pid2, d.creds.sk)));
  const SymKey key = protocol::upload_key(params_, d.creds.sv, ps.r2, now_);
  keep_secret(Bytes(key.bytes.begin(), key.bytes.end()));

  UploadMessage msg = protocol::make_upload_with(params_, d.creds, ps, m, m_type, now_);
  record(Step::kUpload, name, d.home_es, "upload", wire::encode(group(), msg));
  hop();
  return msg;
}

StoredUpload World::store_upload(const std::string& es_id, const VerifiedUpload& vu,
                                 const UploadMessage& msg) {
  StoredUpload out;
  out.index = cloud_->put(msg.c);
  record(Step::kStore, es_id, "cs", "ciphertext", msg.c);
  hop();
  record(Step::kStore, "cs", es_id, "index", Bytes(out.index.begin(), out.index.end()));
  hop();
  out.record = protocol::build_record(params_, vu, msg, out.index);
  ledger_->append_record(es_token(es_id), out.record);
  record(Step::kStore, es_id, "bc", "record", wire::encode(group(), out.record));
  hop();
  metrics_.add("store.ok");
  metrics_.add("latency.upload", now_ - msg.t);
  return out;
}

UploadOutcome World::es_receive_upload(const std::string& es_id, const UploadMessage& msg) {
  UploadOutcome out;
  try {
    const VerifiedUpload vu =
        protocol::verify_upload(params_, s_, msg, directory(es_id), now_, cfg_.delta);
    metrics_.add("verify.upload.ok");
    out.stored = store_upload(es_id, vu, msg);
  } catch (const Error& e) {
    reject("upload", e.code());
    out.rejected = e.code();
  }
  return out;
}

std::vector<UploadOutcome> World::es_receive_batch(const std::string& es_id,
                                                   const std::vector<UploadMessage>& msgs) {
  std::vector<UploadOutcome> out(msgs.size());
  const LedgerDirectory dir = directory(es_id);
  std::vector<std::size_t> pending;
  std::vector<UploadMessage> batch;
  std::vector<Point> pks;
  std::vector<VerifiedUpload> resolved;
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    try {
      if (protocol::is_stale(msgs[i].t, now_, cfg_.delta)) throw Error(ErrorCode::kStaleTimestamp);
      resolved.push_back(protocol::resolve_upload(params_, s_, msgs[i], dir));
      pks.push_back(resolved.back().pk);
      batch.push_back(msgs[i]);
      pending.push_back(i);
    } catch (const Error& e) {
      reject("upload", e.code());
      out[i].rejected = e.code();
    }
  }
  if (pending.empty()) return out;

  metrics_.add("verify.batch.runs");
  if (protocol::batch_verify(params_, batch, pks, cfg_.zeta, rng_)) {
    metrics_.add("verify.batch.ok", pending.size());
    for (std::size_t j = 0; j < pending.size(); ++j) {
      try {
        out[pending[j]].stored = store_upload(es_id, resolved[j], batch[j]);
      } catch (const Error& e) {
        reject("store", e.code());
        out[pending[j]].rejected = e.code();
      }
    }
    return out;
  }

  // Some signature in the batch is bad: fall back to one-by-one checks.
  metrics_.add("verify.batch.fallback");
  for (std::size_t j = 0; j < pending.size(); ++j) out[pending[j]] = es_receive_upload(es_id, batch[j]);
  return out;
}

std::pair<RequestMessage, RequestContext> World::device_request(const std::string& name,
                                                                const std::string& m_type) {
  const Device& d = device(name);
  auto [req, ctx] = protocol::make_request(params_, d.creds, m_type, now_, rng_);
  keep_secret(scalar_secret(group(), dkg::derive_private(group(), req.pid.pid2, d.creds.sk)));
  record(Step::kRequest, name, d.home_es, "request", wire::encode(group(), req));
  hop();
  return {std::move(req), ctx};
}

std::variant<TransferResponse, ErrorCode> World::es_handle_request(const std::string& es_id,
                                                                   const RequestMessage& req) {
  try {
    const AccessControlList& acl = domains_[domain_of_es(es_id)].acl;
    const VerifiedRequest vr =
        protocol::verify_request(params_, s_, req, directory(es_id), acl, now_, cfg_.delta);
    metrics_.add("verify.request.ok");
    const auto candidates = ledger_->query_by_type(es_token(es_id), req.m_type, es_id);
    const TransferResponse resp =
        protocol::make_transfer(params_, s_, candidates, vr, now_, cfg_.selection);
    const auto requester = device_by_did(vr.did);
    record(Step::kTransfer, es_id, requester.value_or("sd"), "transfer", wire::encode(resp));
    hop();
    metrics_.add("transfer.ok");
    return resp;
  } catch (const Error& e) {
    reject("request", e.code());
    return e.code();
  }
}

RequestOutcome World::device_receive(const std::string& name, const TransferResponse& resp,
                                     const RequestContext& ctx) {
  RequestOutcome out;
  try {
    const RecoveredTransfer rt =
        protocol::recover_index_key(params_, resp, ctx, now_, cfg_.delta);
    record(Step::kDecrypt, name, "cs", "index", Bytes(rt.index.begin(), rt.index.end()));
    hop();
    const auto blob = cloud_->get(rt.index);
    if (!blob) throw Error(ErrorCode::kNoData, "no blob at index");
    record(Step::kDecrypt, "cs", name, "ciphertext", *blob);
    hop();
    DecryptedData dd = protocol::decrypt_and_verify(params_, *blob, rt.key, resp.v, rt.index);
    metrics_.add("decrypt.ok");
    out.recovered = true;
    out.m = std::move(dd.m);
    out.producer_pid = dd.pid;
  } catch (const IntegrityFailure& f) {
    reject("decrypt", f.code());
    out.error = f.code();
    out.producer_pid = f.reported_pid();
  } catch (const Error& e) {
    reject("decrypt", e.code());
    out.error = e.code();
  }
  if (out.producer_pid) last_received_pid_[name] = out.producer_pid;
  return out;
}

RequestOutcome World::request_pipeline(const std::string& name, const std::string& m_type) {
  const Timestamp start = now_;
  auto [req, ctx] = device_request(name, m_type);
  const auto resp = es_handle_request(home_es(name), req);
  if (const auto* code = std::get_if<ErrorCode>(&resp)) {
    RequestOutcome out;
    out.error = *code;
    return out;
  }
  RequestOutcome out = device_receive(name, std::get<TransferResponse>(resp), ctx);
  if (out.recovered) metrics_.add("latency.request", now_ - start);
  return out;
}

Did World::revoke_flow(const TamperReport& report) {
  const std::string es =
      has_device(report.reporter) ? home_es(report.reporter) : es_of_domain(0);
  record(Step::kRevoke, report.reporter.empty() ? "sd" : report.reporter, es, "pid",
         wire::encode_pseudonym(group(), report.pid));
  hop();
  const Did did = protocol::trace_identity(params_, report.pid, s_);
  if (!device_by_did(did)) {
    reject("revoke", ErrorCode::kUntraceableReport);
    throw Error(ErrorCode::kUntraceableReport);
  }
  revoked_.insert(did);
  metrics_.add("revoke.flagged");
  return did;
}

ScenarioResult World::run_scenario(const Script& script) {
  const Metrics before = metrics_;
  const std::size_t first = transcript_.size();
  ScenarioResult result;

  auto payload_for = [this](const ScriptStep& st) {
    if (st.payload) return Bytes(as_bytes(*st.payload).begin(), as_bytes(*st.payload).end());
    Bytes m(st.payload_size);
    rng_.fill(m);
    return m;
  };

  for (const ScriptStep& st : script.steps) {
    if (st.op == "upload") {
      const Bytes m = payload_for(st);
      const UploadMessage msg = device_upload(st.device, m, st.m_type);
      es_receive_upload(home_es(st.device), msg);
    } else if (st.op == "batch_upload") {
      std::vector<std::string> names = st.devices;
      if (names.empty()) {
        if (st.domain >= domains_.size()) throw Error(ErrorCode::kConfig, "unknown domain");
        names = domains_[st.domain].devices;
      }
      std::map<std::string, std::vector<UploadMessage>> by_es;
      for (const auto& n : names) {
        const Bytes m = payload_for(st);
        by_es[home_es(n)].push_back(device_upload(n, m, st.m_type));
      }
      for (const auto& [es, msgs] : by_es) es_receive_batch(es, msgs);
    } else if (st.op == "request") {
      result.requests.push_back(request_pipeline(st.device, st.m_type));
    } else if (st.op == "advance") {
      advance(st.seconds);
    } else if (st.op == "register") {
      register_device(st.domain, st.device);
    } else if (st.op == "grant") {
      grant(st.device, st.m_type);
    } else if (st.op == "report") {
      const auto it = last_received_pid_.find(st.device);
      if (it == last_received_pid_.end() || !it->second) {
        reject("revoke", ErrorCode::kUntraceableReport);
        continue;
      }
      try {
        revoke_flow(TamperReport{st.device, *it->second});
      } catch (const Error&) {
        // Already counted by revoke_flow.
      }
    } else {
      throw Error(ErrorCode::kConfig, "unknown script op '" + st.op + "'");
    }
  }

  result.transcript = transcript_.slice(first);
  result.metrics = metrics_.delta_since(before);
  result.metrics.set("ledger.replicas_consistent", ledger_->replicas_consistent() ? 1 : 0);
  return result;
}

AdversaryReport World::inject_adversary(const AdversaryScript& adv) {
  const Metrics before = metrics_;
  AdversaryReport rep;
  rep.kind = adv.kind;
  rep.trials = adv.trials;

  const std::string victim = adv.victim.empty() ? domains_.front().devices.at(0) : adv.victim;
  const std::string requester =
      adv.requester.empty() ? domains_.back().devices.at(0) : adv.requester;
  const std::string es = home_es(victim);
  grant(requester, adv.m_type);

  // The adversary only ever holds bytes copied out of the transcript.
  auto capture_last = [this]() { return transcript_.entries().back().bytes; };
  auto honest_upload = [&](ByteView m) {
    device_upload(victim, m, adv.m_type);
    Bytes wire_bytes = capture_last();
    es_receive_upload(es, wire::decode_upload(group(), wire_bytes));
    return wire_bytes;
  };
  auto random_bytes = [this](std::size_t n) {
    Bytes b(n);
    rng_.fill(b);
    return b;
  };

  switch (adv.kind) {
    case AdversaryKind::kReplay: {
      for (std::size_t i = 0; i < adv.trials; ++i) {
        const Bytes captured = honest_upload(random_bytes(32));
        advance(cfg_.delta + 1 + static_cast<std::uint32_t>(rng_.uniform(cfg_.delta + 1)));
        record(Step::kUpload, "adversary", es, "upload", captured);
        const UploadOutcome o = es_receive_upload(es, wire::decode_upload(group(), captured));
        if (o.stored) {
          ++rep.false_accepts;
        } else {
          ++rep.rejected;
        }
      }
      break;
    }
    case AdversaryKind::kTamperBitflip: {
      const Bytes captured = honest_upload(random_bytes(32));
      // M_Type is routing metadata outside the signed tuple, so its content
      // bytes are excluded; its length prefix is included.
      const std::size_t type_len = adv.m_type.size();
      const std::size_t positions = captured.size() - type_len;
      for (std::size_t i = 0; i < adv.trials; ++i) {
        std::size_t pos = rng_.uniform(positions);
        if (pos >= 4) pos += type_len;
        Bytes forged = captured;
        forged[pos] ^= static_cast<std::uint8_t>(1U << rng_.uniform(8));
        UploadMessage msg;
        try {
          msg = wire::decode_upload(group(), forged);
        } catch (const Error& e) {
          reject("upload", e.code());
          ++rep.rejected;
          continue;
        }
        const UploadOutcome o = es_receive_upload(es, msg);
        if (o.stored) {
          ++rep.false_accepts;
        } else {
          ++rep.rejected;
        }
      }
      break;
    }
    case AdversaryKind::kImpersonateSd: {
      const Bytes captured = honest_upload(random_bytes(32));
      const UploadMessage seen = wire::decode_upload(group(), captured);
      const Did victim_did = device(victim).creds.did;
      for (std::size_t i = 0; i < adv.trials; ++i) {
        // Alternate between the observed pseudonym and a fresh, well-formed
        // one for the victim's DID (the adversary is assumed to know it).
        // Without sk, theta is a guess in both cases.
        const Bytes m = random_bytes(32);
        const Scalar r = group().random_scalar(rng_);
        const PseudonymSecret fresh = protocol::make_pseudonym_with(params_, victim_did, r);
        UploadMessage msg;
        msg.m_type = adv.m_type;
        msg.pid = i % 2 == 0 ? seen.pid : fresh.pid;
        msg.t = now_;
        const Bytes pid_bytes = wire::encode_pseudonym(group(), msg.pid);
        msg.rv = params_.hashes().h3(m, pid_bytes, msg.t);
        Digest guessed_key{};
        rng_.fill(guessed_key);
        msg.c = aead::encrypt(SymKey{guessed_key}, m, pid_bytes, msg.t);
        const Scalar alpha = protocol::upload_challenge(params_, msg);
        const Scalar guessed_sk = group().random_scalar(rng_);
        msg.theta = i % 2 == 0 ? group().random_scalar(rng_)
                               : group().add(r, group().mul(alpha, guessed_sk));
        record(Step::kUpload, "adversary", es, "upload", wire::encode(group(), msg));
        const UploadOutcome o = es_receive_upload(es, msg);
        if (o.stored) {
          ++rep.false_accepts;
        } else {
          ++rep.rejected;
        }
      }
      break;
    }
    case AdversaryKind::kImpersonateEs: {
      honest_upload(random_bytes(32));
      for (std::size_t i = 0; i < adv.trials; ++i) {
        auto [req, ctx] = device_request(requester, adv.m_type);
        TransferResponse forged;
        if (i % 2 == 0) {
          // Intercept the genuine response and swap in a random key mask.
          const auto genuine = es_handle_request(home_es(requester), req);
          if (std::holds_alternative<ErrorCode>(genuine)) {
            ++rep.rejected;
            continue;
          }
          forged = wire::decode_transfer(capture_last());
        } else {
          rng_.fill(forged.pindex_prime);
          const auto records = ledger_->query_by_type(es_token(es), adv.m_type);
          if (!records.empty()) forged.v = records.back().v;
          forged.t_k = now_;
        }
        rng_.fill(forged.k);
        record(Step::kTransfer, "adversary", requester, "transfer", wire::encode(forged));
        const RequestOutcome o = device_receive(requester, forged, ctx);
        if (o.recovered) {
          ++rep.false_accepts;
        } else {
          ++rep.rejected;
        }
      }
      break;
    }
    case AdversaryKind::kEavesdrop: {
      const std::size_t first = transcript_.size();
      for (std::size_t i = 0; i < adv.trials; ++i) {
        const Bytes m = random_bytes(32);
        honest_upload(m);
        const RequestOutcome o = request_pipeline(requester, adv.m_type);
        if (!o.recovered || o.m != m) ++rep.rejected;
      }
      rep.leaks = scan_for_secrets(transcript_.slice(first));
      break;
    }
  }
  rep.metrics = metrics_.delta_since(before);
  return rep;
}

std::size_t World::scan_for_secrets(const Transcript& t) const {
  // Index secrets by their first 8 bytes; shorter secrets (toy group
  // scalars) would match by chance and are not scanned.
  std::unordered_map<std::uint64_t, std::vector<const Bytes*>> by_prefix;
  for (const Bytes& s : audit_secrets_) {
    if (s.size() < 8) continue;
    std::uint64_t key = 0;
    std::memcpy(&key, s.data(), 8);
    by_prefix[key].push_back(&s);
  }
  std::size_t hits = 0;
  for (const auto& e : t.entries()) {
    const Bytes& b = e.bytes;
    bool found = false;
    for (std::size_t i = 0; !found && i + 8 <= b.size(); ++i) {
      std::uint64_t key = 0;
      std::memcpy(&key, b.data() + i, 8);
      const auto it = by_prefix.find(key);
      if (it == by_prefix.end()) continue;
      for (const Bytes* s : it->second) {
        if (i + s->size() <= b.size() && std::equal(s->begin(), s->end(), b.begin() + i)) {
          found = true;
          break;
        }
      }
    }
    if (found) ++hits;
  }
  return hits;
}

Digest World::state_digest() const {
  Sha256 h;
  const Digest chain = ledger_->state_digest();
  const Digest blobs = cloud_->content_digest();
  h.update(chain);
  h.update(blobs);
  for (const auto& [name, d] : devices_) {
    Bytes b;
    append_prefixed(b, as_bytes(name));
    append(b, d.creds.did.bytes);
    h.update(b);
  }
  const Digest tr = transcript_.digest();
  h.update(tr);
  return h.finish();
}

std::unique_ptr<World> build_world(const WorldConfig& cfg) {
  cfg.validate();
  return std::make_unique<World>(cfg);
}

Script happy_path_script(const World& w, const std::string& m_type) {
  const std::string uploader = w.domains().front().devices.at(0);
  const std::string requester = w.domains().back().devices.at(0);
  Script s;
  ScriptStep grant;
  grant.op = "grant";
  grant.device = requester;
  grant.m_type = m_type;
  ScriptStep up;
  up.op = "upload";
  up.device = uploader;
  up.m_type = m_type;
  up.payload = "temperature=21.5C";
  ScriptStep req;
  req.op = "request";
  req.device = requester;
  req.m_type = m_type;
  s.steps = {grant, up, req};
  return s;
}

}  // namespace cdsh::sim
