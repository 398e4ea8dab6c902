#include <fstream>
#include <sstream>

#include "cdsh/error.hpp"
#include "cdsh/sim.hpp"
#include "json.hpp"

namespace cdsh::sim {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
}

template <typename T>
void get_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string(key) + ": " + e.what());
  }
}

}  // namespace

void WorldConfig::validate() const {
  if (domains < 1) throw Error(ErrorCode::kConfig, "need at least one domain");
  if (es_per_domain < 1) throw Error(ErrorCode::kConfig, "need at least one ES per domain");
  if (zeta < 1 || zeta > 32) throw Error(ErrorCode::kConfig, "zeta must be in [1, 32]");
  if (group != "production" && group != "p256" && group != "toy") {
    throw Error(ErrorCode::kConfig, "group must be 'production' or 'toy'");
  }
  if (hop_ticks > delta && delta > 0) {
    throw Error(ErrorCode::kConfig, "hop_ticks larger than the freshness window");
  }
}

WorldConfig WorldConfig::from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
  WorldConfig c;
  get_opt(j, "domains", c.domains);
  get_opt(j, "es_per_domain", c.es_per_domain);
  get_opt(j, "sd_per_domain", c.sd_per_domain);
  get_opt(j, "default_subscriptions", c.default_subscriptions);
  get_opt(j, "delta", c.delta);
  get_opt(j, "zeta", c.zeta);
  get_opt(j, "seed", c.seed);
  get_opt(j, "group", c.group);
  get_opt(j, "start_time", c.start_time);
  get_opt(j, "hop_ticks", c.hop_ticks);
  if (j.contains("pk_storage")) {
    const auto mode = j.at("pk_storage").get<std::string>();
    if (mode == "on_chain") {
      c.pk_mode = PkStorageMode::kOnChain;
    } else if (mode == "digest") {
      c.pk_mode = PkStorageMode::kDigest;
    } else {
      throw Error(ErrorCode::kConfig, "pk_storage must be 'on_chain' or 'digest'");
    }
  }
  if (j.contains("record_selection")) {
    const auto sel = j.at("record_selection").get<std::string>();
    if (sel == "latest") {
      c.selection = RecordSelection::kLatest;
    } else if (sel == "earliest") {
      c.selection = RecordSelection::kEarliest;
    } else {
      throw Error(ErrorCode::kConfig, "record_selection must be 'latest' or 'earliest'");
    }
  }
  if (j.contains("acl")) {
    for (const auto& e : j.at("acl")) {
      AclEntry entry;
      get_opt(e, "device", entry.device);
      get_opt(e, "types", entry.m_types);
      if (entry.device.empty()) throw Error(ErrorCode::kConfig, "acl entry without device");
      c.acl.push_back(std::move(entry));
    }
  }
  c.validate();
  return c;
}

WorldConfig WorldConfig::from_file(const std::filesystem::path& path) {
  return from_json(read_file(path));
}

std::string WorldConfig::to_json() const {
  json j;
  j["domains"] = domains;
  j["es_per_domain"] = es_per_domain;
  j["sd_per_domain"] = sd_per_domain;
  j["default_subscriptions"] = default_subscriptions;
  j["delta"] = delta;
  j["zeta"] = zeta;
  j["seed"] = seed;
  j["group"] = group;
  j["start_time"] = start_time;
  j["hop_ticks"] = hop_ticks;
  j["pk_storage"] = pk_mode == PkStorageMode::kOnChain ? "on_chain" : "digest";
  j["record_selection"] = selection == RecordSelection::kLatest ? "latest" : "earliest";
  j["acl"] = json::array();
  for (const auto& e : acl) j["acl"].push_back({{"device", e.device}, {"types", e.m_types}});
  return j.dump(2);
}

Script Script::from_json(const std::string& text) {
  const json j = parse(text);
  const json& steps = j.is_array() ? j : j.value("steps", json::array());
  Script s;
  for (const auto& st : steps) {
    ScriptStep step;
    get_opt(st, "op", step.op);
    get_opt(st, "device", step.device);
    get_opt(st, "devices", step.devices);
    get_opt(st, "m_type", step.m_type);
    if (st.contains("payload")) step.payload = st.at("payload").get<std::string>();
    get_opt(st, "payload_size", step.payload_size);
    get_opt(st, "seconds", step.seconds);
    get_opt(st, "domain", step.domain);
    if (step.op.empty()) throw Error(ErrorCode::kConfig, "script step without op");
    s.steps.push_back(std::move(step));
  }
  return s;
}

Script Script::from_file(const std::filesystem::path& path) { return from_json(read_file(path)); }

}  // namespace cdsh::sim
