#include <filesystem>
#include <fstream>

#include "cdsh/cloud_store.hpp"
#include "cdsh/error.hpp"
#include "cdsh/ledger.hpp"
#include "cdsh/protocol.hpp"
#include "cdsh/sha256.hpp"
#include "doctest.h"

using namespace cdsh;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kConfig;
}

const AccessToken kEs{Role::kEdgeServer, "es-0"};
const AccessToken kSd{Role::kSmartDevice, "sd-0"};

LedgerRecord sample_record(const Group& g, Rng& rng, const std::string& type) {
  LedgerRecord r;
  r.m_type = type;
  r.pid.pid1 = g.mul_base(g.random_scalar(rng));
  rng.fill(r.pid.pid2);
  rng.fill(r.v);
  rng.fill(r.pindex);
  r.t = static_cast<Timestamp>(rng.next_u64());
  return r;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cdsh-test-" + name);
}

}  // namespace

TEST_CASE("ledger starts at genesis and grows one block per append") {
  const auto g = Group::toy();
  Ledger ledger(g, Ledger::Options{{"es-0", "es-1", "es-2"}});
  CHECK(ledger.length() == 1);
  CHECK(ledger.verify_chain());
  Rng rng(1);
  const BlockRef ref = ledger.append_record(kEs, sample_record(*g, rng, "temp"));
  CHECK(ref.height == 1);
  ledger.append_record(kEs, sample_record(*g, rng, "hum"));
  ledger.append_record(kEs, sample_record(*g, rng, "temp"));
  CHECK(ledger.length() == 4);
  CHECK(ledger.length("es-2") == 4);
  CHECK(ledger.replicas_consistent());
  CHECK(ledger.query_by_type(kEs, "temp", "es-1").size() == 2);
  CHECK(ledger.query_by_type(kEs, "none").empty());
}

TEST_CASE("smart devices have no ledger privileges") {
  const auto g = Group::toy();
  Ledger ledger(g, Ledger::Options{{"es-0"}});
  Rng rng(2);
  CHECK(code_of([&] { ledger.append_record(kSd, sample_record(*g, rng, "t")); }) ==
        ErrorCode::kAccessDenied);
  CHECK(code_of([&] { ledger.query_by_type(kSd, "t"); }) == ErrorCode::kAccessDenied);
  CHECK(code_of([&] { ledger.lookup_pk(kSd, Did::from_string("x")); }) == ErrorCode::kAccessDenied);
}

TEST_CASE("query returns records in append order") {
  const auto g = Group::production();
  Ledger ledger(g, Ledger::Options{{"es-0", "es-1"}});
  Rng rng(3);
  std::vector<LedgerRecord> want;
  for (int i = 0; i < 5; ++i) {
    want.push_back(sample_record(*g, rng, "temp"));
    ledger.append_record(kEs, want.back());
  }
  CHECK(ledger.query_by_type(kEs, "temp") == want);
}

TEST_CASE("any single-byte mutation of a committed record breaks verification") {
  const auto g = Group::production();
  Ledger ledger(g, Ledger::Options{{"es-0", "es-1"}});
  Rng rng(4);
  for (int i = 0; i < 4; ++i) ledger.append_record(kEs, sample_record(*g, rng, "temp"));
  for (int i = 0; i < 200; ++i) {
    Ledger copy(g, Ledger::Options{{"es-0", "es-1"}});
    const auto path = temp_path("mutate.bin");
    ledger.dump(path);
    copy.load(path);
    const std::uint64_t height = 1 + rng.uniform(4);
    const std::size_t size = wire::encode(*g, ledger.query_by_type(kEs, "temp")[0]).size();
    copy.tamper_record_byte("es-1", height, rng.uniform(size),
                            static_cast<std::uint8_t>(1 + rng.uniform(255)));
    REQUIRE_FALSE(copy.verify_chain("es-1"));
    CHECK(copy.verify_chain("es-0"));
    CHECK_FALSE(copy.replicas_consistent());
  }
}

TEST_CASE("dump and load round trip") {
  const auto g = Group::toy();
  Ledger a(g, Ledger::Options{{"es-0", "es-1"}});
  Rng rng(5);
  for (int i = 0; i < 3; ++i) a.append_record(kEs, sample_record(*g, rng, "temp"));
  const auto path = temp_path("dump.bin");
  a.dump(path);
  Ledger b(g, Ledger::Options{{"x"}});
  b.load(path);
  CHECK(b.state_digest() == a.state_digest());
  CHECK(b.query_by_type(kEs, "temp") == a.query_by_type(kEs, "temp"));

  {
    std::ofstream f(path, std::ios::binary | std::ios::app);
    f.put(0);
  }
  CHECK(code_of([&] { b.load(path); }) == ErrorCode::kMessageParse);
  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << "NOTACHAIN";
  }
  CHECK(code_of([&] { b.load(path); }) == ErrorCode::kMessageParse);
}

TEST_CASE("replica faults are detected") {
  const auto g = Group::toy();
  Ledger ledger(g, Ledger::Options{{"es-0", "es-1"}});
  Rng rng(6);
  ledger.append_record(kEs, sample_record(*g, rng, "temp"));
  ledger.inject_divergence("es-1");
  CHECK(code_of([&] { ledger.append_record(kEs, sample_record(*g, rng, "temp")); }) ==
        ErrorCode::kReplicationFailure);

  Ledger other(g, Ledger::Options{{"es-0", "es-1"}});
  other.append_record(kEs, sample_record(*g, rng, "temp"));
  other.truncate_replica("es-1", 1);
  CHECK_FALSE(other.replicas_consistent());
  CHECK(other.query_by_type(kEs, "temp", "es-1").empty());
}

TEST_CASE("public keys in digest mode") {
  const auto g = Group::toy();
  auto cloud = std::make_shared<CloudStore>();
  Ledger ledger(g, Ledger::Options{{"es-0"}, PkStorageMode::kDigest, cloud});
  Rng rng(7);
  const Scalar s = g->random_scalar(rng);
  const Did did = Did::from_string("dev");
  const std::vector<std::string> nodes = {"es-0"};
  const Registration reg = dkg::register_device(*g, did, nodes, s, rng, ledger, kEs);
  CHECK(*ledger.lookup_pk(kEs, did) == *reg.pk);
  CHECK(cloud->size() == 1);
  CHECK(code_of([&] { ledger.lookup_pk(kEs, Did::from_string("nobody")); }) ==
        ErrorCode::kUnknownIdentity);

  const Digest index = sha256(dkg::encode_public_sequence(*g, did, *reg.pk));
  cloud->tamper(index, 40);
  CHECK(code_of([&] { ledger.lookup_pk(kEs, did); }) == ErrorCode::kPublicKeyTampered);

  CHECK(code_of([&] { Ledger bad(g, Ledger::Options{{"es-0"}, PkStorageMode::kDigest, nullptr}); }) ==
        ErrorCode::kConfig);
}

TEST_CASE("cloud store") {
  CloudStore cs;
  const Bytes blob = {1, 2, 3};
  const Digest idx = cs.put(blob);
  CHECK(idx == sha256(blob));
  CHECK(cs.get(idx) == blob);
  CHECK_FALSE(cs.get(Digest{}).has_value());
  const Digest before = cs.content_digest();
  cs.set_available(false);
  CHECK(code_of([&] { cs.put(blob); }) == ErrorCode::kStorageUnavailable);
  CHECK(code_of([&] { cs.get(idx); }) == ErrorCode::kStorageUnavailable);
  cs.set_available(true);
  cs.tamper(idx, 0);
  CHECK(cs.get(idx) != blob);
  CHECK(cs.content_digest() != before);

  const auto dir = temp_path("cloud");
  std::filesystem::remove_all(dir);
  {
    CloudStore persisted(dir);
    persisted.put(blob);
  }
  CloudStore reloaded(dir);
  CHECK(reloaded.get(idx) == blob);
  std::filesystem::remove_all(dir);
}
