#include "cdsh/cloud_store.hpp"

#include <fstream>

#include "cdsh/error.hpp"
#include "cdsh/sha256.hpp"

namespace cdsh {

CloudStore::CloudStore(std::filesystem::path persist_dir) : persist_dir_(std::move(persist_dir)) {
  std::filesystem::create_directories(*persist_dir_);
  for (const auto& entry : std::filesystem::directory_iterator(*persist_dir_)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    Bytes blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    blobs_.emplace(sha256(blob), std::move(blob));
  }
}

void CloudStore::check_up() const {
  if (!up_) throw Error(ErrorCode::kStorageUnavailable);
}

Digest CloudStore::put(ByteView blob) {
  std::lock_guard lock(mu_);
  check_up();
  const Digest index = sha256(blob);
  const auto [it, inserted] = blobs_.emplace(index, Bytes(blob.begin(), blob.end()));
  if (inserted && persist_dir_) {
    std::ofstream out(*persist_dir_ / to_hex(index), std::ios::binary);
    out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
    if (!out) throw Error(ErrorCode::kStorageUnavailable, "persist write failed");
  }
  return index;
}

std::optional<Bytes> CloudStore::get(const Digest& index) const {
  std::lock_guard lock(mu_);
  check_up();
  const auto it = blobs_.find(index);
  if (it == blobs_.end()) return std::nullopt;
  return it->second;
}

bool CloudStore::contains(const Digest& index) const {
  std::lock_guard lock(mu_);
  return blobs_.contains(index);
}

std::size_t CloudStore::size() const {
  std::lock_guard lock(mu_);
  return blobs_.size();
}

Digest CloudStore::content_digest() const {
  std::lock_guard lock(mu_);
  Sha256 h;
  for (const auto& [index, blob] : blobs_) {
    h.update(index);
    Bytes len;
    append_u32(len, static_cast<std::uint32_t>(blob.size()));
    h.update(len);
    h.update(blob);
  }
  return h.finish();
}

void CloudStore::set_available(bool up) {
  std::lock_guard lock(mu_);
  up_ = up;
}

void CloudStore::tamper(const Digest& index, std::size_t byte_pos, std::uint8_t xor_mask) {
  std::lock_guard lock(mu_);
  auto& blob = blobs_.at(index);
  blob.at(byte_pos) ^= xor_mask;
}

}  // namespace cdsh
