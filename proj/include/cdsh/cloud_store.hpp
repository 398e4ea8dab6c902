#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>

#include "cdsh/bytes.hpp"

namespace cdsh {

/// Content-addressed blob store standing in for the cloud server.
/// index = SHA-256(blob). Optionally mirrors every blob to a directory.
class CloudStore {
 public:
  CloudStore() = default;
  explicit CloudStore(std::filesystem::path persist_dir);

  /// Throws Error(kStorageUnavailable) while the store is marked down.
  Digest put(ByteView blob);
  std::optional<Bytes> get(const Digest& index) const;
  bool contains(const Digest& index) const;
  std::size_t size() const;
  /// SHA-256 over (index || u32 len || blob) in index order.
  Digest content_digest() const;

  /// Failure injection: while unavailable, put/get throw.
  void set_available(bool up);

  /// Test hook: flips bits of a stored blob in place (index unchanged).
  void tamper(const Digest& index, std::size_t byte_pos, std::uint8_t xor_mask = 0x01);

 private:
  void check_up() const;

  mutable std::mutex mu_;
  std::map<Digest, Bytes> blobs_;
  std::optional<std::filesystem::path> persist_dir_;
  bool up_ = true;
};

}  // namespace cdsh
