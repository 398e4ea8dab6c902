#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdsh/error.hpp"

namespace cdsh {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// A 256-bit opaque string: digests, PID2, RV, V, pindex, index, masks.
using Digest = std::array<std::uint8_t, 32>;

/// Seconds on the (virtual) clock; serialized as 4 bytes big-endian.
using Timestamp = std::uint32_t;

inline Digest xor_digest(const Digest& a, const Digest& b) {
  Digest r;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] ^ b[i];
  return r;
}

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline void append(Bytes& out, ByteView b) { out.insert(out.end(), b.begin(), b.end()); }

inline void append_u32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void append_u64(Bytes& out, std::uint64_t v) {
  append_u32(out, static_cast<std::uint32_t>(v >> 32));
  append_u32(out, static_cast<std::uint32_t>(v));
}

/// 4-byte big-endian length followed by the bytes.
inline void append_prefixed(Bytes& out, ByteView b) {
  append_u32(out, static_cast<std::uint32_t>(b.size()));
  append(out, b);
}

inline Bytes timestamp_bytes(Timestamp t) {
  Bytes out;
  append_u32(out, t);
  return out;
}

std::string to_hex(ByteView b);
Bytes from_hex(std::string_view hex);

/// Sequential big-endian reader; every read failure throws the error code
/// passed at construction.
class ByteReader {
 public:
  ByteReader(ByteView data, ErrorCode error_code) : data_(data), error_code_(error_code) {}

  ByteView take(std::size_t n);
  std::uint32_t u32();
  std::uint64_t u64();
  std::uint8_t u8();
  ByteView prefixed();
  Digest digest();
  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }
  /// Throws unless every byte was consumed.
  void expect_done() const;

 private:
  [[noreturn]] void fail() const;

  ByteView data_;
  std::size_t pos_ = 0;
  ErrorCode error_code_;
};

}  // namespace cdsh
