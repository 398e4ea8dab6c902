#pragma once

#include "cdsh/bytes.hpp"

namespace cdsh {

/// 256-bit symmetric key.
struct SymKey {
  Digest bytes{};
  friend bool operator==(const SymKey&, const SymKey&) = default;
};

/// Decrypted upload payload: the tuple (M, PID, T).
struct Plaintext {
  Bytes m;
  Bytes pid;  // encoded pseudonym, opaque at this layer
  Timestamp t = 0;
  friend bool operator==(const Plaintext&, const Plaintext&) = default;
};

/// AES-256-GCM over the canonical tuple encoding
///   u32(len M) || M || u32(len PID) || PID || u32_be(T)
/// Container: nonce(12) || ciphertext || tag(16). The nonce is
/// SHA-256("nonce" || PID || T)[0..12); (PID, T) is unique per upload.
namespace aead {

inline constexpr std::size_t kNonceBytes = 12;
inline constexpr std::size_t kTagBytes = 16;
inline constexpr std::size_t kOverhead = kNonceBytes + kTagBytes;

std::array<std::uint8_t, kNonceBytes> derive_nonce(ByteView pid, Timestamp t);

Bytes encrypt(const SymKey& key, ByteView m, ByteView pid, Timestamp t);
/// Errors: kCiphertextParse (container too short or plaintext layout
/// malformed after authentication), kCiphertextAuthFailed (tag mismatch).
Plaintext decrypt(const SymKey& key, ByteView container);

}  // namespace aead
}  // namespace cdsh
