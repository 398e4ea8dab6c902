#include "cdsh/aead.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "cdsh/error.hpp"
#include "cdsh/sha256.hpp"

namespace cdsh::aead {
namespace {

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

CipherCtx new_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
  return ctx;
}

}  // namespace

std::array<std::uint8_t, kNonceBytes> derive_nonce(ByteView pid, Timestamp t) {
  Bytes buf;
  append(buf, as_bytes("nonce"));
  append(buf, pid);
  append_u32(buf, t);
  const Digest d = sha256(buf);
  std::array<std::uint8_t, kNonceBytes> nonce;
  std::copy_n(d.begin(), kNonceBytes, nonce.begin());
  return nonce;
}

Bytes encrypt(const SymKey& key, ByteView m, ByteView pid, Timestamp t) {
  Bytes plain;
  plain.reserve(m.size() + pid.size() + 12);
  append_prefixed(plain, m);
  append_prefixed(plain, pid);
  append_u32(plain, t);

  const auto nonce = derive_nonce(pid, t);
  Bytes out(kNonceBytes + plain.size() + kTagBytes);
  std::copy(nonce.begin(), nonce.end(), out.begin());

  auto ctx = new_ctx();
  int len = 0;
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceBytes, nullptr) != 1 ||
      EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes.data(), nonce.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data() + kNonceBytes, &len, plain.data(),
                        static_cast<int>(plain.size())) != 1) {
    throw std::runtime_error("AES-GCM encrypt failed");
  }
  int tail = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + kNonceBytes + len, &tail) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagBytes,
                          out.data() + kNonceBytes + plain.size()) != 1) {
    throw std::runtime_error("AES-GCM finalize failed");
  }
  return out;
}

Plaintext decrypt(const SymKey& key, ByteView container) {
  if (container.size() < kOverhead) throw Error(ErrorCode::kCiphertextParse);
  const ByteView nonce = container.first(kNonceBytes);
  const ByteView body = container.subspan(kNonceBytes, container.size() - kOverhead);
  Bytes tag(container.end() - kTagBytes, container.end());

  Bytes plain(body.size());
  auto ctx = new_ctx();
  int len = 0;
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceBytes, nullptr) != 1 ||
      EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes.data(), nonce.data()) != 1 ||
      EVP_DecryptUpdate(ctx.get(), plain.data(), &len, body.data(),
                        static_cast<int>(body.size())) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagBytes, tag.data()) != 1) {
    throw std::runtime_error("AES-GCM decrypt setup failed");
  }
  int tail = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + len, &tail) != 1) {
    throw Error(ErrorCode::kCiphertextAuthFailed);
  }

  ByteReader r(plain, ErrorCode::kCiphertextParse);
  Plaintext out;
  const ByteView m = r.prefixed();
  out.m.assign(m.begin(), m.end());
  const ByteView pid = r.prefixed();
  out.pid.assign(pid.begin(), pid.end());
  out.t = r.u32();
  r.expect_done();
  return out;
}

}  // namespace cdsh::aead
