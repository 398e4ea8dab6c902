#include "cdsh/rng.hpp"

#include <openssl/rand.h>

#include <stdexcept>

#include "cdsh/sha256.hpp"

namespace cdsh {

Rng::Rng(std::uint64_t seed) {
  Bytes material;
  append(material, as_bytes("cdsh-rng-seed"));
  append_u64(material, seed);
  seed_ = sha256(material);
}

Rng Rng::from_entropy() {
  Digest seed;
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    throw std::runtime_error("OS entropy unavailable");
  }
  return Rng(seed);
}

void Rng::refill() {
  Bytes material(seed_.begin(), seed_.end());
  append_u64(material, counter_++);
  block_ = sha256(material);
  used_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (used_ == block_.size()) refill();
    b = block_[used_++];
  }
}

std::uint64_t Rng::next_u64() {
  std::array<std::uint8_t, 8> b;
  fill(b);
  std::uint64_t v = 0;
  for (std::uint8_t x : b) v = v << 8 | x;
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform bound must be positive");
  // Rejection sampling over the largest multiple of bound.
  const std::uint64_t limit = max() - max() % bound;
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

Rng Rng::fork(std::string_view label) {
  Bytes material;
  append(material, as_bytes("cdsh-rng-fork"));
  Digest parent;
  fill(parent);
  append(material, parent);
  append(material, as_bytes(label));
  return Rng(sha256(material));
}

}  // namespace cdsh
