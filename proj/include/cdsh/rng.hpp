#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

#include "cdsh/bytes.hpp"

namespace cdsh {

/// Deterministic byte generator: SHA-256(seed || counter) blocks.
///
/// A given seed always yields the same stream, which is what makes world
/// transcripts bit-reproducible. from_entropy() seeds from the OS for
/// non-simulation use. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);
  explicit Rng(const Digest& seed) : seed_(seed) {}
  static Rng from_entropy();

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t uniform(std::uint64_t bound);
  /// Independent child stream, keyed by label.
  Rng fork(std::string_view label);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  void refill();

  Digest seed_{};
  std::uint64_t counter_ = 0;
  Digest block_{};
  std::size_t used_ = sizeof(Digest);
};

}  // namespace cdsh
