#pragma once

// Pinned toy curve, found by tools/find_toy_curve (exhaustive point count
// over primes p = 3 mod 4 near 1009 and small a, b).
//
//   E: y^2 = x^3 + 11x + 11 over F_1019,  #E = 1009 (prime), G = (0, 101)
//
// Encoding widths scale to ceil(log2(p) / 8) bytes: field elements and
// scalars are 2 bytes each, points 4 bytes (x || y, big-endian).

#include <cstdint>

namespace cdsh::toy {

inline constexpr std::uint64_t kP = 1019;
inline constexpr std::uint64_t kA = 11;
inline constexpr std::uint64_t kB = 11;
inline constexpr std::uint64_t kOrder = 1009;
inline constexpr std::uint64_t kGx = 0;
inline constexpr std::uint64_t kGy = 101;

}  // namespace cdsh::toy
