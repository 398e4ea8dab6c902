// Searches for small short-Weierstrass curves of prime order by exhaustive
// point counting. Prints "p a b order gx gy" for each hit.

#include <cstdint>
#include <cstdio>

#include "CLI11.hpp"

namespace {

using u64 = std::uint64_t;

u64 powmod(u64 b, u64 e, u64 m) {
  u64 r = 1;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// Legendre symbol in {-1, 0, 1}.
int legendre(u64 v, u64 p) {
  v %= p;
  if (v == 0) return 0;
  return powmod(v, (p - 1) / 2, p) == 1 ? 1 : -1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Find small prime-order curves y^2 = x^3 + ax + b"};
  u64 p_min = 1000, p_max = 1100, ab_max = 20, order_min = 1000;
  std::size_t limit = 10;
  app.add_option("--p-min", p_min, "Smallest field prime");
  app.add_option("--p-max", p_max, "Largest field prime");
  app.add_option("--ab-max", ab_max, "Largest coefficient tried");
  app.add_option("--order-min", order_min, "Smallest acceptable group order");
  app.add_option("--limit", limit, "Stop after this many hits");
  CLI11_PARSE(app, argc, argv);

  std::size_t hits = 0;
  std::printf("p a b order gx gy\n");
  for (u64 p = p_min; p <= p_max && hits < limit; ++p) {
    // p = 3 mod 4 keeps square roots a single exponentiation.
    if (p % 4 != 3 || !is_prime(p)) continue;
    for (u64 a = 1; a <= ab_max && hits < limit; ++a) {
      for (u64 b = 1; b <= ab_max && hits < limit; ++b) {
        if ((4 * powmod(a, 3, p) + 27 * powmod(b, 2, p)) % p == 0) continue;
        long long count = 1;
        for (u64 x = 0; x < p; ++x) count += 1 + legendre(x * x % p * x + a * x + b, p);
        const auto order = static_cast<u64>(count);
        if (order < order_min || order == p || !is_prime(order)) continue;
        for (u64 x = 0; x < p; ++x) {
          const u64 rhs = (x * x % p * x + a * x + b) % p;
          if (legendre(rhs, p) != 1) continue;
          u64 y = powmod(rhs, (p + 1) / 4, p);
          if (p - y < y) y = p - y;
          std::printf("%llu %llu %llu %llu %llu %llu\n", static_cast<unsigned long long>(p),
                      static_cast<unsigned long long>(a), static_cast<unsigned long long>(b),
                      static_cast<unsigned long long>(order), static_cast<unsigned long long>(x),
                      static_cast<unsigned long long>(y));
          ++hits;
          break;
        }
      }
    }
  }
  return hits > 0 ? 0 : 1;
}
