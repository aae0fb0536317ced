#pragma once

// Primality testing and prime search. Deterministic Miller-Rabin with the
// standard 12-witness set, valid for every 64-bit input, so prime choices
// made by sketches (hash moduli, fingerprint fields, syndrome fields) never
// depend on probabilistic certification.

#include <mutex>
#include <unordered_map>

#include "gsketch/util.hpp"

namespace gsketch {

namespace detail {

inline bool miller_rabin_witness(u64 n, u64 a, u64 d, u32 r) {
  u64 x = powmod(a % n, d, n);
  if (x == 1 || x == n - 1) return true;
  for (u32 i = 1; i < r; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace detail

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  u32 r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // This witness set decides primality exactly for all n < 2^64.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (!detail::miller_rabin_witness(n, a, d, r)) return false;
  }
  return true;
}

// Smallest prime strictly greater than c. Memoized: sketch constructors ask
// for the same handful of moduli over and over.
inline u64 smallest_prime_gt(u64 c) {
  static std::mutex mu;
  static std::unordered_map<u64, u64> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(c);
    if (it != cache.end()) return it->second;
  }
  u64 n = c + 1;
  if (n <= 2) {
    n = 2;
  } else {
    if ((n & 1) == 0) ++n;
    while (!is_prime(n)) n += 2;
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(c, n);
  return n;
}

}  // namespace gsketch
