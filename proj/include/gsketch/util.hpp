#pragma once

// Shared low-level utilities: fixed-width aliases, seed derivation, a small
// deterministic RNG, and fast modular arithmetic used by every sketch.
//
// Everything here is deterministic across platforms: no std::random
// distributions (their outputs are implementation-defined), no floating-point
// randomness. A (seed, salt...) pair always produces the same stream.

#include <cassert>
#include <cstdint>
#include <limits>

namespace gsketch {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i32 = std::int32_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// ---------------------------------------------------------------- seeding --

// splitmix64 finalizer; bijective on u64.
constexpr u64 mix64(u64 x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives an independent child seed from a master seed and up to three salts.
// Used everywhere a sketch needs per-component randomness: the child streams
// are as good as fresh seeds and make lazily-allocated state reproducible
// regardless of allocation order.
constexpr u64 derive_seed(u64 master, u64 s1, u64 s2 = 0, u64 s3 = 0) {
  u64 h = mix64(master ^ 0x6a09e667f3bcc909ull);
  h = mix64(h + 0x9e3779b97f4a7c15ull * s1);
  if (s2 != 0 || s3 != 0) {
    h = mix64(h + 0xbf58476d1ce4e5b9ull * s2);
    h = mix64(h + 0x94d049bb133111ebull * s3);
  }
  return h;
}

// Minimal deterministic RNG (splitmix64 stream).
struct Rng {
  u64 state = 0;

  explicit constexpr Rng(u64 seed = 0) : state(seed) {}

  constexpr u64 next() {
    state += 0x9e3779b97f4a7c15ull;
    u64 z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform draw from [0, n) by rejection; exact, no modulo bias.
  constexpr u64 next_below(u64 n) {
    assert(n > 0);
    u64 limit = n * (std::numeric_limits<u64>::max() / n);
    u64 r = next();
    while (r >= limit) r = next();
    return r % n;
  }

  // Uniform double in [0, 1) with 53 random bits; test/generator use only.
  constexpr double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
};

// ---------------------------------------------------- modular arithmetic --

// Reduction helper for moduli p < 2^30 applied to values a < 2^52, via a
// floating reciprocal with one correction step each side. Exact: double(a)
// is exact below 2^53, and the two roundings in a*(1/p) put the truncated
// quotient within 1 of floor(a/p) whenever a/p <= 2^51, so the remainder
// lands in [-p, 2p) and the corrections finish the job.
struct SmallMod {
  u64 p = 1;
  double pinv = 1.0;

  SmallMod() = default;
  explicit SmallMod(u64 modulus) : p(modulus), pinv(1.0 / static_cast<double>(modulus)) {
    assert(modulus >= 1 && modulus < (1ull << 30));
  }

  u64 reduce(u64 a) const {
    assert(a < (1ull << 52));
    u64 q = static_cast<u64>(static_cast<double>(a) * pinv);
    i64 r = static_cast<i64>(a) - static_cast<i64>(q * p);
    if (r < 0) r += static_cast<i64>(p);
    if (r >= static_cast<i64>(p)) r -= static_cast<i64>(p);
    return static_cast<u64>(r);
  }
};

// (a * b) mod p for arbitrary 64-bit operands below p < 2^64.
inline u64 mulmod(u64 a, u64 b, u64 p) {
  return static_cast<u64>((u128(a) * b) % p);
}

inline u64 addmod(u64 a, u64 b, u64 p) {
  u64 s = a + b;
  if (s >= p || s < a) s -= p;
  return s;
}

inline u64 submod(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + (p - b); }

inline u64 powmod(u64 base, u64 exp, u64 p) {
  u64 r = 1 % p;
  base %= p;
  while (exp) {
    if (exp & 1) r = mulmod(r, base, p);
    base = mulmod(base, base, p);
    exp >>= 1;
  }
  return r;
}

// Mersenne prime 2^61 - 1: the fingerprint field. Products reduce with two
// shifts instead of a 128/64 division, which matters on the broadcast paths.
inline constexpr u64 kMersenne61 = (1ull << 61) - 1;

inline u64 mul_m61(u64 a, u64 b) {
  u128 prod = u128(a) * b;
  u64 lo = static_cast<u64>(prod & kMersenne61);
  u64 hi = static_cast<u64>(prod >> 61);
  u64 s = lo + hi;
  if (s >= kMersenne61) s -= kMersenne61;
  return s;
}

inline u64 add_m61(u64 a, u64 b) {
  u64 s = a + b;
  if (s >= kMersenne61) s -= kMersenne61;
  return s;
}

inline u64 sub_m61(u64 a, u64 b) { return a >= b ? a - b : a + (kMersenne61 - b); }

// ------------------------------------------------------------- bit sizes --

// Number of bits needed to address [0, n), i.e. ceil(log2(n)) with n >= 1.
constexpr u32 bits_for(u64 n) {
  u32 b = 0;
  u64 v = 1;
  while (v < n) {
    v <<= 1;
    ++b;
  }
  return b;
}

// floor(log2(n)) for n >= 1.
constexpr u32 floor_log2(u64 n) {
  u32 b = 0;
  while (n >>= 1) ++b;
  return b;
}

}  // namespace gsketch
