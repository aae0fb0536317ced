#pragma once

// Fingerprint support for one-sparse detection. A detector keeps, besides
// its count and index-weighted sum, F evaluations sum_j x_j * z_f^j in the
// Mersenne field p = 2^61 - 1. The field exceeds m^2 for every domain the
// toolkit instantiates (m <= 2^24), and the number of points F sets the
// false-accept width: each point catches a non-one-sparse state except with
// probability <= m/p, so F points push the miss rate below any requested
// delta_E without leaving 64-bit arithmetic.
//
// The evaluation points are verification randomness only; they are derived
// from a process-wide constant per domain and shared by every sketch over
// that domain (sharing cannot hurt the per-detector union bound, and merge
// compatibility comes for free). Power tables make z^j two lookups.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "gsketch/util.hpp"

namespace gsketch {

class FingerprintBasis {
 public:
  static constexpr u32 kMaxPoints = 6;
  static constexpr u32 kLoBits = 12;

  explicit FingerprintBasis(u64 m) : m_(m) {
    assert(m >= 1 && m <= (1ull << 24));
    Rng rng(derive_seed(0xf17e9b05u, m));
    u64 lo_size = std::min<u64>(m, 1ull << kLoBits);
    u64 hi_size = (m + (1ull << kLoBits) - 1) >> kLoBits;
    for (u32 f = 0; f < kMaxPoints; ++f) {
      u64 z = 1 + rng.next_below(kMersenne61 - 1);
      auto& lo = lo_[f];
      auto& hi = hi_[f];
      lo.resize(lo_size);
      hi.resize(hi_size);
      lo[0] = 1;
      for (u64 j = 1; j < lo_size; ++j) lo[j] = mul_m61(lo[j - 1], z);
      u64 stride = lo_size < (1ull << kLoBits) ? 0 : mul_m61(lo[lo_size - 1], z);
      hi[0] = 1;
      for (u64 h = 1; h < hi_size; ++h) hi[h] = mul_m61(hi[h - 1], stride);
    }
  }

  u64 domain() const { return m_; }

  // z_f^j for j in [0, m)
  u64 power(u32 f, u64 j) const {
    return mul_m61(lo_[f][j & ((1ull << kLoBits) - 1)], hi_[f][j >> kLoBits]);
  }

  // Points needed so that (m/p)^F <= delta_e.
  static u32 points_for(u64 m, double delta_e) {
    double need = -std::log2(delta_e);  // bits of certainty requested
    double per_point = 61.0 - static_cast<double>(bits_for(m));
    u32 f = static_cast<u32>(std::max(1.0, std::ceil(need / per_point)));
    if (f > kMaxPoints) throw std::invalid_argument("fingerprint: delta_e too small for 6 points");
    return f;
  }

  static std::shared_ptr<const FingerprintBasis> get(u64 m) {
    static std::mutex mu;
    static std::unordered_map<u64, std::shared_ptr<const FingerprintBasis>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[m];
    if (!slot) slot = std::make_shared<FingerprintBasis>(m);
    return slot;
  }

 private:
  u64 m_;
  std::array<std::vector<u64>, kMaxPoints> lo_;
  std::array<std::vector<u64>, kMaxPoints> hi_;
};

}  // namespace gsketch
