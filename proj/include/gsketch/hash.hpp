#pragma once

// k-wise independent hash family: degree-(k-1) polynomials over F_p with
// p the smallest prime exceeding both the domain and the range, reduced
// mod m on output. Restricted to any k distinct inputs the F_p values are
// exactly uniform; the final mod-m step introduces the usual <= p mod m
// rounding bias, accepted and accounted for in tests.

#include <algorithm>
#include <utility>
#include <vector>

#include "gsketch/prime.hpp"
#include "gsketch/util.hpp"

namespace gsketch {

// Evaluates c0 + c1*x mod p for the two-coefficient case every sketch leans
// on. Kept free-standing so hot structures can store bare coefficient pairs.
inline u64 pairwise_eval(u64 c0, u64 c1, u64 x, const SmallMod& p) {
  return p.reduce(c0 + c1 * x);
}

class KWiseHash {
 public:
  // Fresh hash with coefficients drawn from `seed`.
  KWiseHash(u32 k, u64 domain, u64 range, u64 seed)
      : k_(k), domain_(domain), range_(range), seed_(seed),
        p_(smallest_prime_gt(std::max(domain, range))),
        pm_(p_), rm_(range), coeffs_(k) {
    Rng rng(derive_seed(seed, 0x4857u));
    for (u32 i = 0; i < k_; ++i) coeffs_[i] = rng.next_below(p_);
  }

  // Explicit coefficients (and optionally an explicit prime), for tests and
  // for reconstructing a hash from recorded state.
  KWiseHash(std::vector<u64> coeffs, u64 domain, u64 range, u64 prime = 0)
      : k_(static_cast<u32>(coeffs.size())), domain_(domain), range_(range), seed_(0),
        p_(prime ? prime : smallest_prime_gt(std::max(domain, range))),
        pm_(p_), rm_(range), coeffs_(std::move(coeffs)) {}

  u64 eval(u64 x) const {
    u64 acc = coeffs_[k_ - 1];
    for (u32 i = k_ - 1; i-- > 0;) acc = pm_.reduce(acc * x + coeffs_[i]);
    return rm_.reduce(acc);
  }
  u64 operator()(u64 x) const { return eval(x); }

  u32 k() const { return k_; }
  u64 domain() const { return domain_; }
  u64 range() const { return range_; }
  u64 prime() const { return p_; }
  u64 seed() const { return seed_; }
  const std::vector<u64>& coeffs() const { return coeffs_; }

  // Stored-state cost: k coefficients of ceil(log2 p) bits plus the seed.
  u64 randomness_bits() const { return u64(k_) * bits_for(p_) + 64; }

 private:
  u32 k_;
  u64 domain_;
  u64 range_;
  u64 seed_;
  u64 p_;
  SmallMod pm_;
  SmallMod rm_;
  std::vector<u64> coeffs_;
};

inline KWiseHash hash_new(u32 k, u64 domain, u64 range, u64 seed) {
  return KWiseHash(k, domain, range, seed);
}

inline u64 hash_eval(const KWiseHash& h, u64 x) { return h.eval(x); }

}  // namespace gsketch
