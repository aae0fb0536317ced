#pragma once

// Exactly-one tester for the support of a nonnegative vector under signed
// updates, and the graph wrapper that applies it to |N(S) cap T|.
//
// Core idea: t = ceil(log2(1/delta)) independent rounds, each a pairwise
// hash splitting the domain into two buckets with one signed counter per
// bucket. When the final vector has exactly one nonzero coordinate, every
// round shows one zero and one nonzero counter. Zero support shows two zero
// counters in every round, support >= 2 shows two nonzero counters in a
// round unless all nonzeros land in one bucket, which pairwise independence
// bounds by 1/2 per round. So answers are exact for support sizes 0 and 1
// and wrong with probability <= delta for larger supports.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsketch/bit_meter.hpp"
#include "gsketch/hash.hpp"
#include "gsketch/prime.hpp"
#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

namespace gsketch {

class NEVectorCounter {
 public:
  struct Shape {
    u32 rounds;
    u64 hash_p;
  };

  static Shape shape_for(u64 domain, double delta) {
    Shape s;
    double need = std::max(1.0, std::ceil(std::log2(1.0 / delta)));
    s.rounds = static_cast<u32>(need);
    s.hash_p = smallest_prime_gt(std::max<u64>(domain, 2));
    return s;
  }

  static u64 declared_sketch_bits(u64 domain, double delta) {
    Shape s = shape_for(domain, delta);
    return u64(s.rounds) * 2 * (2 * bits_for(domain) + 1);
  }

  static u64 declared_randomness_bits(u64 domain, double delta) {
    Shape s = shape_for(domain, delta);
    return u64(s.rounds) * (2 * bits_for(s.hash_p) + 64);
  }

  NEVectorCounter(u64 domain, double delta, u64 seed)
      : domain_(domain), delta_(delta), seed_(seed) {
    Shape s = shape_for(domain, delta);
    rounds_ = s.rounds;
    pm_ = SmallMod(s.hash_p);
    c0_.resize(rounds_);
    c1_.resize(rounds_);
    for (u32 r = 0; r < rounds_; ++r) {
      Rng rng(derive_seed(seed_, 0x6e63u, r));
      c0_[r] = rng.next_below(pm_.p);
      c1_[r] = rng.next_below(pm_.p);
    }
    cnt_.assign(std::size_t(rounds_) * 2, 0);
  }

  u64 domain() const { return domain_; }
  u32 rounds() const { return rounds_; }
  u64 seed() const { return seed_; }

  void feed_index(u64 w, i64 delta) {
    if (delta == 0) return;
    for (u32 r = 0; r < rounds_; ++r) {
      u64 bucket = pairwise_eval(c0_[r], c1_[r], w, pm_) & 1;
      cnt_[std::size_t(r) * 2 + bucket] += delta;
    }
  }

  void merge(const NEVectorCounter& o) {
    if (domain_ != o.domain_ || seed_ != o.seed_ || rounds_ != o.rounds_)
      throw std::invalid_argument("NEVectorCounter::merge: incompatible");
    for (std::size_t i = 0; i < cnt_.size(); ++i) cnt_[i] += o.cnt_[i];
  }

  // True iff every round shows exactly one nonzero bucket.
  bool one() const {
    for (u32 r = 0; r < rounds_; ++r) {
      bool a = cnt_[std::size_t(r) * 2] != 0;
      bool b = cnt_[std::size_t(r) * 2 + 1] != 0;
      if (a == b) return false;
    }
    return true;
  }

  bool is_zero() const {
    for (i64 v : cnt_)
      if (v != 0) return false;
    return true;
  }

  bool state_equal(const NEVectorCounter& o) const {
    return domain_ == o.domain_ && seed_ == o.seed_ && cnt_ == o.cnt_;
  }

  BitMeter measure() const {
    BitMeter bm;
    bm.sketch_bits = declared_sketch_bits(domain_, delta_);
    bm.randomness_bits = declared_randomness_bits(domain_, delta_);
    return bm;
  }

 private:
  u64 domain_;
  double delta_;
  u64 seed_;
  u32 rounds_ = 0;
  SmallMod pm_;
  std::vector<u64> c0_, c1_;
  std::vector<i64> cnt_;  // rounds x 2
};

// Graph-facing form: decides |N_G(S) cap T| == 1 from edge updates. The
// neighborhood vector convention: coordinate w counts edges from w into S,
// coordinates inside S are identically zero, edges with both ends in S or
// both ends outside are invisible.
class NECounter {
 public:
  NECounter(u32 n, const std::vector<u32>& s_set, const std::vector<u32>& t_set, double delta,
            u64 seed)
      : n_(n), core_(n, delta, seed), in_s_(n, 0), in_t_(n, 0) {
    for (u32 v : s_set) {
      if (v >= n) throw std::out_of_range("NECounter: S vertex");
      in_s_[v] = 1;
    }
    for (u32 v : t_set) {
      if (v >= n) throw std::out_of_range("NECounter: T vertex");
      in_t_[v] = 1;
    }
  }

  void feed(const StreamUpdate& up) {
    bool su = in_s_[up.u], sv = in_s_[up.v];
    if (su == sv) return;
    u32 w = su ? up.v : up.u;
    if (!in_t_[w]) return;
    core_.feed_index(w, up.delta);
  }

  void feed_all(const std::vector<StreamUpdate>& ups) {
    for (const auto& u : ups) feed(u);
  }

  bool one() const { return core_.one(); }

  void merge(const NECounter& o) {
    if (n_ != o.n_ || in_s_ != o.in_s_ || in_t_ != o.in_t_)
      throw std::invalid_argument("NECounter::merge: incompatible");
    core_.merge(o.core_);
  }

  bool state_equal(const NECounter& o) const { return core_.state_equal(o.core_); }

  BitMeter measure() const { return core_.measure(); }

 private:
  u32 n_;
  NEVectorCounter core_;
  std::vector<u8> in_s_, in_t_;
};

}  // namespace gsketch
