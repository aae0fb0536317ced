#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsketch/l0_sampler.hpp"
#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

// Neighborhood-size tester: distinguishes |N(S) - T| <= b from >= 2b (T given
// only at query time) by keeping a battery of L0 samplers over the
// neighborhood vector of S. At query time each sampler is copied, one
// artificial unit is injected at every vertex of T \ S (so T looks fully
// adjacent to S), and the copy is sampled; vertices recovered outside T are
// tallied against a fixed cutoff.

namespace gsketch {

struct NeTestResult {
  bool yes = false;
  u64 outside_count = 0;
  u64 cutoff = 0;
  u64 samplers = 0;
};

class NETester {
 public:
  // Battery size: ceil((100/99) * 150 * ln(n) * (a + b) / b). The 100/99
  // factor compensates for the samplers' own 1/100 failure rate.
  static u64 sampler_count(u64 n, u64 a, u64 b) {
    long double kt = (100.0L / 99.0L) * 150.0L * std::log((long double)n) *
                     ((long double)(a + b) / (long double)b);
    return (u64)std::ceil(kt);
  }

  static u64 decision_cutoff(u64 n) {
    return (u64)std::ceil(200.0L * std::log((long double)n));
  }

  // battery_scale < 1 shrinks the sampler battery and the cutoff by the same
  // factor; the decision boundary stays put while the concentration (and the
  // memory bill) drops. Meant for small composed test cells, not production.
  NETester(u32 n, std::vector<u32> s, u64 a, u64 b, u64 seed,
           double battery_scale = 1.0)
      : n_(n), a_(a), b_(b), seed_(seed), scale_(battery_scale),
        s_(std::move(s)) {
    if (n_ < 2) throw std::invalid_argument("ne tester: need n >= 2");
    if (b_ == 0) throw std::invalid_argument("ne tester: b must be positive");
    if (a_ < 16 * b_)
      throw std::invalid_argument("ne tester: requires a >= 16*b");
    if (!(scale_ > 0.0) || scale_ > 1.0)
      throw std::invalid_argument("ne tester: battery scale in (0, 1]");
    if (s_.empty()) throw std::invalid_argument("ne tester: S is empty");
    std::sort(s_.begin(), s_.end());
    s_.erase(std::unique(s_.begin(), s_.end()), s_.end());
    if (s_.back() >= n_)
      throw std::invalid_argument("ne tester: S vertex out of range");
    in_s_.assign(n_, 0);
    for (u32 v : s_) in_s_[v] = 1;

    k_t_ = sampler_count(n_, a_, b_);
    cutoff_ = decision_cutoff(n_);
    if (scale_ != 1.0) {
      k_t_ = std::max<u64>(1, (u64)std::ceil(scale_ * (double)k_t_));
      cutoff_ = std::max<u64>(1, (u64)std::ceil(scale_ * (double)cutoff_));
    }
    double delta_e = std::pow((double)n_, -10.0);
    samplers_.reserve(k_t_);
    for (u64 i = 0; i < k_t_; ++i)
      samplers_.emplace_back(n_, 1.0 / 100.0, delta_e,
                             derive_seed(seed_, 0x6e74u, i));
  }

  u32 n() const { return n_; }
  u64 bound_a() const { return a_; }
  u64 bound_b() const { return b_; }
  u64 seed() const { return seed_; }
  u64 sampler_total() const { return k_t_; }
  u64 cutoff() const { return cutoff_; }
  double battery_scale() const { return scale_; }
  const std::vector<u32>& s_set() const { return s_; }

  // Graph update: only edges with exactly one endpoint in S touch the
  // neighborhood vector, at the outside endpoint.
  void feed(const StreamUpdate& up) {
    bool su = in_s_[up.u] != 0, sv = in_s_[up.v] != 0;
    if (su == sv) return;
    feed_index(su ? up.v : up.u, up.delta);
  }

  void feed_index(u32 w, i64 delta) {
    for (auto& smp : samplers_) smp.feed_index(w, delta);
  }

  NeTestResult ne_test(const std::vector<u32>& t_raw) const {
    std::vector<u32> t(t_raw);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (t.size() > a_)
      throw std::invalid_argument("ne tester: |T| exceeds the bound a");
    if (!t.empty() && t.back() >= n_)
      throw std::invalid_argument("ne tester: T vertex out of range");

    std::vector<u32> inject;
    inject.reserve(t.size());
    std::vector<u8> in_t(n_, 0);
    for (u32 w : t) {
      in_t[w] = 1;
      if (!in_s_[w]) inject.push_back(w);  // edge (w, min S), w outside S
    }

    u64 outside = 0;
    for (const auto& smp : samplers_) {
      L0Sampler probe = smp;  // injection must not disturb the stored state
      for (u32 w : inject) probe.feed_index(w, 1);
      L0Result r = probe.query();
      if (r.kind == L0Result::Kind::Sample && !in_t[r.index]) ++outside;
    }
    return {outside <= cutoff_, outside, cutoff_, k_t_};
  }

  void merge(const NETester& o) {
    if (n_ != o.n_ || a_ != o.a_ || b_ != o.b_ || seed_ != o.seed_ ||
        scale_ != o.scale_ || s_ != o.s_)
      throw std::invalid_argument("ne tester: merge shape mismatch");
    for (u64 i = 0; i < k_t_; ++i) samplers_[i].merge(o.samplers_[i]);
  }

  bool state_equal(const NETester& o) const {
    if (n_ != o.n_ || a_ != o.a_ || b_ != o.b_ || seed_ != o.seed_ ||
        scale_ != o.scale_ || s_ != o.s_)
      return false;
    for (u64 i = 0; i < k_t_; ++i)
      if (!samplers_[i].state_equal(o.samplers_[i])) return false;
    return true;
  }

  BitMeter measure() const {
    double delta_e = std::pow((double)n_, -10.0);
    BitMeter bm;
    bm.sketch_bits =
        k_t_ * L0Sampler::declared_sketch_bits(n_, 1.0 / 100.0, delta_e);
    bm.randomness_bits =
        k_t_ * L0Sampler::declared_randomness_bits(n_, 1.0 / 100.0, delta_e);
    auto sh = FingerprintBasis::points_for(n_, delta_e);
    bm.shared["fingerprint-basis/" + std::to_string(n_)] = u64(sh) * 61;
    return bm;
  }

 private:
  u32 n_;
  u64 a_;
  u64 b_;
  u64 seed_;
  double scale_ = 1.0;
  std::vector<u32> s_;
  std::vector<u8> in_s_;
  u64 k_t_ = 0;
  u64 cutoff_ = 0;
  std::vector<L0Sampler> samplers_;
};

}  // namespace gsketch
