#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gsketch/bit_meter.hpp"
#include "gsketch/hash.hpp"
#include "gsketch/ne_sampler.hpp"
#include "gsketch/prime.hpp"
#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

// Match-or-sparsify sketch: 2s steps, each pairing a pairwise hash
// h_i : V -> [k] (whose preimage of 1 is the step's vertex group V_i) with a
// neighborhood-edge sampler for (G, V_i). Recovery queries the steps in
// order and greedily keeps every sampled edge whose endpoints are still
// free, yielding the "easy" matching M_easy. In the promise regime the easy
// matching is large, or the residual graph on unmatched vertices is sparse
// yet still holds most of the optimum; both sides are checked by the
// harness, not here.

namespace gsketch {

struct MosEdge {
  u32 u = 0, v = 0;  // canonical u < v
  u32 step = 0;      // index of the sampler that produced the edge
};

class MOSSketch {
 public:
  static u64 group_count(u64 opt, double alpha) {
    return (u64)std::ceil((double)opt / alpha);
  }

  // steps per batch; the sketch runs two batches
  static u64 batch_size(u32 n, u64 opt, double alpha) {
    double l = std::log2((double)n);
    return (u64)std::ceil((double)opt * (double)opt /
                          (alpha * l * alpha * l * alpha * l));
  }

  MOSSketch(u32 n, u64 opt, double alpha, u64 seed)
      : n_(n), opt_(opt), alpha_(alpha), seed_(seed) {
    if (n_ < 2) throw std::invalid_argument("mos: need n >= 2");
    if (opt_ < 1) throw std::invalid_argument("mos: need opt >= 1");
    if (!(alpha_ > 1.0)) throw std::invalid_argument("mos: need alpha > 1");
    k_ = group_count(opt_, alpha_);
    s_ = batch_size(n_, opt_, alpha_);
    if (k_ == 0 || s_ == 0) throw std::invalid_argument("mos: shape rounds to zero");
    pm_ = SmallMod(smallest_prime_gt(std::max<u64>(n_, k_)));
    h_c0_.resize(2 * s_);
    h_c1_.resize(2 * s_);
    samplers_.reserve(2 * s_);
    std::vector<u32> group;
    for (u64 i = 0; i < 2 * s_; ++i) {
      Rng rng(derive_seed(seed_, 0x6d6fu, i));
      h_c0_[i] = rng.next_below(pm_.p);
      h_c1_[i] = rng.next_below(pm_.p);
      group.clear();
      for (u32 v = 0; v < n_; ++v)
        if (pairwise_eval(h_c0_[i], h_c1_[i], v, pm_) % k_ == 1)
          group.push_back(v);
      samplers_.emplace_back(n_, group, derive_seed(seed_, 0x6e73u, i));
    }
  }

  u32 n() const { return n_; }
  u64 opt() const { return opt_; }
  double alpha() const { return alpha_; }
  u64 seed() const { return seed_; }
  u64 groups() const { return k_; }
  u64 batch() const { return s_; }
  u64 steps() const { return 2 * s_; }

  bool in_group(u64 step, u32 v) const {
    return samplers_.at(step).in_s(v);
  }

  // the analysis wants opt >= alpha^2 n^delta; reported, never enforced
  bool promise_regime(double delta) const {
    return (double)opt_ >= alpha_ * alpha_ * std::pow((double)n_, delta);
  }

  void feed(const StreamUpdate& up) {
    for (auto& s : samplers_) s.feed(up);
  }

  // Greedy over step order: each sampled edge joins M_easy iff both
  // endpoints are still free. Failed steps are skipped.
  std::vector<MosEdge> recover() const {
    std::vector<u8> used(n_, 0);
    std::vector<MosEdge> out;
    for (u64 i = 0; i < samplers_.size(); ++i) {
      NEQueryResult r = samplers_[i].query();
      if (r.kind != NEQueryResult::Kind::Sample) continue;
      u32 a = std::min(r.s_vertex, r.neighbor);
      u32 b = std::max(r.s_vertex, r.neighbor);
      if (used[a] || used[b]) continue;
      used[a] = used[b] = 1;
      out.push_back({a, b, (u32)i});
    }
    return out;
  }

  void merge(const MOSSketch& o) {
    if (!same_shape(o)) throw std::invalid_argument("mos: merge shape mismatch");
    for (std::size_t i = 0; i < samplers_.size(); ++i)
      samplers_[i].merge(o.samplers_[i]);
  }

  bool state_equal(const MOSSketch& o) const {
    if (!same_shape(o)) return false;
    for (std::size_t i = 0; i < samplers_.size(); ++i)
      if (!samplers_[i].state_equal(o.samplers_[i])) return false;
    return true;
  }

  BitMeter measure() const {
    BitMeter bm;
    for (const auto& s : samplers_) bm += s.measure();
    bm.randomness_bits += 2 * s_ * (2 * bits_for(pm_.p) + 64);
    return bm;
  }

 private:
  bool same_shape(const MOSSketch& o) const {
    return n_ == o.n_ && opt_ == o.opt_ && alpha_ == o.alpha_ &&
           seed_ == o.seed_;
  }

  u32 n_;
  u64 opt_;
  double alpha_;
  u64 seed_;
  u64 k_ = 0, s_ = 0;
  SmallMod pm_{2};
  std::vector<u64> h_c0_, h_c1_;
  std::vector<NESampler> samplers_;
};

}  // namespace gsketch
