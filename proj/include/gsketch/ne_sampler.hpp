#pragma once

// Near-uniform sampling from the neighborhood N(S) of a fixed vertex set S
// in a dynamic graph stream.
//
// Layout: 50 outer iterations, each carrying one sketch per level
// i = 0..ceil(2 log2 n). Level i subsamples the vertices outside S by a
// pairwise hash into [2^i] (level 0 keeps everyone), so some level isolates
// a single neighbor with constant probability. Each (iteration, level) node
// holds an exactly-one counter over the vertex domain and an L0 sampler over
// the edge domain restricted to S-crossing edges. Query walks iterations in
// order and levels bottom-up, and returns the edge recovered by the first
// node whose counter certifies a unique surviving neighbor and whose L0
// yields a sample; anything else falls through to the next node. With 50
// iterations the overall failure rate sits under 1/100.
//
// Nodes allocate lazily on first touched update; their seeds derive from
// (sketch seed, iteration, level), so state is independent of allocation
// order and same-seed sketches merge node-wise.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsketch/bit_meter.hpp"
#include "gsketch/l0_sampler.hpp"
#include "gsketch/ne_counter.hpp"
#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

namespace gsketch {

struct NEQueryResult {
  enum class Kind { Sample, Fail } kind = Kind::Fail;
  u32 s_vertex = 0;   // endpoint inside S
  u32 neighbor = 0;   // sampled vertex of N(S)
  i64 value = 0;      // net multiplicity of the recovered edge
};

class NESampler {
 public:
  static constexpr u32 kIterations = 50;
  static constexpr double kL0Fail = 1.0 / 100.0;

  NESampler(u32 n, const std::vector<u32>& s_set, u64 seed)
      : n_(n), seed_(seed), in_s_(n, 0) {
    if (n < 2) throw std::invalid_argument("NESampler: need n >= 2");
    for (u32 v : s_set) {
      if (v >= n) throw std::out_of_range("NESampler: S vertex");
      in_s_[v] = 1;
    }
    levels_ = static_cast<u32>(std::ceil(2.0 * std::log2(double(n)))) + 1;
    delta_e_ = std::pow(double(n), -10.0);
    edge_domain_ = num_edge_slots(n);
    level_mod_.reserve(levels_);
    for (u32 l = 0; l < levels_; ++l)
      level_mod_.emplace_back(smallest_prime_gt(std::max<u64>(n, u64(1) << l)));
    memb_c0_.resize(std::size_t(kIterations) * levels_);
    memb_c1_.resize(std::size_t(kIterations) * levels_);
    for (u32 it = 0; it < kIterations; ++it)
      for (u32 l = 0; l < levels_; ++l) {
        Rng rng(derive_seed(seed_, 0x6d62u, it, l));
        std::size_t idx = std::size_t(it) * levels_ + l;
        memb_c0_[idx] = rng.next_below(level_mod_[l].p);
        memb_c1_[idx] = rng.next_below(level_mod_[l].p);
      }
    nodes_.resize(std::size_t(kIterations) * levels_);
  }

  u32 n() const { return n_; }
  u32 levels() const { return levels_; }
  u64 seed() const { return seed_; }
  bool in_s(u32 v) const { return in_s_[v] != 0; }

  void feed(const StreamUpdate& up) {
    bool su = in_s_[up.u] != 0, sv = in_s_[up.v] != 0;
    if (su == sv) return;  // only S-crossing edges touch the neighborhood
    u32 w = su ? up.v : up.u;
    u64 eidx = edge_index(up.u, up.v, n_);
    for (u32 it = 0; it < kIterations; ++it) {
      for (u32 l = 0; l < levels_; ++l) {
        std::size_t idx = std::size_t(it) * levels_ + l;
        if (l > 0) {
          u64 hv = pairwise_eval(memb_c0_[idx], memb_c1_[idx], w, level_mod_[l]) &
                   ((u64(1) << l) - 1);
          if (hv != 0) continue;
        }
        ensure(idx, it, l);
        nodes_[idx]->counter.feed_index(w, up.delta);
        nodes_[idx]->l0.feed_index(eidx, up.delta);
      }
    }
  }

  void feed_all(const std::vector<StreamUpdate>& ups) {
    for (const auto& u : ups) feed(u);
  }

  NEQueryResult query() const {
    for (u32 it = 0; it < kIterations; ++it) {
      for (u32 l = 0; l < levels_; ++l) {
        const Node* nd = nodes_[std::size_t(it) * levels_ + l].get();
        if (!nd || !nd->counter.one()) continue;
        L0Result r = nd->l0.query();
        if (r.kind != L0Result::Kind::Sample) continue;  // fall through
        auto [u, v] = edge_unindex(r.index, n_);
        NEQueryResult out;
        out.kind = NEQueryResult::Kind::Sample;
        out.s_vertex = in_s_[u] ? u : v;
        out.neighbor = in_s_[u] ? v : u;
        out.value = r.value;
        return out;
      }
    }
    return {};
  }

  void merge(const NESampler& o) {
    if (n_ != o.n_ || seed_ != o.seed_ || in_s_ != o.in_s_)
      throw std::invalid_argument("NESampler::merge: incompatible");
    for (std::size_t idx = 0; idx < nodes_.size(); ++idx) {
      if (!o.nodes_[idx]) continue;
      u32 it = static_cast<u32>(idx / levels_), l = static_cast<u32>(idx % levels_);
      ensure(idx, it, l);
      nodes_[idx]->counter.merge(o.nodes_[idx]->counter);
      nodes_[idx]->l0.merge(o.nodes_[idx]->l0);
    }
  }

  bool state_equal(const NESampler& o) const {
    if (n_ != o.n_ || seed_ != o.seed_ || in_s_ != o.in_s_) return false;
    for (std::size_t idx = 0; idx < nodes_.size(); ++idx) {
      const Node* a = nodes_[idx].get();
      const Node* b = o.nodes_[idx].get();
      if (!a && !b) continue;
      if (!a) {
        if (!b->counter.is_zero() || !b->l0.is_zero()) return false;
      } else if (!b) {
        if (!a->counter.is_zero() || !a->l0.is_zero()) return false;
      } else {
        if (!a->counter.state_equal(b->counter) || !a->l0.state_equal(b->l0)) return false;
      }
    }
    return true;
  }

  BitMeter measure() const {
    BitMeter bm;
    u64 nodes = u64(kIterations) * levels_;
    u64 l0s = L0Sampler::declared_sketch_bits(edge_domain_, kL0Fail, delta_e_);
    u64 l0r = L0Sampler::declared_randomness_bits(edge_domain_, kL0Fail, delta_e_);
    u64 cs = NEVectorCounter::declared_sketch_bits(n_, delta_e_);
    u64 cr = NEVectorCounter::declared_randomness_bits(n_, delta_e_);
    bm.sketch_bits = nodes * (l0s + cs);
    bm.randomness_bits = nodes * (l0r + cr);
    for (u32 l = 1; l < levels_; ++l)
      bm.randomness_bits += u64(kIterations) * (2 * bits_for(level_mod_[l].p) + 64);
    auto shape = L0Sampler::shape_for(edge_domain_, kL0Fail, delta_e_);
    bm.shared["fingerprint-basis/" + std::to_string(edge_domain_)] = u64(shape.fcount) * 61;
    return bm;
  }

 private:
  struct Node {
    NEVectorCounter counter;
    L0Sampler l0;
    Node(u32 n, u64 edge_domain, double delta_e, u64 node_seed)
        : counter(n, delta_e, derive_seed(node_seed, 0x6374u)),
          l0(edge_domain, kL0Fail, delta_e, derive_seed(node_seed, 0x6564u)) {}
  };

  void ensure(std::size_t idx, u32 it, u32 l) {
    if (!nodes_[idx])
      nodes_[idx] = std::make_unique<Node>(n_, edge_domain_, delta_e_,
                                           derive_seed(seed_, 0x6e6fu, it, l));
  }

  u32 n_;
  u64 seed_;
  u32 levels_ = 0;
  double delta_e_ = 0;
  u64 edge_domain_ = 0;
  std::vector<u8> in_s_;
  std::vector<SmallMod> level_mod_;
  std::vector<u64> memb_c0_, memb_c1_;
  std::vector<std::unique_ptr<Node>> nodes_;
};

}  // namespace gsketch
