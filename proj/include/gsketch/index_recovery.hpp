#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gsketch/bit_meter.hpp"
#include "gsketch/hash.hpp"
#include "gsketch/prime.hpp"
#include "gsketch/util.hpp"

// Index recovery over a mod-q vector: a pairwise hash marks a sparse random
// set H of coordinates, the sketch keeps the mod-q sum over H plus
// ceil(log2(1/gamma)) random half-splits of that sum. A query against a
// candidate set T succeeds when exactly one T coordinate lands in H and no
// split sees mass on both sides; the survivor and the accumulated sum are
// returned. T is always padded with virtual coordinates >= n so its size is
// exactly a, which keeps the success probability independent of |T|.

namespace gsketch {

struct IndexRecoveryResult {
  bool ok = false;
  u64 index = 0;   // may be a virtual pad coordinate (>= n)
  u32 value = 0;   // mod-q sum over H
};

namespace detail {

// Residue of the range reduction that marks membership in H.
inline constexpr u64 kMemberResidue = 1;

struct IrParams {
  u64 n = 0;
  u64 a_int = 0;    // pad target ceil(a)
  u64 range = 0;    // hash range ceil(2a)
  u32 t = 0;        // split-test count ceil(log2(1/gamma))
  u64 domain = 0;   // n + a_int, covers virtual pad coordinates
  u64 p_h = 0;
  u64 p_s = 0;

  IrParams() = default;
  IrParams(u64 n_, double a, double gamma) : n(n_) {
    if (n == 0 || a < 1.0 || gamma <= 0.0 || gamma >= 1.0)
      throw std::invalid_argument("index recovery: bad parameters");
    a_int = (u64)std::ceil(a);
    range = (u64)std::ceil(2.0 * a);
    t = (u32)std::ceil(std::log2(1.0 / gamma));
    if (t == 0) t = 1;
    domain = n + a_int;
    p_h = smallest_prime_gt(std::max(domain, range));
    p_s = smallest_prime_gt(std::max<u64>(domain, 2));
  }
};

}  // namespace detail

class IndexRecovery {
 public:
  IndexRecovery(u64 n, double a, double gamma, u32 q, u64 seed)
      : par_(n, a, gamma), q_(q), seed_(seed), pm_h_(par_.p_h), pm_s_(par_.p_s) {
    if (q_ < 2 || !is_prime(q_))
      throw std::invalid_argument("index recovery: q must be prime");
    Rng rng(derive_seed(seed_, 0x6972u));
    h_c0_ = rng.next_below(par_.p_h);
    h_c1_ = rng.next_below(par_.p_h);
    sp_c0_.resize(par_.t);
    sp_c1_.resize(par_.t);
    for (u32 j = 0; j < par_.t; ++j) {
      sp_c0_[j] = rng.next_below(par_.p_s);
      sp_c1_[j] = rng.next_below(par_.p_s);
    }
    zs_.assign(2 * (std::size_t)par_.t, 0);
  }

  u64 n() const { return par_.n; }
  u64 pad_target() const { return par_.a_int; }
  u32 q() const { return q_; }
  u64 seed() const { return seed_; }
  u32 splits() const { return par_.t; }

  bool in_h(u64 v) const {
    if (v >= par_.domain)
      throw std::out_of_range("index recovery: coordinate out of range");
    return pairwise_eval(h_c0_, h_c1_, v, pm_h_) % par_.range ==
           detail::kMemberResidue;
  }

  void feed_index(u64 v, i64 delta) {
    if (v >= par_.n)
      throw std::out_of_range("index recovery: coordinate out of range");
    u32 dm = mod_q(delta);
    if (dm == 0) return;
    if (!in_h(v)) return;
    add_to(z_, dm);
    for (u32 j = 0; j < par_.t; ++j) {
      u64 b = pairwise_eval(sp_c0_[j], sp_c1_[j], v, pm_s_) & 1;
      add_to(zs_[2 * j + b], dm);
    }
  }

  // T must hold distinct coordinates < n; |T| <= ceil(a).
  IndexRecoveryResult recover(const std::vector<u64>& t_set) const {
    if (t_set.size() > par_.a_int)
      throw std::invalid_argument("index recovery: |T| exceeds a");
    u64 hits = 0, who = 0;
    for (u64 v : t_set) {
      if (v >= par_.n)
        throw std::out_of_range("index recovery: T coordinate out of range");
      if (in_h(v)) {
        ++hits;
        who = v;
        if (hits > 1) return {};
      }
    }
    for (u64 d = 0; hits <= 1 && d + t_set.size() < par_.a_int; ++d) {
      if (in_h(par_.n + d)) {
        ++hits;
        who = par_.n + d;
      }
    }
    if (hits != 1) return {};
    for (u32 j = 0; j < par_.t; ++j)
      if (zs_[2 * j] != 0 && zs_[2 * j + 1] != 0) return {};
    return {true, who, z_};
  }

  void merge(const IndexRecovery& o) {
    if (!same_shape(o))
      throw std::invalid_argument("index recovery: merge shape mismatch");
    add_to(z_, o.z_);
    for (std::size_t i = 0; i < zs_.size(); ++i) add_to(zs_[i], o.zs_[i]);
  }

  bool state_equal(const IndexRecovery& o) const {
    return same_shape(o) && z_ == o.z_ && zs_ == o.zs_;
  }

  BitMeter measure() const {
    BitMeter bm;
    bm.sketch_bits = (1 + 2 * (u64)par_.t) * bits_for(q_);
    bm.randomness_bits =
        2 * bits_for(par_.p_h) + 2 * (u64)par_.t * bits_for(par_.p_s) + 64;
    return bm;
  }

 private:
  bool same_shape(const IndexRecovery& o) const {
    return par_.n == o.par_.n && par_.a_int == o.par_.a_int &&
           par_.range == o.par_.range && par_.t == o.par_.t && q_ == o.q_ &&
           seed_ == o.seed_;
  }

  u32 mod_q(i64 delta) const {
    i64 r = delta % (i64)q_;
    if (r < 0) r += q_;
    return (u32)r;
  }

  void add_to(u32& slot, u32 dm) const {
    slot += dm;
    if (slot >= q_) slot -= q_;
  }

  detail::IrParams par_;
  u32 q_;
  u64 seed_;
  SmallMod pm_h_, pm_s_;
  u64 h_c0_ = 0, h_c1_ = 0;
  std::vector<u64> sp_c0_, sp_c1_;
  u32 z_ = 0;
  std::vector<u32> zs_;
};

struct PartialRecoveryResult {
  std::vector<std::pair<u64, u32>> recovered;  // real coordinates, sorted
  std::vector<u64> t_y;                        // T minus recovered coordinates
  u64 successes = 0;                           // includes pad-coordinate hits
};

// A battery of ceil(5 a ln 8) index-recovery sketches with shared (a, gamma).
// Copy i reproduces IndexRecovery(n, a, gamma, q, derive_seed(seed, 0x7063,
// i)) exactly, but membership is stored inverted: for each coordinate v, the
// list of copies whose H contains v (found by solving the affine hash for the
// marked residues, O(p/range) per copy instead of O(n)).
class PartialRecovery {
 public:
  static u64 battery_size(double a) {
    return (u64)std::ceil(5.0 * a * std::log(8.0));
  }

  PartialRecovery(u64 n, double a, double gamma, u32 q, u64 seed)
      : par_(n, a, gamma), q_(q), seed_(seed) {
    if (q_ < 2 || !is_prime(q_))
      throw std::invalid_argument("partial recovery: q must be prime");
    t_p_ = battery_size(a);
    if (!((double)t_p_ < 12.0 * a))
      throw std::logic_error("partial recovery: battery larger than 12a");
    SmallMod pm_h(par_.p_h), pm_s(par_.p_s);

    std::vector<std::pair<u64, u32>> members;  // (coordinate, copy)
    sp_c0_.resize((std::size_t)t_p_ * par_.t);
    sp_c1_.resize((std::size_t)t_p_ * par_.t);
    for (u64 i = 0; i < t_p_; ++i) {
      Rng rng(derive_seed(derive_seed(seed_, 0x7063u, i), 0x6972u));
      u64 c0 = rng.next_below(par_.p_h);
      u64 c1 = rng.next_below(par_.p_h);
      for (u32 j = 0; j < par_.t; ++j) {
        sp_c0_[i * par_.t + j] = rng.next_below(par_.p_s);
        sp_c1_[i * par_.t + j] = rng.next_below(par_.p_s);
      }
      if (c1 == 0) {
        // degenerate hash: H is everything or nothing
        if (c0 % par_.range == detail::kMemberResidue)
          for (u64 v = 0; v < par_.domain; ++v) members.push_back({v, (u32)i});
        continue;
      }
      u64 inv = powmod(c1, par_.p_h - 2, par_.p_h);
      for (u64 hv = detail::kMemberResidue; hv < par_.p_h; hv += par_.range) {
        u64 v = mulmod(submod(hv, c0, par_.p_h), inv, par_.p_h);
        if (v < par_.domain) members.push_back({v, (u32)i});
      }
    }

    // CSR keyed by coordinate; the split buckets of each membership are
    // precomputed into a bitmask.
    offsets_.assign(par_.domain + 1, 0);
    for (auto& mv : members) ++offsets_[mv.first + 1];
    for (u64 v = 0; v < par_.domain; ++v) offsets_[v + 1] += offsets_[v];
    entries_.resize(members.size());
    {
      std::vector<u32> cursor(offsets_.begin(), offsets_.end() - 1);
      for (auto& mv : members) {
        u32 mask = 0;
        for (u32 j = 0; j < par_.t; ++j) {
          u64 b = pairwise_eval(sp_c0_[mv.second * par_.t + j],
                                sp_c1_[mv.second * par_.t + j], mv.first, pm_s) &
                  1;
          mask |= (u32)b << j;
        }
        entries_[cursor[mv.first]++] = {mv.second, mask};
      }
    }
    z_.assign(t_p_, 0);
    zs_.assign((std::size_t)t_p_ * 2 * par_.t, 0);
  }

  u64 n() const { return par_.n; }
  u64 battery() const { return t_p_; }
  u64 pad_target() const { return par_.a_int; }
  u32 q() const { return q_; }
  u64 seed() const { return seed_; }

  void feed_index(u64 v, i64 delta) {
    if (v >= par_.n)
      throw std::out_of_range("partial recovery: coordinate out of range");
    i64 r = delta % (i64)q_;
    if (r < 0) r += q_;
    u32 dm = (u32)r;
    if (dm == 0) return;
    for (u32 e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      const Entry& en = entries_[e];
      add_to(z_[en.copy], dm);
      u32* base = zs_.data() + (std::size_t)en.copy * 2 * par_.t;
      for (u32 j = 0; j < par_.t; ++j) add_to(base[2 * j + ((en.mask >> j) & 1)], dm);
    }
  }

  // All copies are queried against the same padded T; every success writes
  // its coordinate's value (exact when the copy did not err) and drops the
  // coordinate from T. Pad-coordinate successes are counted but carry no
  // value. Queries of the same coordinate are idempotent within one call.
  PartialRecoveryResult partial_recover(const std::vector<u64>& t_in) const {
    std::vector<u64> t(t_in);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (t.size() > par_.a_int)
      throw std::invalid_argument("partial recovery: |T| exceeds a");
    if (!t.empty() && t.back() >= par_.n)
      throw std::out_of_range("partial recovery: T coordinate out of range");

    std::vector<u8> cnt(t_p_, 0);
    std::vector<u64> cand(t_p_, 0);
    auto tally = [&](u64 v) {
      for (u32 e = offsets_[v]; e < offsets_[v + 1]; ++e) {
        u32 c = entries_[e].copy;
        if (cnt[c] < 2) ++cnt[c];
        cand[c] = v;
      }
    };
    for (u64 v : t) tally(v);
    for (u64 d = 0; d + t.size() < par_.a_int; ++d) tally(par_.n + d);

    PartialRecoveryResult out;
    std::vector<u8> removed(t.size(), 0);
    std::vector<std::pair<u64, u32>> rec;
    for (u64 i = 0; i < t_p_; ++i) {
      if (cnt[i] != 1) continue;
      const u32* base = zs_.data() + (std::size_t)i * 2 * par_.t;
      bool bad = false;
      for (u32 j = 0; j < par_.t && !bad; ++j)
        bad = base[2 * j] != 0 && base[2 * j + 1] != 0;
      if (bad) continue;
      ++out.successes;
      if (cand[i] < par_.n) rec.push_back({cand[i], z_[i]});
    }
    std::sort(rec.begin(), rec.end());
    rec.erase(std::unique(rec.begin(), rec.end(),
                          [](auto& a, auto& b) { return a.first == b.first; }),
              rec.end());
    out.recovered = std::move(rec);
    std::size_t k = 0;
    for (u64 v : t) {
      while (k < out.recovered.size() && out.recovered[k].first < v) ++k;
      if (k < out.recovered.size() && out.recovered[k].first == v) continue;
      out.t_y.push_back(v);
    }
    return out;
  }

  void merge(const PartialRecovery& o) {
    if (!same_shape(o))
      throw std::invalid_argument("partial recovery: merge shape mismatch");
    for (std::size_t i = 0; i < z_.size(); ++i) add_to(z_[i], o.z_[i]);
    for (std::size_t i = 0; i < zs_.size(); ++i) add_to(zs_[i], o.zs_[i]);
  }

  bool state_equal(const PartialRecovery& o) const {
    return same_shape(o) && z_ == o.z_ && zs_ == o.zs_;
  }

  BitMeter measure() const {
    BitMeter bm;
    bm.sketch_bits = t_p_ * (1 + 2 * (u64)par_.t) * bits_for(q_);
    bm.randomness_bits =
        t_p_ *
        (2 * bits_for(par_.p_h) + 2 * (u64)par_.t * bits_for(par_.p_s) + 64);
    return bm;
  }

 private:
  struct Entry {
    u32 copy = 0;
    u32 mask = 0;
  };

  bool same_shape(const PartialRecovery& o) const {
    return par_.n == o.par_.n && par_.a_int == o.par_.a_int &&
           par_.range == o.par_.range && par_.t == o.par_.t && q_ == o.q_ &&
           seed_ == o.seed_ && t_p_ == o.t_p_;
  }

  void add_to(u32& slot, u32 dm) const {
    slot += dm;
    if (slot >= q_) slot -= q_;
  }

  detail::IrParams par_;
  u32 q_;
  u64 seed_;
  u64 t_p_ = 0;
  std::vector<u64> sp_c0_, sp_c1_;
  std::vector<u32> offsets_;
  std::vector<Entry> entries_;
  std::vector<u32> z_;
  std::vector<u32> zs_;
};

}  // namespace gsketch
