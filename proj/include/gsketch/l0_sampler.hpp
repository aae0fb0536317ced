#pragma once

// L0 sampling over a vector x in Z^m maintained under signed updates.
// Returns a (index, value) pair with the index near-uniform over the support
// of x, EMPTY when x = 0, FAIL with probability <= delta_f otherwise.
//
// Construction: r = ceil(log2(1/delta_f)) independent repetitions. Each
// repetition draws one pairwise hash into [2^L], L = ceil(log2 m); index j
// belongs to level l iff hash(j) < 2^(L-l), so level l subsamples at rate
// 2^-l and the levels of one repetition nest. Each (repetition, level) cell
// carries a one-sparse detector: count, index-weighted sum, and F Mersenne
// fingerprints whose width drives the false-accept rate delta_e. The query
// scans repetitions in order and inside each repetition the levels from 0
// up, returning the first cell whose detector certifies a singleton.
//
// Detector cells allocate on first touch; untouched cells read zero. Seeds
// for every repetition derive from the sketch seed, so state never depends
// on allocation order and same-seed sketches merge coordinate-wise.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gsketch/bit_meter.hpp"
#include "gsketch/fingerprint.hpp"
#include "gsketch/hash.hpp"
#include "gsketch/prime.hpp"
#include "gsketch/util.hpp"

namespace gsketch {

struct L0Result {
  enum class Kind { Sample, Empty, Fail } kind = Kind::Empty;
  u64 index = 0;
  i64 value = 0;
};

class L0Sampler {
 public:
  struct Shape {
    u32 levels;
    u32 reps;
    u32 fcount;
    u64 hash_p;
  };

  static Shape shape_for(u64 m, double delta_f, double delta_e) {
    Shape s;
    s.levels = bits_for(m) + 1;
    s.reps = static_cast<u32>(std::max(1.0, std::ceil(std::log2(1.0 / delta_f))));
    s.fcount = FingerprintBasis::points_for(m, delta_e);
    s.hash_p = smallest_prime_gt(std::max(m, u64(1) << (s.levels - 1)));
    return s;
  }

  // Declared sketch size by shape alone; matches measure() on an instance.
  static u64 declared_sketch_bits(u64 m, double delta_f, double delta_e) {
    Shape s = shape_for(m, delta_f, delta_e);
    u64 cw = bits_for(m) + 1;
    u64 ww = 2 * bits_for(m) + 1;
    return u64(s.reps) * s.levels * (cw + ww + u64(s.fcount) * 61);
  }

  static u64 declared_randomness_bits(u64 m, double delta_f, double delta_e) {
    Shape s = shape_for(m, delta_f, delta_e);
    return u64(s.reps) * 2 * bits_for(s.hash_p) + 64;
  }

  L0Sampler(u64 m, double delta_f, double delta_e, u64 seed)
      : m_(m), delta_f_(delta_f), delta_e_(delta_e), seed_(seed), basis_(FingerprintBasis::get(m)) {
    if (m < 1 || m > (1ull << 24)) throw std::invalid_argument("L0Sampler: domain out of range");
    Shape s = shape_for(m, delta_f, delta_e);
    levels_ = s.levels;
    reps_ = s.reps;
    fcount_ = s.fcount;
    range_bits_ = levels_ - 1;  // hash range 2^L, L = ceil(log2 m)
    hash_p_ = SmallMod(s.hash_p);
    rep_c0_.resize(reps_);
    rep_c1_.resize(reps_);
    for (u32 r = 0; r < reps_; ++r) {
      Rng rng(derive_seed(seed_, 0x4c30u, r));
      rep_c0_[r] = rng.next_below(hash_p_.p);
      rep_c1_[r] = rng.next_below(hash_p_.p);
    }
  }

  u64 domain() const { return m_; }
  u32 repetitions() const { return reps_; }
  u32 levels() const { return levels_; }
  u32 fingerprints() const { return fcount_; }
  u64 seed() const { return seed_; }

  void feed_index(u64 j, i64 delta) {
    if (delta == 0) return;
    assert(j < m_);
    touch();
    // each fingerprint accumulates delta * z^j mod the Mersenne prime;
    // scale the point powers up front (deltas are almost always +-1)
    u64 pw[FingerprintBasis::kMaxPoints];
    if (delta == 1 || delta == -1) {
      for (u32 f = 0; f < fcount_; ++f) pw[f] = basis_->power(f, j);
    } else {
      u64 dm = delta > 0 ? static_cast<u64>(delta) % kMersenne61
                         : kMersenne61 - static_cast<u64>(-delta) % kMersenne61;
      for (u32 f = 0; f < fcount_; ++f) pw[f] = mul_m61(dm, basis_->power(f, j));
    }
    bool subtract = delta == -1;
    u64 mask = (u64(1) << range_bits_) - 1;
    for (u32 r = 0; r < reps_; ++r) {
      u64 hval = pairwise_eval(rep_c0_[r], rep_c1_[r], j, hash_p_) & mask;
      // member of levels 0..depth-1 (hval = 0 reaches the deepest level)
      u32 depth = hval == 0 ? levels_ : range_bits_ - floor_log2(hval);
      Cell* base = cells_.data() + std::size_t(r) * levels_;
      for (u32 l = 0; l < depth; ++l) {
        Cell& c = base[l];
        c.count += delta;
        c.weighted += delta * static_cast<i64>(j);
        if (subtract) {
          for (u32 f = 0; f < fcount_; ++f) c.fp[f] = sub_m61(c.fp[f], pw[f]);
        } else {
          for (u32 f = 0; f < fcount_; ++f) c.fp[f] = add_m61(c.fp[f], pw[f]);
        }
      }
    }
  }

  void merge(const L0Sampler& o) {
    if (m_ != o.m_ || seed_ != o.seed_ || reps_ != o.reps_ || fcount_ != o.fcount_)
      throw std::invalid_argument("L0Sampler::merge: incompatible sketches");
    if (o.cells_.empty()) return;
    touch();
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      cells_[i].count += o.cells_[i].count;
      cells_[i].weighted += o.cells_[i].weighted;
      for (u32 f = 0; f < fcount_; ++f) cells_[i].fp[f] = add_m61(cells_[i].fp[f], o.cells_[i].fp[f]);
    }
  }

  L0Result query() const {
    if (cells_.empty()) return {L0Result::Kind::Empty, 0, 0};
    bool any_nonzero = false;
    std::optional<L0Result> hit;
    for (u32 r = 0; r < reps_ && !hit; ++r) {
      const Cell* base = cells_.data() + std::size_t(r) * levels_;
      for (u32 l = 0; l < levels_; ++l) {
        const Cell& c = base[l];
        if (c.is_zero(fcount_)) continue;
        any_nonzero = true;
        if (auto s = c.singleton(fcount_, m_, *basis_)) {
          hit = L0Result{L0Result::Kind::Sample, s->first, s->second};
          break;
        }
      }
    }
    if (hit) return *hit;
    // Level-0 cells see the whole domain, so a zero sketch means x = 0.
    if (!any_nonzero) return {L0Result::Kind::Empty, 0, 0};
    return {L0Result::Kind::Fail, 0, 0};
  }

  BitMeter measure() const {
    // Widths: counts are bounded by the stream length, charged at
    // ceil(log2 m)+1 bits; weighted sums add an index factor; fingerprints
    // are 61-bit field elements. Randomness: one pairwise hash per
    // repetition, the shared evaluation points, and the 64-bit seed.
    BitMeter bm;
    u64 cw = bits_for(m_) + 1;
    u64 ww = 2 * bits_for(m_) + 1;
    bm.sketch_bits = u64(reps_) * levels_ * (cw + ww + u64(fcount_) * 61);
    bm.randomness_bits = u64(reps_) * 2 * bits_for(hash_p_.p) + 64;
    bm.shared["fingerprint-basis/" + std::to_string(m_)] = u64(fcount_) * 61;
    return bm;
  }

  bool is_zero() const {
    for (const auto& c : cells_)
      if (!c.is_zero(fcount_)) return false;
    return true;
  }

  bool state_equal(const L0Sampler& o) const {
    if (m_ != o.m_ || seed_ != o.seed_) return false;
    auto zero_all = [&](const L0Sampler& s) {
      for (const auto& c : s.cells_)
        if (!c.is_zero(s.fcount_)) return false;
      return true;
    };
    if (cells_.empty() || o.cells_.empty()) return zero_all(*this) && zero_all(o);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (cells_[i].count != o.cells_[i].count) return false;
      if (cells_[i].weighted != o.cells_[i].weighted) return false;
      for (u32 f = 0; f < fcount_; ++f)
        if (cells_[i].fp[f] != o.cells_[i].fp[f]) return false;
    }
    return true;
  }

 private:
  struct Cell {
    i64 count = 0;
    i64 weighted = 0;
    u64 fp[FingerprintBasis::kMaxPoints] = {0, 0, 0, 0, 0, 0};

    bool is_zero(u32 fcount) const {
      if (count != 0 || weighted != 0) return false;
      for (u32 f = 0; f < fcount; ++f)
        if (fp[f] != 0) return false;
      return true;
    }

    // Certifies x restricted to this cell is exactly {j: value}; returns it.
    std::optional<std::pair<u64, i64>> singleton(u32 fcount, u64 m,
                                                 const FingerprintBasis& basis) const {
      if (count == 0) return std::nullopt;
      if (weighted % count != 0) return std::nullopt;
      i64 j = weighted / count;
      if (j < 0 || static_cast<u64>(j) >= m) return std::nullopt;
      u64 cnt_mod = count >= 0 ? static_cast<u64>(count) % kMersenne61
                               : kMersenne61 - (static_cast<u64>(-count) % kMersenne61);
      for (u32 f = 0; f < fcount; ++f) {
        u64 expect = mul_m61(cnt_mod, basis.power(f, static_cast<u64>(j)));
        if (expect != fp[f]) return std::nullopt;
      }
      return std::make_pair(static_cast<u64>(j), count);
    }
  };

  void touch() {
    if (cells_.empty()) cells_.resize(std::size_t(reps_) * levels_);
  }

  u64 m_;
  double delta_f_;
  double delta_e_;
  u64 seed_;
  u32 levels_;
  u32 reps_;
  u32 fcount_;
  u32 range_bits_ = 0;
  SmallMod hash_p_;
  std::vector<u64> rep_c0_, rep_c1_;
  std::vector<Cell> cells_;  // reps x levels, row-major, lazy
  std::shared_ptr<const FingerprintBasis> basis_;
};

}  // namespace gsketch
