#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gsketch/index_recovery.hpp"
#include "gsketch/prime.hpp"
#include "gsketch/sparse_recovery.hpp"
#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

// Sparse-neighborhood recovery. The neighborhood vector of S (coordinates
// counted mod q, q the first prime past the per-vertex budget c) is pushed
// through a cascade of partial-recovery batteries whose per-level budgets
// follow the halving/quartering schedule below, then the remaining residual
// is decoded exactly by a syndrome sketch sized for the final level's budget.
// Recovery against a candidate set T walks the levels, re-sketching the
// already-recovered part by linearity, and reassembles the vector.

namespace gsketch {

struct SnrSchedule {
  u32 depth = 0;              // partial-recovery levels actually deployed
  std::vector<double> gamma;  // [j] = level j+1 failure budget
  std::vector<double> a;      // [j] = level j+1 candidate budget (real)
  std::vector<double> b;      // [j] = level j+1 outside budget (real)
  std::vector<u64> battery;   // [j] = level j+1 battery size
  u64 phi_capacity = 0;       // sparsity budget of the final decoder

  // gamma_1 = 1/24 halving, a_1 = a quartering, b growing by the recurrence
  // b_{j+1} = b_j + 12(gamma_j b_j + b_j^2 / a_j). Depth is capped by
  // ceil(log2 log2 n) and by the last level still satisfying a_j >= 100 b_j.
  static SnrSchedule compute(u64 n, u64 a0, u64 b0) {
    if (n < 2) throw std::invalid_argument("snr schedule: need n >= 2");
    if (a0 == 0 || b0 == 0)
      throw std::invalid_argument("snr schedule: budgets must be positive");
    SnrSchedule s;
    double l2 = std::log2((double)n);
    u64 jmax = l2 > 1.0 ? (u64)std::ceil(std::log2(l2)) : 0;
    double g = 1.0 / 24.0, a = (double)a0, b = (double)b0;
    for (u64 j = 1; j <= jmax; ++j) {
      if (!(a >= 100.0 * b)) break;
      s.gamma.push_back(g);
      s.a.push_back(a);
      s.b.push_back(b);
      s.battery.push_back(PartialRecovery::battery_size(a));
      b = b + 12.0 * (g * b + b * b / a);
      a = a / 4.0;
      g = g / 2.0;
      ++s.depth;
    }
    if (s.depth > 0) {
      double bt = s.b.back();
      double e2 = std::exp(2.0);
      if (!(bt <= e2 * (double)b0))
        throw std::logic_error("snr schedule: outside budget outgrew e^2 b");
      s.phi_capacity = (u64)std::ceil(s.a.back()) + (u64)std::ceil(bt);
    } else {
      s.phi_capacity = a0 + b0;
    }
    return s;
  }
};

enum class SnrStatus { Ok, RecoveryFailed };

struct SnrLevelTrace {
  u64 t_in = 0;
  u64 successes = 0;
  u64 recovered = 0;
  u64 t_out = 0;
  std::vector<std::pair<u64, u32>> entries;  // level's additions to y
};

struct SnrTrace {
  std::vector<SnrLevelTrace> levels;
  bool levels_skipped = false;  // a level's T outgrew its budget, cascade cut
  std::vector<std::pair<u64, u64>> final_entries;  // decoder output (residual)
};

struct SnrResult {
  SnrStatus status = SnrStatus::Ok;
  std::vector<u32> outside;  // recovered N(S) - T, sorted
  SnrTrace trace;
};

class SNRecoverySketch {
 public:
  SNRecoverySketch(u32 n, std::vector<u32> s, u64 a, u64 b, u64 c, u64 seed,
                   std::string group = "")
      : n_(n), a_(a), b_(b), c_(c), seed_(seed), group_(std::move(group)),
        s_(std::move(s)) {
    if (c_ == 0) throw std::invalid_argument("snr: c must be positive");
    q_ = (u32)smallest_prime_gt(c_);
    if (s_.empty()) throw std::invalid_argument("snr: S is empty");
    std::sort(s_.begin(), s_.end());
    s_.erase(std::unique(s_.begin(), s_.end()), s_.end());
    if (s_.back() >= n_) throw std::invalid_argument("snr: S vertex out of range");
    in_s_.assign(n_, 0);
    for (u32 v : s_) in_s_[v] = 1;
    sched_ = SnrSchedule::compute(n_, a_, b_);
    levels_.reserve(sched_.depth);
    for (u32 j = 0; j < sched_.depth; ++j)
      levels_.emplace_back(n_, sched_.a[j], sched_.gamma[j], q_,
                           derive_seed(seed_, 0x736cu, j + 1));
    phi_.emplace(n_, sched_.phi_capacity, q_);
  }

  u32 n() const { return n_; }
  u32 q() const { return q_; }
  u64 bound_a() const { return a_; }
  u64 bound_b() const { return b_; }
  u64 seed() const { return seed_; }
  const std::string& group() const { return group_; }
  const SnrSchedule& schedule() const { return sched_; }
  const std::vector<u32>& s_set() const { return s_; }

  void feed(const StreamUpdate& up) {
    bool su = in_s_[up.u] != 0, sv = in_s_[up.v] != 0;
    if (su == sv) return;
    feed_index(su ? up.v : up.u, up.delta);
  }

  void feed_index(u64 w, i64 delta) {
    for (auto& lvl : levels_) lvl.feed_index(w, delta);
    phi_->feed_index(w, delta);
  }

  SnrResult recover(const std::vector<u32>& t_raw) const {
    std::vector<u64> t_cur(t_raw.begin(), t_raw.end());
    std::sort(t_cur.begin(), t_cur.end());
    t_cur.erase(std::unique(t_cur.begin(), t_cur.end()), t_cur.end());
    if (t_cur.size() > a_) throw std::invalid_argument("snr: |T| exceeds a");
    if (!t_cur.empty() && t_cur.back() >= n_)
      throw std::invalid_argument("snr: T vertex out of range");
    std::vector<u8> in_t(n_, 0);
    for (u64 v : t_cur) in_t[v] = 1;

    SnrResult out;
    std::map<u64, u32> y;
    for (u32 j = 0; j < sched_.depth; ++j) {
      if (t_cur.size() > levels_[j].pad_target()) {
        // the cascade fell behind its budget; the final decoder still holds
        // the conservative level-1 capacity, so cut over to it directly
        out.trace.levels_skipped = true;
        break;
      }
      PartialRecovery probe = levels_[j];
      for (auto& [i, val] : y)
        if (val) probe.feed_index(i, -(i64)val);
      PartialRecoveryResult pres = probe.partial_recover(t_cur);
      SnrLevelTrace lt;
      lt.t_in = t_cur.size();
      lt.successes = pres.successes;
      lt.recovered = pres.recovered.size();
      lt.t_out = pres.t_y.size();
      lt.entries = pres.recovered;
      out.trace.levels.push_back(std::move(lt));
      for (auto& [i, val] : pres.recovered) {
        u32 nv = (y[i] + val) % q_;
        y[i] = nv;
      }
      t_cur = std::move(pres.t_y);
    }

    FqSparseRecovery probe = *phi_;
    for (auto& [i, val] : y)
      if (val) probe.feed_index(i, -(i64)val);
    SparseDecodeResult dec = probe.decode();
    if (!dec.ok()) {
      out.status = SnrStatus::RecoveryFailed;
      return out;
    }
    out.trace.final_entries = dec.entries;

    std::map<u64, u32> xhat = y;
    for (auto& [idx, val] : dec.entries)
      xhat[idx] = (xhat[idx] + (u32)val) % q_;
    for (auto& [idx, val] : xhat)
      if (val != 0 && !in_t[idx]) out.outside.push_back((u32)idx);
    return out;
  }

  void merge(const SNRecoverySketch& o) {
    if (!same_shape(o)) throw std::invalid_argument("snr: merge shape mismatch");
    for (u32 j = 0; j < sched_.depth; ++j) levels_[j].merge(o.levels_[j]);
    phi_->merge(*o.phi_);
  }

  bool state_equal(const SNRecoverySketch& o) const {
    if (!same_shape(o)) return false;
    for (u32 j = 0; j < sched_.depth; ++j)
      if (!levels_[j].state_equal(o.levels_[j])) return false;
    return phi_->state_equal(*o.phi_);
  }

  BitMeter measure() const {
    BitMeter bm;
    u64 rand = 0;
    for (const auto& lvl : levels_) {
      BitMeter m = lvl.measure();
      bm.sketch_bits += m.sketch_bits;
      rand += m.randomness_bits;
    }
    bm.sketch_bits += phi_->measure().sketch_bits;
    if (group_.empty())
      bm.randomness_bits = rand;
    else
      bm.shared["snr-randomness/" + group_] = rand;
    return bm;
  }

 private:
  bool same_shape(const SNRecoverySketch& o) const {
    return n_ == o.n_ && a_ == o.a_ && b_ == o.b_ && c_ == o.c_ &&
           seed_ == o.seed_ && s_ == o.s_;
  }

  u32 n_;
  u64 a_, b_, c_;
  u64 seed_;
  std::string group_;
  std::vector<u32> s_;
  std::vector<u8> in_s_;
  u32 q_ = 0;
  SnrSchedule sched_;
  std::vector<PartialRecovery> levels_;
  std::optional<FqSparseRecovery> phi_;
};

}  // namespace gsketch
