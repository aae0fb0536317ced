#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gsketch/bit_meter.hpp"
#include "gsketch/prime.hpp"
#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

// Brute-force counterpart of the sparse-neighborhood sketch, used as a
// verification oracle at tiny scale. It stores s_eq random mod-q inner
// products of the neighborhood vector (rows expanded on the fly from the
// seed) and recovers by enumerating every vector consistent with the
// promises: arbitrary mod-q values on T plus at most b coordinates outside
// S and T holding values in [1, c). Rather than walking the q^|T| value
// grid, each candidate support is resolved through the linear system its
// products must satisfy; the solution set is identical and the work bound
// stays explicit.

namespace gsketch {

struct ExhaustiveResult {
  enum class Status { Ok, NoCandidate, WorkBoundExceeded } status =
      Status::NoCandidate;
  std::vector<u32> outside;  // outside support of the first matching candidate
  u64 candidates = 0;        // matching candidates found (1 expected)
};

class ExhaustiveSNR {
 public:
  static u64 equation_count(u64 n, u64 a, u64 b, u32 q) {
    double lq = std::log2((double)q), ln = std::log2((double)n);
    double bits = (double)a * (1.0 + lq) + (double)b * (ln + lq) + 10.0 * ln;
    return (u64)std::ceil(2.0 * bits / lq);
  }

  ExhaustiveSNR(u32 n, std::vector<u32> s, u64 a, u64 b, u64 c, u64 seed)
      : n_(n), a_(a), b_(b), c_(c), seed_(seed), s_(std::move(s)) {
    if (c_ == 0) throw std::invalid_argument("exhaustive snr: c must be positive");
    q_ = (u32)smallest_prime_gt(c_);
    if (s_.empty()) throw std::invalid_argument("exhaustive snr: S is empty");
    std::sort(s_.begin(), s_.end());
    s_.erase(std::unique(s_.begin(), s_.end()), s_.end());
    if (s_.back() >= n_)
      throw std::invalid_argument("exhaustive snr: S vertex out of range");
    in_s_.assign(n_, 0);
    for (u32 v : s_) in_s_[v] = 1;
    s_eq_ = equation_count(n_, a_, b_, q_);
    z_.assign(s_eq_, 0);
  }

  u32 n() const { return n_; }
  u32 q() const { return q_; }
  u64 equations() const { return s_eq_; }
  u64 seed() const { return seed_; }
  const std::vector<u32>& products() const { return z_; }

  void feed(const StreamUpdate& up) {
    bool su = in_s_[up.u] != 0, sv = in_s_[up.v] != 0;
    if (su == sv) return;
    feed_index(su ? up.v : up.u, up.delta);
  }

  void feed_index(u64 v, i64 delta) {
    if (v >= n_) throw std::out_of_range("exhaustive snr: coordinate out of range");
    i64 r = delta % (i64)q_;
    if (r < 0) r += q_;
    if (r == 0) return;
    for (u64 i = 0; i < s_eq_; ++i) {
      z_[i] = (u32)((z_[i] + (u64)r * row(i, v)) % q_);
    }
  }

  ExhaustiveResult recover(const std::vector<u32>& t_raw) const {
    std::vector<u32> t(t_raw);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (t.size() > a_)
      throw std::invalid_argument("exhaustive snr: |T| exceeds a");
    if (!t.empty() && t.back() >= n_)
      throw std::invalid_argument("exhaustive snr: T vertex out of range");
    std::vector<u8> in_t(n_, 0);
    for (u32 v : t) in_t[v] = 1;
    std::vector<u32> u_pool;
    for (u32 v = 0; v < n_; ++v)
      if (!in_s_[v] && !in_t[v]) u_pool.push_back(v);

    ExhaustiveResult out;
    u64 work = 0;
    std::vector<u32> combo;
    // supports in lexicographic order by size then members
    if (!try_supports(t, u_pool, combo, 0, work, out)) {
      out.status = ExhaustiveResult::Status::WorkBoundExceeded;
      out.outside.clear();
      out.candidates = 0;
      return out;
    }
    if (out.candidates > 0) out.status = ExhaustiveResult::Status::Ok;
    return out;
  }

  void merge(const ExhaustiveSNR& o) {
    if (!same_shape(o))
      throw std::invalid_argument("exhaustive snr: merge shape mismatch");
    for (u64 i = 0; i < s_eq_; ++i) z_[i] = (z_[i] + o.z_[i]) % q_;
  }

  bool state_equal(const ExhaustiveSNR& o) const {
    return same_shape(o) && z_ == o.z_;
  }

  BitMeter measure() const {
    BitMeter bm;
    bm.sketch_bits = s_eq_ * bits_for(q_);
    bm.randomness_bits = 64;  // rows are expanded from the seed on demand
    return bm;
  }

 private:
  static constexpr u64 kWorkBound = 50'000'000;

  bool same_shape(const ExhaustiveSNR& o) const {
    return n_ == o.n_ && a_ == o.a_ && b_ == o.b_ && c_ == o.c_ &&
           seed_ == o.seed_ && s_ == o.s_;
  }

  u32 row(u64 i, u64 v) const {
    return (u32)(derive_seed(seed_, 0x7872u, i, v) % q_);
  }

  // recursive enumeration of outside supports of size <= b
  bool try_supports(const std::vector<u32>& t, const std::vector<u32>& pool,
                    std::vector<u32>& combo, std::size_t from, u64& work,
                    ExhaustiveResult& out) const {
    if (!solve_support(t, combo, work, out)) return false;
    if (combo.size() == b_ || c_ < 2) return true;  // c < 2 forbids outside mass
    for (std::size_t k = from; k < pool.size(); ++k) {
      combo.push_back(pool[k]);
      if (!try_supports(t, pool, combo, k + 1, work, out)) return false;
      combo.pop_back();
    }
    return true;
  }

  // Solve for the values on T union O given the stored products; count every
  // promise-shaped solution and keep the first support that produced one.
  bool solve_support(const std::vector<u32>& t, const std::vector<u32>& o_set,
                     u64& work, ExhaustiveResult& out) const {
    std::vector<u32> cols(t.begin(), t.end());
    cols.insert(cols.end(), o_set.begin(), o_set.end());
    std::size_t k = cols.size();
    work += s_eq_ * (k + 1);
    if (work > kWorkBound) return false;

    std::vector<std::vector<u32>> m(s_eq_, std::vector<u32>(k + 1));
    for (u64 i = 0; i < s_eq_; ++i) {
      for (std::size_t j = 0; j < k; ++j) m[i][j] = row(i, cols[j]);
      m[i][k] = z_[i];
    }

    // reduced row echelon over F_q
    std::vector<std::size_t> pivot_col;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < k && rank < m.size(); ++col) {
      std::size_t pr = rank;
      while (pr < m.size() && m[pr][col] == 0) ++pr;
      if (pr == m.size()) continue;
      std::swap(m[rank], m[pr]);
      u64 inv = powmod(m[rank][col], q_ - 2, q_);
      for (std::size_t j = col; j <= k; ++j)
        m[rank][j] = (u32)(m[rank][j] * inv % q_);
      for (std::size_t r = 0; r < m.size(); ++r) {
        if (r == rank || m[r][col] == 0) continue;
        u64 f = m[r][col];
        for (std::size_t j = col; j <= k; ++j)
          m[r][j] = (u32)((m[r][j] + (q_ - f) * m[rank][j]) % q_);
      }
      pivot_col.push_back(col);
      ++rank;
      work += m.size() * (k + 1 - col);
      if (work > kWorkBound) return false;
    }
    for (std::size_t r = rank; r < m.size(); ++r)
      if (m[r][k] != 0) return true;  // inconsistent, no solution here

    std::vector<std::size_t> free_col;
    {
      std::size_t pi = 0;
      for (std::size_t col = 0; col < k; ++col) {
        if (pi < pivot_col.size() && pivot_col[pi] == col)
          ++pi;
        else
          free_col.push_back(col);
      }
    }
    double combos = std::pow((double)q_, (double)free_col.size());
    if (combos > 100000.0 || work + (u64)combos * (k + 1) > kWorkBound)
      return false;

    std::vector<u32> val(k, 0), freev(free_col.size(), 0);
    for (;;) {
      work += k + 1;
      for (std::size_t f = 0; f < free_col.size(); ++f)
        val[free_col[f]] = freev[f];
      for (std::size_t r = 0; r < rank; ++r) {
        u64 acc = m[r][k];
        for (std::size_t f = 0; f < free_col.size(); ++f) {
          u64 coef = m[r][free_col[f]];
          if (coef) acc = (acc + (u64)(q_ - coef) * freev[f]) % q_;
        }
        val[pivot_col[r]] = (u32)(acc % q_);
      }
      bool shaped = true;
      for (std::size_t j = t.size(); j < k && shaped; ++j)
        shaped = val[j] >= 1 && val[j] < c_;
      if (shaped) {
        if (out.candidates == 0) {
          out.outside.assign(o_set.begin(), o_set.end());
          std::sort(out.outside.begin(), out.outside.end());
        }
        ++out.candidates;
      }
      // advance the free assignment odometer
      std::size_t pos = 0;
      while (pos < freev.size()) {
        if (++freev[pos] < q_) break;
        freev[pos++] = 0;
      }
      if (pos == freev.size()) break;
      if (freev.empty()) break;
    }
    return work <= kWorkBound;
  }

  u32 n_;
  u64 a_, b_, c_;
  u64 seed_;
  std::vector<u32> s_;
  std::vector<u8> in_s_;
  u32 q_ = 0;
  u64 s_eq_ = 0;
  std::vector<u32> z_;
};

}  // namespace gsketch
