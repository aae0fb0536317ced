#pragma once

// Deterministic k-sparse recovery of a vector x in F_q^m from 2k power-sum
// syndromes over an extension field F_{q^e} with q^e > m:
//
//   s_r = sum_j x_j * w_j^r,   r = 1..2k,   w_j = g^j distinct and nonzero.
//
// Decoding is the classic syndrome pipeline: Berlekamp-Massey synthesizes the
// minimal LFSR (error locator), a scan over the m evaluation points finds its
// roots, and the residue formula x_j = -Omega(w_j^-1) / Lambda'(w_j^-1)
// produces the coefficients. Everything is verified (locator degree, root
// count, coefficients landing in F_q, syndromes recomputing) and any mismatch
// reports NOT_SPARSE rather than a wrong vector. No randomness anywhere: two
// sketches of the same shape always agree, and merging is coordinate-wise
// addition of syndromes.

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gsketch/bit_meter.hpp"
#include "gsketch/ext_field.hpp"
#include "gsketch/util.hpp"

namespace gsketch {

struct SparseDecodeResult {
  enum class Kind { Ok, NotSparse };
  Kind kind = Kind::NotSparse;
  // index -> value (in F_q, nonzero), sorted by index
  std::vector<std::pair<u64, u64>> entries;

  bool ok() const { return kind == Kind::Ok; }
};

class FqSparseRecovery {
 public:
  FqSparseRecovery(u64 m, u32 k, u64 q)
      : m_(m), k_(k), q_(q), field_(ExtField::get(q, ExtField::min_degree(q, m))) {
    if (m == 0 || k == 0) throw std::invalid_argument("FqSparseRecovery: empty shape");
    if (m > field_->order()) throw std::invalid_argument("FqSparseRecovery: domain too large");
    synd_.assign(2 * static_cast<std::size_t>(k_), 0);
  }

  u64 domain() const { return m_; }
  u32 sparsity() const { return k_; }
  u64 modulus() const { return q_; }
  const ExtField& field() const { return *field_; }

  // Add delta (any signed integer, reduced into F_q) at coordinate j.
  void feed_index(u64 j, i64 delta) {
    if (j >= m_) throw std::out_of_range("FqSparseRecovery: index");
    u64 val = static_cast<u64>(((delta % static_cast<i64>(q_)) + static_cast<i64>(q_)) %
                               static_cast<i64>(q_));
    if (val == 0) return;
    const u64 order = field_->order();
    u64 t = (field_->log(val) + j) % order;  // log of val * w_j^1
    const u64 step = j % order;
    for (std::size_t r = 0; r < synd_.size(); ++r) {
      synd_[r] = field_->add(synd_[r], field_->generator_pow(t));
      t += step;
      if (t >= order) t -= order;
    }
  }

  void merge(const FqSparseRecovery& other) {
    if (m_ != other.m_ || k_ != other.k_ || q_ != other.q_)
      throw std::invalid_argument("FqSparseRecovery: merge shape mismatch");
    for (std::size_t r = 0; r < synd_.size(); ++r)
      synd_[r] = field_->add(synd_[r], other.synd_[r]);
  }

  bool state_equal(const FqSparseRecovery& other) const { return synd_ == other.synd_; }

  SparseDecodeResult decode() const {
    const ExtField& F = *field_;
    SparseDecodeResult out;

    bool all_zero = true;
    for (u64 s : synd_)
      if (s != 0) {
        all_zero = false;
        break;
      }
    if (all_zero) {
      out.kind = SparseDecodeResult::Kind::Ok;
      return out;  // x = 0 (unique <=2k-sparse explanation)
    }

    // Berlekamp-Massey: minimal C(x) = 1 + c_1 x + ... + c_L x^L with
    // s_n = -sum_i c_i s_{n-i} for all n >= L.
    std::vector<u64> C{1}, B{1};
    u32 L = 0, mshift = 1;
    u64 b = 1;
    const std::size_t N = synd_.size();
    for (std::size_t n = 0; n < N; ++n) {
      u64 d = synd_[n];
      for (u32 i = 1; i <= L && i < C.size(); ++i)
        d = F.add(d, F.mul(C[i], synd_[n - i]));
      if (d == 0) {
        ++mshift;
      } else if (2 * L <= n) {
        std::vector<u64> T = C;
        u64 coef = F.mul(d, F.inv(b));
        if (C.size() < B.size() + mshift) C.resize(B.size() + mshift, 0);
        for (std::size_t i = 0; i < B.size(); ++i)
          C[i + mshift] = F.sub(C[i + mshift], F.mul(coef, B[i]));
        L = static_cast<u32>(n + 1 - L);
        B = std::move(T);
        b = d;
        mshift = 1;
      } else {
        u64 coef = F.mul(d, F.inv(b));
        if (C.size() < B.size() + mshift) C.resize(B.size() + mshift, 0);
        for (std::size_t i = 0; i < B.size(); ++i)
          C[i + mshift] = F.sub(C[i + mshift], F.mul(coef, B[i]));
        ++mshift;
      }
    }
    if (L == 0 || L > k_) return out;  // nonzero syndromes need 1..k roots
    C.resize(L + 1, 0);

    // Root scan: x has support {j : C(w_j^{-1}) = 0}. Points are w_j = g^j.
    const u64 order = F.order();
    std::vector<u64> roots;  // indices j
    for (u64 j = 0; j < m_; ++j) {
      u64 xinv = F.generator_pow(order - (j % order));  // w_j^{-1}
      u64 acc = 0;
      for (std::size_t i = C.size(); i-- > 0;) acc = F.add(F.mul(acc, xinv), C[i]);
      if (acc == 0) {
        roots.push_back(j);
        if (roots.size() > L) break;
      }
    }
    if (roots.size() != L) return out;

    // Omega(x) = C(x) * S(x) mod x^L, with S(x) = sum_r s_{r+1} x^r.
    std::vector<u64> omega(L, 0);
    for (u32 i = 0; i < L; ++i) {
      u64 acc = 0;
      for (u32 dgr = 0; dgr <= i && dgr < C.size(); ++dgr)
        acc = F.add(acc, F.mul(C[dgr], synd_[i - dgr]));
      omega[i] = acc;
    }
    // C'(x), formal derivative (char q)
    std::vector<u64> cder(L, 0);
    for (u32 i = 1; i <= L; ++i) cder[i - 1] = F.mul(C[i], F.from_base(i % q_));

    out.entries.reserve(L);
    for (u64 j : roots) {
      u64 xinv = F.generator_pow(order - (j % order));
      u64 onum = 0, oden = 0;
      for (std::size_t i = omega.size(); i-- > 0;) onum = F.add(F.mul(onum, xinv), omega[i]);
      for (std::size_t i = cder.size(); i-- > 0;) oden = F.add(F.mul(oden, xinv), cder[i]);
      if (oden == 0) return out;
      u64 val = F.neg(F.mul(onum, F.inv(oden)));
      if (val == 0 || !F.in_base(val)) return out;
      out.entries.emplace_back(j, val);
    }

    // Confirm the recovered vector reproduces every syndrome.
    std::vector<u64> check(N, 0);
    for (const auto& [j, val] : out.entries) {
      u64 t = (F.log(val) + j) % order;
      const u64 step = j % order;
      for (std::size_t r = 0; r < N; ++r) {
        check[r] = F.add(check[r], F.generator_pow(t));
        t += step;
        if (t >= order) t -= order;
      }
    }
    if (check != synd_) return out;

    out.kind = SparseDecodeResult::Kind::Ok;
    return out;
  }

  BitMeter measure() const {
    BitMeter bm;
    bm.sketch_bits = 2ull * k_ * field_->degree() * bits_for(q_);
    bm.randomness_bits = 0;
    return bm;
  }

 private:
  u64 m_;
  u32 k_;
  u64 q_;
  std::shared_ptr<const ExtField> field_;
  std::vector<u64> synd_;  // packed field elements, s_{r+1} at slot r
};

}  // namespace gsketch
