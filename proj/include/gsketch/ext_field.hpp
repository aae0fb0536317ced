#pragma once

// The extension field F_{q^e}, built as F_q[x]/(f) for the first primitive
// monic polynomial f of degree e in coefficient-counter order. Primitivity
// makes x itself a generator, so the element x^i is reachable by an O(e)
// shift-reduce and full exp/log/Zech tables come cheap. Elements are handed
// around in packed form (base-q digit integer, canonical), multiplication
// runs through the log tables, addition through Zech logarithms:
//   g^i + g^j = g^(i + zech[j - i]).
//
// Construction is deterministic: a given (q, e) always yields the same
// tables, which is what lets separately built sketches agree on syndrome
// arithmetic and merge.

#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "gsketch/field.hpp"
#include "gsketch/prime.hpp"
#include "gsketch/util.hpp"

namespace gsketch {

class ExtField {
 public:
  static constexpr u32 kNull = 0xffffffffu;  // "log of zero" sentinel

  ExtField(u64 q, u32 e) : q_(q), e_(e) {
    if (!is_prime(q)) throw std::invalid_argument("ExtField: q must be prime");
    size_ = 1;
    for (u32 i = 0; i < e; ++i) {
      if (size_ > (1ull << 26) / q) throw std::invalid_argument("ExtField: table too large");
      size_ *= q;
    }
    order_ = size_ - 1;
    find_primitive_poly();
    build_tables();
  }

  u64 q() const { return q_; }
  u32 degree() const { return e_; }
  u64 size() const { return size_; }
  u64 order() const { return order_; }
  const std::vector<u64>& modulus_poly() const { return modpoly_; }

  // packed constants
  u64 zero() const { return 0; }
  u64 one() const { return 1; }
  u64 from_base(u64 v) const { return v % q_; }  // F_q embeds as degree-0

  bool in_base(u64 a) const { return a < q_; }

  u64 generator_pow(u64 i) const { return exp_[i % order_]; }  // x^i
  u32 log(u64 a) const { return log_[a]; }                     // kNull for 0

  u64 add(u64 a, u64 b) const {
    if (a == 0) return b;
    if (b == 0) return a;
    u32 la = log_[a], lb = log_[b];
    u32 diff = lb >= la ? lb - la : static_cast<u32>(order_) - (la - lb);
    u32 z = zech_[diff];
    if (z == kNull) return 0;
    u64 s = la + z;
    if (s >= order_) s -= order_;
    return exp_[s];
  }

  u64 neg(u64 a) const {
    if (a == 0 || q_ == 2) return a;
    u64 l = log_[a] + half_;
    if (l >= order_) l -= order_;
    return exp_[l];
  }

  u64 sub(u64 a, u64 b) const { return add(a, neg(b)); }

  u64 mul(u64 a, u64 b) const {
    if (a == 0 || b == 0) return 0;
    u64 l = u64(log_[a]) + log_[b];
    if (l >= order_) l -= order_;
    return exp_[l];
  }

  u64 inv(u64 a) const {
    if (a == 0) throw std::domain_error("ExtField: inverse of zero");
    u32 l = log_[a];
    return exp_[l == 0 ? 0 : order_ - l];
  }

  u64 pow(u64 a, u64 k) const {
    if (a == 0) return k == 0 ? 1 : 0;
    return exp_[mulmod(log_[a], k % order_, order_)];
  }

  // smallest e with q^e > m
  static u32 min_degree(u64 q, u64 m) {
    u32 e = 1;
    u64 s = q;
    while (s <= m) {
      s *= q;
      ++e;
    }
    return e;
  }

  static std::shared_ptr<const ExtField> get(u64 q, u32 e) {
    static std::mutex mu;
    static std::unordered_map<u64, std::shared_ptr<const ExtField>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[q * 64 + e];
    if (!slot) slot = std::make_shared<ExtField>(q, e);
    return slot;
  }

 private:
  // ----- polynomial helpers over F_q, dense coeff vectors, used only during
  // construction (packed-table arithmetic takes over afterwards)

  using Poly = std::vector<u64>;

  static void poly_trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
  }

  Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f) const {
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % q_;
    }
    // reduce mod monic f of degree e_
    for (std::size_t d = r.size(); d-- > e_;) {
      u64 c = r[d];
      if (c == 0) continue;
      r[d] = 0;
      for (u32 i = 0; i < e_; ++i) {
        u64 sub = (c * f[i]) % q_;
        r[d - e_ + i] = (r[d - e_ + i] + q_ - sub) % q_;
      }
    }
    r.resize(e_);
    return r;
  }

  Poly poly_powmod(Poly base, u64 k, const Poly& f) const {
    Poly r{1};
    r.resize(e_, 0);
    base.resize(std::max<std::size_t>(base.size(), e_), 0);
    while (k) {
      if (k & 1) r = poly_mulmod(r, base, f);
      base = poly_mulmod(base, base, f);
      k >>= 1;
    }
    return r;
  }

  static bool poly_is_one(const Poly& p) {
    if (p.empty() || p[0] != 1) return false;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (p[i] != 0) return false;
    return true;
  }

  Poly poly_gcd(Poly a, Poly b) const {
    PrimeField fq(q_);
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
      // a mod b
      while (a.size() >= b.size() && !a.empty()) {
        u64 c = fq.mul(a.back(), fq.inv(b.back()));
        std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i)
          a[shift + i] = fq.sub(a[shift + i], fq.mul(c, b[i]));
        poly_trim(a);
        if (a.size() < b.size()) break;
      }
      std::swap(a, b);
      poly_trim(b);
    }
    return a;
  }

  bool is_irreducible(const Poly& f) const {
    // x^(q^e) == x mod f, and gcd(x^(q^(e/p)) - x, f) = 1 for prime p | e
    Poly x{0, 1};
    std::vector<Poly> frob(e_ + 1);  // frob[i] = x^(q^i) mod f
    frob[1] = poly_powmod(x, q_, f);
    for (u32 i = 2; i <= e_; ++i) frob[i] = poly_powmod(frob[i - 1], q_, f);
    Poly xe = frob[e_];
    xe.resize(std::max<std::size_t>(xe.size(), 2), 0);
    Poly diff = xe;
    diff[1] = (diff[1] + q_ - 1) % q_;
    poly_trim(diff);
    if (!diff.empty()) return false;  // x^(q^e) != x
    for (u32 p = 2; p <= e_; ++p) {
      if (e_ % p != 0 || !is_prime(p)) continue;
      Poly xd = frob[e_ / p];
      xd.resize(std::max<std::size_t>(xd.size(), 2), 0);
      Poly d2 = xd;
      d2[1] = (d2[1] + q_ - 1) % q_;
      poly_trim(d2);
      Poly g = poly_gcd(d2, f);
      if (!(g.size() == 1)) return false;  // nontrivial common factor
    }
    return true;
  }

  bool x_is_primitive(const Poly& f) const {
    // ord(x) divides order_; primitive iff x^(order_/p) != 1 for prime p | order_
    u64 n = order_;
    std::vector<u64> primes;
    for (u64 p = 2; p * p <= n; ++p)
      if (n % p == 0) {
        primes.push_back(p);
        while (n % p == 0) n /= p;
      }
    if (n > 1) primes.push_back(n);
    Poly x{0, 1};
    for (u64 p : primes) {
      if (poly_is_one(poly_powmod(x, order_ / p, f))) return false;
    }
    return true;
  }

  void find_primitive_poly() {
    if (e_ == 1) {
      // F_q itself: modulus x - g for a generator g of F_q^*
      for (u64 g = 1; g < q_; ++g) {
        Poly f{(q_ - g) % q_, 1};  // x - g
        if (x_is_primitive(f)) {
          modpoly_ = f;
          return;
        }
      }
      throw std::logic_error("ExtField: no generator found");
    }
    // counter encodes coefficients of x^0..x^(e-1); leading coeff fixed at 1
    for (u64 ctr = 0; ctr < size_; ++ctr) {
      Poly f(e_ + 1, 0);
      u64 t = ctr;
      for (u32 i = 0; i < e_; ++i) {
        f[i] = t % q_;
        t /= q_;
      }
      f[e_] = 1;
      if (f[0] == 0) continue;  // reducible: x divides
      if (!is_irreducible(f)) continue;
      if (!x_is_primitive(f)) continue;
      modpoly_ = f;
      return;
    }
    throw std::logic_error("ExtField: no primitive polynomial found");
  }

  void build_tables() {
    exp_.assign(order_, 0);
    log_.assign(size_, kNull);
    zech_.assign(order_, kNull);
    // digit weights for packing
    std::vector<u64> digits(e_, 0);
    digits[0] = 1;  // current element, starts at x^0 = 1
    auto pack = [&](const std::vector<u64>& d) {
      u64 v = 0;
      for (u32 i = e_; i-- > 0;) v = v * q_ + d[i];
      return v;
    };
    for (u64 i = 0; i < order_; ++i) {
      u64 packed = pack(digits);
      exp_[i] = static_cast<u32>(packed);
      log_[packed] = static_cast<u32>(i);
      // multiply by x: shift digits, reduce with monic modulus
      u64 carry = digits[e_ - 1];
      for (u32 d = e_; d-- > 1;) digits[d] = digits[d - 1];
      digits[0] = 0;
      if (carry) {
        for (u32 d = 0; d < e_; ++d) {
          u64 sub = (carry * modpoly_[d]) % q_;
          digits[d] = (digits[d] + q_ - sub) % q_;
        }
      }
    }
    // sanity: x has full order
    if (log_[1] != 0) throw std::logic_error("ExtField: table construction failed");
    // zech[k] = log(1 + x^k); compute by digit add of 1
    for (u64 k = 0; k < order_; ++k) {
      u64 a = exp_[k];
      u64 low = a % q_;
      u64 bumped = a - low + (low + 1) % q_;
      zech_[k] = bumped == 0 ? kNull : log_[bumped];
    }
    half_ = q_ == 2 ? 0 : order_ / 2;
  }

  u64 q_;
  u32 e_;
  u64 size_ = 0;
  u64 order_ = 0;
  u64 half_ = 0;
  Poly modpoly_;
  std::vector<u32> exp_;
  std::vector<u32> log_;
  std::vector<u32> zech_;
};

}  // namespace gsketch
