#pragma once

// Arithmetic in the prime field F_q for a runtime modulus q. Elements are
// canonical residues in [0, q). Division is by Fermat inverse, so q must be
// prime; construction checks this once.

#include <stdexcept>
#include <string_view>

#include "gsketch/prime.hpp"
#include "gsketch/util.hpp"

namespace gsketch {

class PrimeField {
 public:
  explicit PrimeField(u64 q) : q_(q) {
    if (!is_prime(q)) throw std::invalid_argument("PrimeField: modulus must be prime");
  }

  u64 modulus() const { return q_; }

  u64 reduce(u64 x) const { return x % q_; }
  u64 reduce_signed(i64 x) const {
    i64 r = x % static_cast<i64>(q_);
    if (r < 0) r += static_cast<i64>(q_);
    return static_cast<u64>(r);
  }

  u64 add(u64 a, u64 b) const { return addmod(a, b, q_); }
  u64 sub(u64 a, u64 b) const { return submod(a, b, q_); }
  u64 mul(u64 a, u64 b) const { return mulmod(a, b, q_); }
  u64 neg(u64 a) const { return a == 0 ? 0 : q_ - a; }
  u64 pow(u64 a, u64 e) const { return powmod(a, e, q_); }

  u64 inv(u64 a) const {
    if (a == 0) throw std::domain_error("PrimeField: inverse of zero");
    return powmod(a, q_ - 2, q_);
  }

  bool operator==(const PrimeField& o) const { return q_ == o.q_; }

 private:
  u64 q_;
};

// Dispatch-by-name helper mirroring the toolkit's scripting surface; the
// typed methods above are what library code uses.
inline u64 field_arith(u64 q, std::string_view op, u64 x, u64 y) {
  PrimeField f(q);
  x = f.reduce(x);
  y = f.reduce(y);
  if (op == "add") return f.add(x, y);
  if (op == "sub") return f.sub(x, y);
  if (op == "mul") return f.mul(x, y);
  if (op == "inv") return f.inv(x);
  if (op == "pow") return f.pow(x, y);
  throw std::invalid_argument("field_arith: unknown op");
}

}  // namespace gsketch
