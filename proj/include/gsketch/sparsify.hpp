#pragma once

// Hashed vertex groups wired by a fixed circulant graph. Every group keeps
// two sketches of its cross-group subgraph: an expansion tester and a sparse
// neighborhood recovery. At recovery time, groups touched by the easy
// matching or flagged as expanding are discarded; the neighbor sets recovered
// for the survivors are stitched back into edges wherever a wired group pair
// points at exactly one vertex of the other, and a maximum matching of that
// rebuilt graph is returned.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gsketch/hash.hpp"
#include "gsketch/matching.hpp"
#include "gsketch/ne_tester.hpp"
#include "gsketch/prime.hpp"
#include "gsketch/sn_recovery.hpp"
#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

namespace gsketch {

// raised when the canonical parameter map lands outside the regime the
// sub-sketch guarantees need (a >= 16*btilde for the tester, a >= 100*b for
// the recovery cascade)
struct promise_regime_error : std::runtime_error {
  explicit promise_regime_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Circulant d-regular graph on [k]: i is adjacent to i +- 1 .. i +- floor(d/2)
// mod k, plus the antipode i + k/2 when d is odd (which forces k even). A
// pure function of (k, d); nothing is stored per edge.
class RegularGraph {
 public:
  RegularGraph(u32 k, u32 d) : k_(k), d_(d) {
    if (d_ == 0 || d_ >= k_)
      throw std::invalid_argument("regular graph: need 0 < degree < k");
    if ((d_ & 1u) && (k_ & 1u))
      throw std::invalid_argument("regular graph: odd degree needs even k");
  }

  u32 k() const { return k_; }
  u32 degree() const { return d_; }

  bool adjacent(u32 i, u32 j) const {
    if (i >= k_ || j >= k_)
      throw std::out_of_range("regular graph: node out of range");
    if (i == j) return false;
    u32 diff = (j + k_ - i) % k_;
    u32 circ = std::min(diff, k_ - diff);
    if (circ <= d_ / 2) return true;
    return (d_ & 1u) && diff == k_ / 2;
  }

  std::vector<u32> neighbors(u32 i) const {
    if (i >= k_) throw std::out_of_range("regular graph: node out of range");
    std::vector<u32> out;
    for (u32 h = 1; h <= d_ / 2; ++h) {
      out.push_back((i + h) % k_);
      out.push_back((i + k_ - h) % k_);
    }
    if (d_ & 1u) out.push_back((i + k_ / 2) % k_);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  u32 k_;
  u32 d_;
};

struct SparsifyParams {
  u32 k = 0;        // number of groups
  u32 d_f = 0;      // wiring degree
  u64 a = 0;        // per-group matched-side budget
  u64 btilde = 0;   // expansion grain
  u64 c = 0;        // counter cap handed to the recovery sketch
  double tester_scale = 1.0;

  static SparsifyParams canonical(u32 n, u64 opt, double alpha, double delta) {
    if (n < 2 || opt == 0 || !(alpha > 1.0) || !(delta > 0.0))
      throw std::invalid_argument("sparsify: bad parameters");
    SparsifyParams p;
    p.k = (u32)std::ceil(10.0 * (double)opt / alpha);
    p.d_f = (u32)std::ceil((double)p.k / alpha);
    p.a = (u64)std::ceil(2.0 * (double)opt / (alpha * alpha));
    p.btilde = (u64)std::ceil(std::pow((double)n, delta / 4.0));
    p.c = (u64)std::ceil(30.0 / delta);
    return p;
  }

  // the sub-sketch promises: tester wants a >= 16*btilde, the recovery
  // cascade wants a >= 100 * (2*btilde)
  void check_promise() const {
    if (a >= 16 * btilde && a >= 100 * (2 * btilde)) return;
    throw promise_regime_error(
        "PROMISE_REGIME_UNREACHABLE: a=" + std::to_string(a) +
        " btilde=" + std::to_string(btilde) +
        " needs a >= 16*btilde and a >= 200*btilde");
  }
};

enum class GroupFate : u8 {
  kSurvivor,
  kRemovedMatched,    // shares a vertex with the easy matching
  kRemovedExpanding,  // tester answered No
  kRemovedDecodeFailed,
};

struct SparsifyResult {
  std::vector<std::pair<u32, u32>> matching;  // matching of the rebuilt graph
  std::vector<std::pair<u32, u32>> rebuilt;   // the rebuilt edges themselves
  std::vector<GroupFate> fate;
  std::vector<std::vector<u32>> recovered;  // per group: neighbor set, sorted
  std::vector<std::vector<u32>> t_sets;     // per group: T handed to sketches
};

class SparsifySketch {
 public:
  // canonical parameter map; refuses scales the sub-sketch promises exclude
  SparsifySketch(u32 n, u64 opt, double alpha, double delta, u64 seed)
      : SparsifySketch(n, checked(n, opt, alpha, delta), seed) {}

  // explicit parameters, used by small composed test cells
  SparsifySketch(u32 n, const SparsifyParams& p, u64 seed)
      : n_(n), seed_(seed), p_(p), wiring_(p.k, p.d_f) {
    if (n_ < 2) throw std::invalid_argument("sparsify: need n >= 2");
    double l = std::log2((double)n_);
    wise_ = std::max<u64>(1, (u64)std::ceil(l * l));
    p_h_ = smallest_prime_gt(std::max<u64>(n_, p_.k));

    coeffs_.resize(p_.k);
    members_.resize(p_.k);
    groups_of_.resize(n_);
    for (u32 i = 0; i < p_.k; ++i) {
      Rng gen(derive_seed(seed_, 0x6766u, i));
      coeffs_[i].resize(wise_);
      for (u64 d = 0; d < wise_; ++d) coeffs_[i][d] = gen.next_below(p_h_);
    }
    for (u32 v = 0; v < n_; ++v)
      for (u32 i = 0; i < p_.k; ++i)
        if (hash_group(i, v) == 1) {
          members_[i].push_back(v);
          groups_of_[v].push_back(i);
        }

    std::string tag = "sparsify-" + std::to_string(seed_);
    snr_.resize(p_.k);
    testers_.resize(p_.k);
    for (u32 i = 0; i < p_.k; ++i) {
      if (members_[i].empty()) continue;  // nothing to sketch, nothing to wire
      snr_[i].emplace(n_, members_[i], p_.a, 2 * p_.btilde, p_.c,
                      derive_seed(seed_, 0x736eu, i), tag);
      testers_[i].emplace(n_, members_[i], p_.a, p_.btilde,
                          derive_seed(seed_, 0x6e74u, i), p_.tester_scale);
    }
  }

  u32 n() const { return n_; }
  u64 seed() const { return seed_; }
  const SparsifyParams& params() const { return p_; }
  const RegularGraph& wiring() const { return wiring_; }
  const std::vector<u32>& group(u32 i) const { return members_.at(i); }
  const std::vector<u32>& groups_of(u32 v) const { return groups_of_.at(v); }

  bool in_group(u32 i, u32 v) const {
    const auto& g = groups_of_.at(v);
    return std::find(g.begin(), g.end(), i) != g.end();
  }

  // groups whose cross-group subgraph contains the edge: u in the group and v
  // in some wired neighbor group, or the mirror image
  std::vector<u32> touched_groups(u32 u, u32 v) const {
    const auto& gu = groups_of_.at(u);
    const auto& gv = groups_of_.at(v);
    std::vector<u32> out;
    for (u32 i : gu)
      for (u32 j : gv)
        if (wiring_.adjacent(i, j)) {
          out.push_back(i);
          break;
        }
    for (u32 j : gv)
      for (u32 i : gu)
        if (wiring_.adjacent(i, j)) {
          out.push_back(j);
          break;
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void feed(const StreamUpdate& up) {
    for (u32 i : touched_groups(up.u, up.v)) {
      snr_[i]->feed(up);
      testers_[i]->feed(up);
    }
  }

  SparsifyResult recover(
      const std::vector<std::pair<u32, u32>>& m_easy) const {
    std::vector<u8> matched(n_, 0);
    std::vector<u32> matched_list;
    for (auto& [x, y] : m_easy) {
      if (x >= n_ || y >= n_)
        throw std::invalid_argument("sparsify: matching vertex out of range");
      if (x == y) throw std::invalid_argument("sparsify: degenerate pair");
      if (matched[x] || matched[y])
        throw std::invalid_argument("sparsify: pairs share a vertex");
      matched[x] = matched[y] = 1;
      matched_list.push_back(x);
      matched_list.push_back(y);
    }

    SparsifyResult res;
    res.fate.assign(p_.k, GroupFate::kSurvivor);
    res.recovered.resize(p_.k);
    res.t_sets.resize(p_.k);

    for (u32 w : matched_list)
      for (u32 i : groups_of_[w]) res.fate[i] = GroupFate::kRemovedMatched;

    for (u32 i = 0; i < p_.k; ++i) {
      if (res.fate[i] != GroupFate::kSurvivor || !testers_[i].has_value())
        continue;
      std::vector<u32>& t = res.t_sets[i];
      for (u32 w : matched_list)
        for (u32 g : groups_of_[w])
          if (wiring_.adjacent(i, g)) {
            t.push_back(w);
            break;
          }
      std::sort(t.begin(), t.end());
      if (!testers_[i]->ne_test(t).yes) {
        res.fate[i] = GroupFate::kRemovedExpanding;
        continue;
      }
      SnrResult r = snr_[i]->recover(t);
      if (r.status != SnrStatus::Ok) {
        res.fate[i] = GroupFate::kRemovedDecodeFailed;
        continue;
      }
      res.recovered[i] = std::move(r.outside);
    }

    // stitch: a wired survivor pair rebuilds an edge exactly when each side's
    // recovered neighbor set meets the other group in a single vertex
    for (u32 i = 0; i < p_.k; ++i) {
      if (res.fate[i] != GroupFate::kSurvivor) continue;
      for (u32 j : wiring_.neighbors(i)) {
        if (j <= i || res.fate[j] != GroupFate::kSurvivor) continue;
        std::vector<u32> ij = intersect(res.recovered[i], members_[j]);
        if (ij.size() != 1) continue;
        std::vector<u32> ji = intersect(res.recovered[j], members_[i]);
        if (ji.size() != 1) continue;
        u32 x = ji[0], y = ij[0];
        if (x == y) continue;
        res.rebuilt.push_back({std::min(x, y), std::max(x, y)});
      }
    }
    std::sort(res.rebuilt.begin(), res.rebuilt.end());
    res.rebuilt.erase(std::unique(res.rebuilt.begin(), res.rebuilt.end()),
                      res.rebuilt.end());

    Graph h;
    h.n = n_;
    h.edges = res.rebuilt;
    res.matching = max_matching_small(h);
    return res;
  }

  void merge(const SparsifySketch& o) {
    if (!same_shape(o))
      throw std::invalid_argument("sparsify: merge shape mismatch");
    for (u32 i = 0; i < p_.k; ++i) {
      if (!snr_[i].has_value()) continue;
      snr_[i]->merge(*o.snr_[i]);
      testers_[i]->merge(*o.testers_[i]);
    }
  }

  bool state_equal(const SparsifySketch& o) const {
    if (!same_shape(o)) return false;
    for (u32 i = 0; i < p_.k; ++i) {
      if (!snr_[i].has_value()) continue;
      if (!snr_[i]->state_equal(*o.snr_[i])) return false;
      if (!testers_[i]->state_equal(*o.testers_[i])) return false;
    }
    return true;
  }

  // children carry their own bit bills (the recovery sketches share one seed
  // pool via the common tag); this layer adds only its group hashes
  BitMeter measure() const {
    BitMeter bm;
    for (u32 i = 0; i < p_.k; ++i) {
      if (!snr_[i].has_value()) continue;
      bm += snr_[i]->measure();
      bm += testers_[i]->measure();
    }
    bm.randomness_bits += (u64)p_.k * wise_ * bits_for(p_h_);
    return bm;
  }

 private:
  static SparsifyParams checked(u32 n, u64 opt, double alpha, double delta) {
    SparsifyParams p = SparsifyParams::canonical(n, opt, alpha, delta);
    p.check_promise();
    return p;
  }

  u64 hash_group(u32 i, u32 v) const {
    const auto& c = coeffs_[i];
    u64 acc = c[wise_ - 1];
    for (u64 d = wise_ - 1; d-- > 0;)
      acc = addmod(mulmod(acc, v, p_h_), c[d], p_h_);
    return acc % p_.k;
  }

  static std::vector<u32> intersect(const std::vector<u32>& a,
                                    const std::vector<u32>& b) {
    std::vector<u32> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(out));
    return out;
  }

  bool same_shape(const SparsifySketch& o) const {
    return n_ == o.n_ && seed_ == o.seed_ && p_.k == o.p_.k &&
           p_.d_f == o.p_.d_f && p_.a == o.p_.a && p_.btilde == o.p_.btilde &&
           p_.c == o.p_.c && p_.tester_scale == o.p_.tester_scale;
  }

  u32 n_;
  u64 seed_;
  SparsifyParams p_;
  RegularGraph wiring_;
  u64 wise_ = 1;
  u64 p_h_ = 2;
  std::vector<std::vector<u64>> coeffs_;
  std::vector<std::vector<u32>> members_;
  std::vector<std::vector<u32>> groups_of_;
  std::vector<std::optional<SNRecoverySketch>> snr_;
  std::vector<std::optional<NETester>> testers_;
};

// independent repetitions drive the failure probability down geometrically;
// the consumer runs this many copies and keeps the largest matching
inline u64 amplification_copies(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("amplification: delta <= 0");
  return (u64)std::ceil(60.0 / delta);
}

}  // namespace gsketch
