#pragma once

// Instance generators for the benchmark harness. Each family produces a
// shuffled dynamic stream whose net graph is simple:
//
//   erdos_renyi(p)            every pair independently with probability p
//   planted_matching(mu)      a hidden perfect matching on 2*mu vertices
//   hard_sparse_induced(a)    a sparse near-perfect induced matching on
//                             roughly n - n/a vertices, dense distractor
//                             edges on the remaining n/a
//
// deletion_fraction controls churn: extra updates that insert and then
// delete an edge, cancelling in the net graph. For the hard family the
// churn consumes distractor edges (that is where a space-hungry algorithm
// gets punished); the other families churn fresh edges so the planted
// structure stays intact.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

namespace gsketch {

enum class Family : u8 { kErdosRenyi, kPlantedMatching, kHardSparseInduced };

struct InstanceSpec {
  Family family = Family::kPlantedMatching;
  u32 n = 0;
  double p = 0.05;       // erdos_renyi
  u64 mu = 0;            // planted_matching
  double alpha = 4.0;    // hard_sparse_induced: distractor side is n/alpha
  double noise = 0.25;   // hard_sparse_induced: extra sparse-side edges per
                         // sparse-side vertex
  double deletion_fraction = 0.0;
  u64 seed = 0;
};

struct GeneratedInstance {
  StreamFile stream;
  u64 planted_mu = 0;   // matching size guaranteed by construction (0 = none)
  u64 churned = 0;      // insert/delete pairs that cancel in the net graph
  std::vector<u32> sparse_side;  // hard family: planted-side vertices, sorted
};

namespace detail {

class EdgePool {
 public:
  explicit EdgePool(u32 n) : n_(n) {}

  bool insert(u32 u, u32 v) {
    return seen_.insert(edge_index(u, v, n_)).second;
  }

  // distinct uniform pair within [lo, hi); throws if the range is exhausted
  std::pair<u32, u32> fresh_pair(Rng& rng, u32 lo, u32 hi) {
    u64 span = hi - lo;
    if (span < 2 || seen_.size() >= span * (span - 1) / 2)
      throw std::invalid_argument("generator: pair range exhausted");
    for (;;) {
      u32 a = lo + (u32)rng.next_below(span);
      u32 b = lo + (u32)rng.next_below(span);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      if (insert(a, b)) return {a, b};
    }
  }

  // pairs drawn from an explicit vertex list instead of a contiguous range
  std::pair<u32, u32> fresh_pair(Rng& rng, const std::vector<u32>& verts) {
    if (verts.size() < 2)
      throw std::invalid_argument("generator: pair range exhausted");
    for (u64 tries = 0; tries < 64 * verts.size() * verts.size(); ++tries) {
      u32 a = verts[rng.next_below(verts.size())];
      u32 b = verts[rng.next_below(verts.size())];
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      if (insert(a, b)) return {a, b};
    }
    throw std::invalid_argument("generator: pair range exhausted");
  }

 private:
  u32 n_;
  std::unordered_set<u64> seen_;
};

inline void shuffle_updates(std::vector<StreamUpdate>& ups, Rng& rng) {
  for (u64 i = ups.size(); i > 1; --i)
    std::swap(ups[i - 1], ups[rng.next_below(i)]);
  // a churned pair may land delete-first; point the earlier occurrence at
  // +1 so multiplicities stay in {0,1} over every prefix
  std::unordered_map<u64, u64> first;
  for (u64 i = 0; i < ups.size(); ++i) {
    u64 key = ((u64)ups[i].u << 32) | ups[i].v;
    auto [it, fresh] = first.emplace(key, i);
    if (!fresh) {
      ups[it->second].delta = +1;
      ups[i].delta = -1;
    }
  }
}

}  // namespace detail

inline GeneratedInstance generate(const InstanceSpec& spec) {
  if (spec.n < 2 || spec.n > (1u << 24))
    throw std::invalid_argument("generator: n out of range");
  if (spec.deletion_fraction < 0.0 || spec.deletion_fraction >= 1.0)
    throw std::invalid_argument("generator: deletion_fraction in [0,1)");

  GeneratedInstance out;
  out.stream.n = spec.n;
  Rng rng(derive_seed(spec.seed, 0x67656eu));
  detail::EdgePool pool(spec.n);
  auto& ups = out.stream.updates;

  auto churn_fresh = [&](u64 count, u32 lo, u32 hi) {
    for (u64 i = 0; i < count; ++i) {
      auto [a, b] = pool.fresh_pair(rng, lo, hi);
      ups.push_back(make_update(a, b, +1));
      ups.push_back(make_update(a, b, -1));
    }
    out.churned += count;
  };

  switch (spec.family) {
    case Family::kErdosRenyi: {
      if (spec.p < 0.0 || spec.p > 1.0)
        throw std::invalid_argument("generator: p in [0,1]");
      if ((u64)spec.n * spec.n > 512ull << 20)
        throw std::invalid_argument("generator: erdos_renyi n too large");
      u64 bar = (u64)(spec.p * 9007199254740992.0);  // p * 2^53
      u64 kept = 0;
      for (u32 u = 0; u < spec.n; ++u)
        for (u32 v = u + 1; v < spec.n; ++v)
          if ((rng.next() >> 11) < bar) {
            pool.insert(u, v);
            ups.push_back(make_update(u, v, +1));
            ++kept;
          }
      churn_fresh((u64)std::ceil(spec.deletion_fraction * (double)kept), 0,
                  spec.n);
      break;
    }

    case Family::kPlantedMatching: {
      if (spec.mu < 1 || 2 * spec.mu > spec.n)
        throw std::invalid_argument("generator: need 1 <= mu <= n/2");
      std::vector<u32> perm(spec.n);
      for (u32 i = 0; i < spec.n; ++i) perm[i] = i;
      for (u32 i = spec.n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.next_below(i + 1)]);
      for (u64 i = 0; i < spec.mu; ++i) {
        pool.insert(perm[2 * i], perm[2 * i + 1]);
        ups.push_back(make_update(perm[2 * i], perm[2 * i + 1], +1));
      }
      out.planted_mu = spec.mu;
      churn_fresh((u64)std::ceil(spec.deletion_fraction * (double)spec.mu),
                  0, spec.n);
      break;
    }

    case Family::kHardSparseInduced: {
      if (!(spec.alpha > 1.0))
        throw std::invalid_argument("generator: need alpha > 1");
      if (spec.noise < 0.0 || spec.noise > 1.0)
        throw std::invalid_argument("generator: noise in [0,1]");
      u32 d_size = (u32)((double)spec.n / spec.alpha);
      u32 p_size = spec.n - d_size;
      if (p_size < 2)
        throw std::invalid_argument("generator: sparse side too small");
      std::vector<u32> perm(spec.n);
      for (u32 i = 0; i < spec.n; ++i) perm[i] = i;
      for (u32 i = spec.n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.next_below(i + 1)]);
      std::vector<u32> sparse(perm.begin(), perm.begin() + p_size);
      std::vector<u32> dense(perm.begin() + p_size, perm.end());

      // near-perfect matching plus light noise inside the sparse side:
      // at most p_size/2 + noise*p_size <= 1.5 n net edges, far under 2n
      for (u32 i = 0; i + 1 < p_size; i += 2) {
        pool.insert(sparse[i], sparse[i + 1]);
        ups.push_back(make_update(sparse[i], sparse[i + 1], +1));
      }
      out.planted_mu = p_size / 2;
      u64 noise_edges = (u64)(spec.noise * (double)p_size);
      u64 sparse_cap = (u64)p_size * (p_size - 1) / 2;
      if (noise_edges + out.planted_mu > sparse_cap)
        noise_edges = sparse_cap - out.planted_mu;
      for (u64 i = 0; i < noise_edges; ++i) {
        auto [a, b] = pool.fresh_pair(rng, sparse);
        ups.push_back(make_update(a, b, +1));
      }

      // dense distractors; a deletion_fraction of them are churned away
      if (d_size >= 2) {
        u64 want = std::min<u64>((u64)d_size * (d_size - 1) / 2,
                                 8ull * spec.n);
        u64 churn = (u64)std::ceil(spec.deletion_fraction * (double)want);
        for (u64 i = 0; i < want; ++i) {
          auto [a, b] = pool.fresh_pair(rng, dense);
          ups.push_back(make_update(a, b, +1));
          if (i < churn) {
            ups.push_back(make_update(a, b, -1));
            ++out.churned;
          }
        }
      }
      std::sort(sparse.begin(), sparse.end());
      out.sparse_side = std::move(sparse);
      break;
    }
  }

  detail::shuffle_updates(ups, rng);
  return out;
}

inline Family family_from_name(const std::string& name) {
  if (name == "erdos_renyi") return Family::kErdosRenyi;
  if (name == "planted_matching") return Family::kPlantedMatching;
  if (name == "hard_sparse_induced") return Family::kHardSparseInduced;
  throw std::invalid_argument("generator: unknown family '" + name + "'");
}

}  // namespace gsketch
