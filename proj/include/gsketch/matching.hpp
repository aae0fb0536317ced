#pragma once

#include <algorithm>
#include <bit>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

// Matching utilities for the recovery and harness sides: an exact maximum
// matching (augmenting paths with blossom contraction), a bitmask-DP oracle
// for cross-checking at <= 24 vertices, a greedy maximal matching whose size
// brackets the optimum within a factor two, and a validator.

namespace gsketch {

namespace detail {

class BlossomMatcher {
 public:
  explicit BlossomMatcher(const Graph& g) : n_((int)g.n), adj_(g.n) {
    for (auto& [u, v] : g.edges) {
      if (u >= g.n || v >= g.n || u == v)
        throw std::invalid_argument("matching: bad edge");
      adj_[u].push_back((int)v);
      adj_[v].push_back((int)u);
    }
    match_.assign(n_, -1);
    p_.assign(n_, -1);
    base_.resize(n_);
    used_.assign(n_, 0);
    blossom_.assign(n_, 0);
    on_path_.assign(n_, 0);
  }

  std::vector<std::pair<u32, u32>> run() {
    for (int v = 0; v < n_; ++v) {
      if (match_[v] != -1) continue;
      for (int u : adj_[v])
        if (match_[u] == -1) {
          match_[v] = u;
          match_[u] = v;
          break;
        }
    }
    for (int v = 0; v < n_; ++v)
      if (match_[v] == -1) {
        int leaf = find_path(v);
        while (leaf != -1) {  // flip the path back to the root
          int pv = p_[leaf], ppv = match_[pv];
          match_[leaf] = pv;
          match_[pv] = leaf;
          leaf = ppv;
        }
      }
    std::vector<std::pair<u32, u32>> out;
    for (int v = 0; v < n_; ++v)
      if (match_[v] > v) out.push_back({(u32)v, (u32)match_[v]});
    return out;
  }

 private:
  int lca(int a, int b) {
    std::fill(on_path_.begin(), on_path_.end(), 0);
    int v = a;
    for (;;) {
      v = base_[v];
      on_path_[v] = 1;
      if (match_[v] == -1) break;
      v = p_[match_[v]];
    }
    v = b;
    while (!on_path_[base_[v]]) v = p_[match_[v]];
    return base_[v];
  }

  void mark_path(int v, int b, int child) {
    while (base_[v] != b) {
      blossom_[base_[v]] = 1;
      blossom_[base_[match_[v]]] = 1;
      p_[v] = child;
      child = match_[v];
      v = p_[match_[v]];
    }
  }

  // BFS for an augmenting path from root, contracting odd cycles on the fly;
  // returns the free endpoint or -1
  int find_path(int root) {
    std::fill(used_.begin(), used_.end(), 0);
    std::fill(p_.begin(), p_.end(), -1);
    for (int i = 0; i < n_; ++i) base_[i] = i;
    used_[root] = 1;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int to : adj_[v]) {
        if (base_[v] == base_[to] || match_[v] == to) continue;
        if (to == root || (match_[to] != -1 && p_[match_[to]] != -1)) {
          int curbase = lca(v, to);
          std::fill(blossom_.begin(), blossom_.end(), 0);
          mark_path(v, curbase, to);
          mark_path(to, curbase, v);
          for (int i = 0; i < n_; ++i) {
            if (!blossom_[base_[i]]) continue;
            base_[i] = curbase;
            if (!used_[i]) {
              used_[i] = 1;
              q.push(i);
            }
          }
        } else if (p_[to] == -1) {
          p_[to] = v;
          if (match_[to] == -1) return to;
          used_[match_[to]] = 1;
          q.push(match_[to]);
        }
      }
    }
    return -1;
  }

  int n_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> match_, p_, base_;
  std::vector<u8> used_, blossom_, on_path_;
};

}  // namespace detail

// Exact maximum matching; edges come back canonical (u < v) sorted by u.
inline std::vector<std::pair<u32, u32>> max_matching_small(const Graph& g) {
  return detail::BlossomMatcher(g).run();
}

// Exact maximum matching size by subset DP; only for graphs on <= 24 vertices.
inline u64 matching_dp_size(const Graph& g) {
  if (g.n > 24)
    throw std::invalid_argument("matching dp: more than 24 vertices");
  if (g.n == 0) return 0;
  std::vector<u32> nb(g.n, 0);
  for (auto& [u, v] : g.edges) {
    if (u >= g.n || v >= g.n || u == v)
      throw std::invalid_argument("matching: bad edge");
    nb[u] |= 1u << v;
    nb[v] |= 1u << u;
  }
  std::vector<u8> best(std::size_t(1) << g.n, 0);
  for (u32 mask = 1; mask < (1u << g.n); ++mask) {
    u32 v = (u32)std::countr_zero(mask);
    u32 rest = mask ^ (1u << v);
    u8 b = best[rest];  // v left unmatched
    u32 cand = nb[v] & rest;
    while (cand) {
      u32 u = (u32)std::countr_zero(cand);
      cand &= cand - 1;
      u8 t = (u8)(1 + best[rest ^ (1u << u)]);
      if (t > b) b = t;
    }
    best[mask] = b;
  }
  return (u64)best[(std::size_t(1) << g.n) - 1];
}

// Maximal matching in edge order; the optimum is at most twice its size.
inline std::vector<std::pair<u32, u32>> greedy_matching(const Graph& g) {
  std::vector<u8> used(g.n, 0);
  std::vector<std::pair<u32, u32>> out;
  for (auto& [u, v] : g.edges) {
    if (u >= g.n || v >= g.n || u == v)
      throw std::invalid_argument("matching: bad edge");
    if (used[u] || used[v]) continue;
    used[u] = used[v] = 1;
    out.push_back({std::min(u, v), std::max(u, v)});
  }
  return out;
}

struct MatchingBound {
  u64 lower = 0;
  u64 upper = 0;
  bool exact = false;
};

// Exact on <= 24 vertices, otherwise the greedy two-sided bracket.
inline MatchingBound matching_oracle(const Graph& g) {
  if (g.n <= 24) {
    u64 mu = matching_dp_size(g);
    return {mu, mu, true};
  }
  u64 sz = greedy_matching(g).size();
  return {sz, 2 * sz, false};
}

struct MatchVerdict {
  bool disjoint = true;
  bool edges_present = true;
  u32 repeated_vertex = 0;                 // set when !disjoint
  std::pair<u32, u32> missing_edge = {0, 0};  // set when !edges_present
  bool ok() const { return disjoint && edges_present; }
};

// Vertex-disjointness is checked unconditionally; membership in E against
// the harness's dense graph.
inline MatchVerdict validate_matching(const std::vector<std::pair<u32, u32>>& m,
                                      const Graph& g) {
  MatchVerdict verdict;
  std::unordered_set<u64> in_e;
  in_e.reserve(g.edges.size() * 2);
  for (auto& [u, v] : g.edges) in_e.insert(edge_index(u, v, g.n));
  std::vector<u8> seen(g.n, 0);
  for (auto [a, b] : m) {
    if (a > b) std::swap(a, b);
    if (b >= g.n || a == b || !in_e.count(edge_index(a, b, g.n))) {
      if (verdict.edges_present) {
        verdict.edges_present = false;
        verdict.missing_edge = {a, b};
      }
      if (b >= g.n) continue;  // cannot mark out-of-range endpoints
    }
    for (u32 x : {a, b}) {
      if (seen[x] && verdict.disjoint) {
        verdict.disjoint = false;
        verdict.repeated_vertex = x;
      }
      seen[x] = 1;
    }
  }
  return verdict;
}

}  // namespace gsketch
