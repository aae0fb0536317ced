#pragma once

// Dynamic graph stream model: signed edge updates over a fixed vertex set
// [0, n), the lexicographic edge <-> index bijection, the text stream format,
// and the LinearSketch concept the whole toolkit is built around.
//
// Stream text format:
//   n <vertices>        header, required first directive
//   + u v               insert edge {u, v}
//   - u v               delete edge {u, v}
//   # ...               comment; blank lines ignored
//
// The net multiplicity of every edge must stay in {0, 1} over any prefix for
// the graph semantics to be meaningful; sketches themselves never assume it
// (they are linear over Z or F_q), the harness checks it where it matters.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gsketch/bit_meter.hpp"
#include "gsketch/util.hpp"

namespace gsketch {

struct StreamUpdate {
  u32 u = 0;
  u32 v = 0;
  i32 delta = 0;  // +1 insert, -1 delete
};

// Canonical form keeps u < v; updates are unordered edges.
inline StreamUpdate make_update(u32 a, u32 b, i32 delta) {
  if (a == b) throw std::invalid_argument("stream update: self-loop");
  if (a > b) std::swap(a, b);
  return StreamUpdate{a, b, delta};
}

constexpr u64 num_edge_slots(u64 n) { return n * (n - 1) / 2; }

// Lexicographic rank of the pair (u, v), u < v, among all pairs over [0, n):
// (0,1) -> 0, (0,2) -> 1, ..., (n-2, n-1) -> C(n,2)-1.
constexpr u64 edge_index(u64 u, u64 v, u64 n) {
  if (u > v) {
    u64 t = u;
    u = v;
    v = t;
  }
  return u * (2 * n - u - 1) / 2 + (v - u - 1);
}

// Inverse of edge_index.
inline std::pair<u32, u32> edge_unindex(u64 idx, u64 n) {
  // first coordinate u satisfies offset(u) <= idx < offset(u+1)
  // with offset(u) = u*(2n-u-1)/2; solve the quadratic, then correct.
  double nn = static_cast<double>(2 * n - 1);
  double disc = nn * nn - 8.0 * static_cast<double>(idx);
  if (disc < 0) disc = 0;
  u64 u = static_cast<u64>((nn - std::sqrt(disc)) / 2.0);
  if (u > 0 && u * (2 * n - u - 1) / 2 > idx) --u;
  while (u + 1 < n && (u + 1) * (2 * n - (u + 1) - 1) / 2 <= idx) ++u;
  u64 v = idx - u * (2 * n - u - 1) / 2 + u + 1;
  return {static_cast<u32>(u), static_cast<u32>(v)};
}

// ------------------------------------------------------------ text format --

struct StreamFile {
  u32 n = 0;
  std::vector<StreamUpdate> updates;
};

inline StreamFile parse_stream(std::istream& in) {
  StreamFile out;
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t h = line.find('#');
    if (h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank
    auto fail = [&](const char* why) {
      throw std::runtime_error("stream parse error at line " + std::to_string(lineno) + ": " + why);
    };
    if (tok == "n") {
      u64 n;
      if (have_header) fail("duplicate header");
      if (!(ls >> n) || n < 2 || n > (1u << 24)) fail("bad vertex count");
      out.n = static_cast<u32>(n);
      have_header = true;
    } else if (tok == "+" || tok == "-") {
      if (!have_header) fail("update before header");
      u64 a, b;
      if (!(ls >> a >> b)) fail("expected two vertex ids");
      if (a >= out.n || b >= out.n) fail("vertex id out of range");
      if (a == b) fail("self-loop");
      out.updates.push_back(make_update(static_cast<u32>(a), static_cast<u32>(b), tok == "+" ? 1 : -1));
    } else {
      fail("unknown directive");
    }
    std::string rest;
    if (ls >> rest) fail("trailing tokens");
  }
  if (!have_header) throw std::runtime_error("stream parse error: missing 'n' header");
  return out;
}

inline void write_stream(std::ostream& os, const StreamFile& sf) {
  os << "n " << sf.n << "\n";
  for (const auto& up : sf.updates)
    os << (up.delta > 0 ? '+' : '-') << ' ' << up.u << ' ' << up.v << "\n";
}

// ------------------------------------------------------------- net graph --

struct Graph {
  u32 n = 0;
  std::vector<std::pair<u32, u32>> edges;  // u < v, no duplicates
};

// Accumulates net multiplicities; throws if any prefix leaves a multiplicity
// outside {0, 1} (harness-side well-formedness check).
inline Graph net_graph(const StreamFile& sf) {
  std::vector<std::pair<u64, i32>> mult;  // (edge index, running multiplicity)
  mult.reserve(sf.updates.size());
  std::vector<u64> idx(sf.updates.size());
  for (std::size_t i = 0; i < sf.updates.size(); ++i)
    idx[i] = edge_index(sf.updates[i].u, sf.updates[i].v, sf.n);
  // small-domain streams: use a hash map keyed by edge index
  std::unordered_map<u64, i32> net;
  net.reserve(sf.updates.size() * 2);
  for (std::size_t i = 0; i < sf.updates.size(); ++i) {
    i32& m = net[idx[i]];
    m += sf.updates[i].delta;
    if (m < 0 || m > 1)
      throw std::runtime_error("stream is ill-formed: edge multiplicity left {0,1}");
  }
  Graph g;
  g.n = sf.n;
  for (const auto& [e, m] : net)
    if (m == 1) {
      auto [u, v] = edge_unindex(e, sf.n);
      g.edges.emplace_back(u, v);
    }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

// ------------------------------------------------------- sketch concept --

template <typename S>
concept LinearSketch = requires(S s, const S cs, const StreamUpdate& up) {
  s.feed(up);
  s.merge(cs);
  { cs.measure() } -> std::same_as<BitMeter>;
};

template <LinearSketch S>
void feed_all(S& sketch, const std::vector<StreamUpdate>& updates) {
  for (const auto& up : updates) sketch.feed(up);
}

}  // namespace gsketch
