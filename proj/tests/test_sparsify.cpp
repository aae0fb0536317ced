#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "gsketch/sparsify.hpp"

using namespace gsketch;

namespace {

SparsifyParams cell_a() {
  SparsifyParams p;
  p.k = 12;
  p.d_f = 4;
  p.a = 64;
  p.btilde = 4;
  p.c = 5;
  p.tester_scale = 0.04;
  return p;
}

SparsifyParams cell_b() {
  SparsifyParams p;
  p.k = 6;
  p.d_f = 2;
  p.a = 32;
  p.btilde = 2;
  p.c = 5;
  p.tester_scale = 0.005;
  return p;
}

// disjoint pairs over vertices sharing no group with any avoided vertex;
// keeps the avoided vertices' groups alive through the matched-test while
// filling the neighbor sets T the tester and the recovery are calibrated for
std::vector<std::pair<u32, u32>> easy_pairs(const SparsifySketch& sk,
                                            const std::vector<u32>& avoid,
                                            u64 cap) {
  std::set<u32> bad_groups, avoid_set(avoid.begin(), avoid.end());
  for (u32 v : avoid)
    for (u32 g : sk.groups_of(v)) bad_groups.insert(g);
  std::vector<u32> r;
  for (u32 v = 0; v < sk.n(); ++v) {
    if (avoid_set.count(v)) continue;
    bool ok = true;
    for (u32 g : sk.groups_of(v))
      if (bad_groups.count(g)) {
        ok = false;
        break;
      }
    if (ok) r.push_back(v);
  }
  std::vector<std::pair<u32, u32>> m;
  for (size_t i = 0; i + 1 < r.size() && m.size() < cap; i += 2)
    m.push_back({r[i], r[i + 1]});
  return m;
}

}  // namespace

TEST_CASE("circulant wiring is symmetric, irreflexive and regular",
          "[sparsify]") {
  RegularGraph cyc(6, 2);
  for (u32 i = 0; i < 6; ++i)
    CHECK(cyc.neighbors(i) ==
          std::vector<u32>{std::min((i + 1) % 6, (i + 5) % 6),
                           std::max((i + 1) % 6, (i + 5) % 6)});

  RegularGraph odd6(6, 3);
  CHECK(odd6.neighbors(0) == std::vector<u32>{1, 3, 5});
  CHECK(odd6.neighbors(2) == std::vector<u32>{1, 3, 5});
  CHECK(odd6.adjacent(0, 3));
  CHECK_FALSE(odd6.adjacent(0, 2));

  RegularGraph r84(8, 4);
  CHECK(r84.neighbors(0) == std::vector<u32>{1, 2, 6, 7});
  u64 degree_sum = 0;
  for (u32 i = 0; i < 8; ++i) degree_sum += r84.neighbors(i).size();
  CHECK(degree_sum == 32);

  for (u32 k = 4; k <= 16; ++k)
    for (u32 d = 1; d < k; ++d) {
      if ((d & 1u) && (k & 1u)) {
        CHECK_THROWS_AS(RegularGraph(k, d), std::invalid_argument);
        continue;
      }
      RegularGraph g(k, d);
      for (u32 i = 0; i < k; ++i) {
        auto nb = g.neighbors(i);
        CHECK(nb.size() == d);
        CHECK_FALSE(g.adjacent(i, i));
        for (u32 j = 0; j < k; ++j) {
          bool listed = std::find(nb.begin(), nb.end(), j) != nb.end();
          CHECK(g.adjacent(i, j) == listed);
          CHECK(g.adjacent(i, j) == g.adjacent(j, i));
        }
      }
    }

  CHECK_THROWS_AS(RegularGraph(6, 6), std::invalid_argument);
  CHECK_THROWS_AS(RegularGraph(6, 0), std::invalid_argument);
}

TEST_CASE("canonical parameters and the regime gate", "[sparsify]") {
  SparsifyParams p = SparsifyParams::canonical(4096, 2048, 4.0, 0.5);
  CHECK(p.k == 5120);
  CHECK(p.d_f == 1280);
  CHECK(p.a == 256);
  CHECK(p.btilde == 3);
  CHECK(p.c == 60);
  // a = 256 < 200 * btilde = 600: this scale cannot honor the sub-sketch
  // promises, so the canonical constructor must refuse it
  CHECK_THROWS_AS(p.check_promise(), promise_regime_error);
  CHECK_THROWS_WITH(SparsifySketch(4096, 2048, 4.0, 0.5, 1),
                    Catch::Matchers::ContainsSubstring(
                        "PROMISE_REGIME_UNREACHABLE"));

  SparsifyParams ok = SparsifyParams::canonical(4096, 2048, 2.0, 0.5);
  CHECK(ok.k == 10240);
  CHECK(ok.d_f == 5120);
  CHECK(ok.a == 1024);
  CHECK(ok.btilde == 3);
  CHECK_NOTHROW(ok.check_promise());

  CHECK_THROWS_AS(SparsifyParams::canonical(4096, 0, 2.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(SparsifyParams::canonical(4096, 16, 1.0, 0.5),
                  std::invalid_argument);

  CHECK(amplification_copies(0.5) == 120);
  CHECK(amplification_copies(1.0) == 60);
  CHECK_THROWS_AS(amplification_copies(0.0), std::invalid_argument);
}

TEST_CASE("updates fan out exactly to the wired groups", "[sparsify]") {
  SparsifySketch sk(256, cell_b(), 4242);
  SparsifySketch clone(256, cell_b(), 4242);

  // brute-force the membership-and-wiring predicate against touched_groups
  Rng gen(99);
  for (int t = 0; t < 300; ++t) {
    u32 u = (u32)gen.next_below(256), v = (u32)gen.next_below(256);
    if (u == v) continue;
    std::vector<u32> expect;
    for (u32 i = 0; i < 6; ++i) {
      bool touch = false;
      for (u32 x : {u, v}) {
        u32 y = (x == u) ? v : u;
        if (!sk.in_group(i, x)) continue;
        for (u32 j = 0; j < 6; ++j)
          if (sk.in_group(j, y) && sk.wiring().adjacent(i, j)) touch = true;
      }
      if (touch) expect.push_back(i);
    }
    CHECK(sk.touched_groups(u, v) == expect);
  }

  // a vertex outside every group: edges at it touch nothing
  u32 loner = 256;
  for (u32 v = 0; v < 256; ++v)
    if (sk.groups_of(v).empty()) {
      loner = v;
      break;
    }
  REQUIRE(loner < 256);
  u32 other = loner == 0 ? 1 : 0;
  CHECK(sk.touched_groups(loner, other).empty() ==
        sk.touched_groups(other, loner).empty());
  if (sk.touched_groups(loner, other).empty()) {
    sk.feed(make_update(loner, other, +1));
    CHECK(sk.state_equal(clone));
  }

  // group listings agree with the per-vertex index
  for (u32 i = 0; i < 6; ++i)
    for (u32 v : sk.group(i)) CHECK(sk.in_group(i, v));
}

TEST_CASE("planted cross-group edge is rebuilt and matched", "[sparsify]") {
  // frozen master: vertex 10 lands in groups {1,11}, vertex 200 in {2}, and
  // wiring joins 1-2, so the lone planted edge must come back exactly
  SparsifySketch sk(256, cell_a(), derive_seed(7, 17));
  CHECK(sk.groups_of(10) == std::vector<u32>{1, 11});
  CHECK(sk.groups_of(200) == std::vector<u32>{2});
  REQUIRE(sk.wiring().adjacent(1, 2));

  sk.feed(make_update(10, 200, +1));
  auto me = easy_pairs(sk, {10, 200}, 45);
  REQUIRE(me.size() == 45);
  auto r = sk.recover(me);

  REQUIRE(r.rebuilt == std::vector<std::pair<u32, u32>>{{10, 200}});
  REQUIRE(r.matching == std::vector<std::pair<u32, u32>>{{10, 200}});
  CHECK(r.fate[1] == GroupFate::kSurvivor);
  CHECK(r.fate[2] == GroupFate::kSurvivor);

  // T handed to the survivors: matched vertices living in wired neighbor
  // groups, nothing else
  std::set<u32> matched;
  for (auto& [x, y] : me) {
    matched.insert(x);
    matched.insert(y);
  }
  for (u32 i : {1u, 2u}) {
    CHECK(r.t_sets[i].size() >= 10);
    for (u32 w : r.t_sets[i]) {
      CHECK(matched.count(w));
      bool wired = false;
      for (u32 g : sk.groups_of(w)) wired |= sk.wiring().adjacent(i, g);
      CHECK(wired);
    }
    for (u32 w : matched) {
      bool wired = false;
      for (u32 g : sk.groups_of(w)) wired |= sk.wiring().adjacent(i, g);
      bool listed = std::binary_search(r.t_sets[i].begin(), r.t_sets[i].end(), w);
      CHECK(listed == wired);
    }
  }
}

TEST_CASE("matched groups are dropped first, expanding groups second",
          "[sparsify]") {
  // frozen master: vertex 77 sits in group 4 only, which gets 12 stray
  // cross-edges; the tester must flag it
  SparsifySketch sk(256, cell_a(), derive_seed(3, 23));
  REQUIRE(sk.groups_of(77) == std::vector<u32>{4});
  std::vector<u32> strays;
  for (u32 j : sk.wiring().neighbors(4))
    for (u32 w : sk.group(j))
      if (w != 77) strays.push_back(w);
  std::sort(strays.begin(), strays.end());
  strays.erase(std::unique(strays.begin(), strays.end()), strays.end());
  REQUIRE(strays.size() >= 12);
  strays.resize(12);
  for (u32 w : strays) sk.feed(make_update(77, w, +1));

  std::vector<u32> avoid = strays;
  avoid.push_back(77);
  auto me = easy_pairs(sk, avoid, 45);
  auto r = sk.recover(me);
  CHECK(r.fate[4] == GroupFate::kRemovedExpanding);
  for (auto& [x, y] : r.rebuilt) {
    CHECK(x != 77);
    CHECK(y != 77);
  }

  // when the group also holds a matched vertex, the cheaper test wins
  u32 partner = 256;
  for (u32 q = 0; q < 256 && partner == 256; ++q) {
    if (q == 77) continue;
    bool used = false;
    for (auto& pr : me) used |= (pr.first == q || pr.second == q);
    for (u32 w : strays) used |= (w == q);
    if (!used) partner = q;
  }
  REQUIRE(partner < 256);
  auto me2 = me;
  me2.push_back({77, partner});
  auto r2 = sk.recover(me2);
  CHECK(r2.fate[4] == GroupFate::kRemovedMatched);

  // an easy matching touching every populated group removes them all
  std::vector<std::pair<u32, u32>> cover;
  std::set<u32> used;
  std::vector<u32> reps;
  for (u32 i = 0; i < 12; ++i)
    for (u32 v : sk.group(i))
      if (!used.count(v)) {
        used.insert(v);
        reps.push_back(v);
        break;
      }
  for (size_t i = 0; i + 1 < reps.size(); i += 2)
    cover.push_back({reps[i], reps[i + 1]});
  if (reps.size() & 1) {
    u32 spare = 0;
    while (used.count(spare)) ++spare;
    cover.push_back({reps.back(), spare});
  }
  auto r3 = sk.recover(cover);
  CHECK(r3.matching.empty());
  CHECK(r3.rebuilt.empty());
  for (u32 i = 0; i < 12; ++i)
    if (!sk.group(i).empty())
      CHECK(r3.fate[i] == GroupFate::kRemovedMatched);
}

TEST_CASE("independent copies only improve the planted hit rate",
          "[sparsify]") {
  u64 hits[3] = {0, 0, 0};
  const u64 masters = 60;
  for (u64 m = 1; m <= masters; ++m) {
    Rng pick(derive_seed(m, 0xEDu));
    std::vector<u32> vs;
    while (vs.size() < 6) {
      u32 v = (u32)pick.next_below(256);
      bool dup = false;
      for (u32 w : vs) dup |= (w == v);
      if (!dup) vs.push_back(v);
    }
    bool best = false;
    for (u64 c = 0; c < 3; ++c) {
      SparsifySketch sk(256, cell_a(), derive_seed(m, 0xC0u + c));
      for (int e = 0; e < 3; ++e)
        sk.feed(make_update(vs[2 * e], vs[2 * e + 1], +1));
      best = best || !sk.recover(easy_pairs(sk, vs, 45)).matching.empty();
      hits[c] += best;
    }
  }
  CHECK(hits[0] <= hits[1]);
  CHECK(hits[1] <= hits[2]);
  CHECK(hits[0] == 15);
  CHECK(hits[1] == 25);
  CHECK(hits[2] == 39);
}

TEST_CASE("rebuilt edges always exist in the net graph", "[sparsify]") {
  u64 edges_out = 0, runs_with_output = 0;
  for (u64 m = 0; m < 800; ++m) {
    SparsifySketch sk(256, cell_a(), derive_seed(m, 0x60u));
    Rng gen(derive_seed(m, 0x61u));
    std::vector<u32> vs;
    while (vs.size() < 6) {
      u32 v = (u32)gen.next_below(256);
      bool dup = false;
      for (u32 w : vs) dup |= (w == v);
      if (!dup) vs.push_back(v);
    }
    std::set<std::pair<u32, u32>> planted;
    for (int e = 0; e < 3; ++e)
      planted.insert({std::min(vs[2 * e], vs[2 * e + 1]),
                      std::max(vs[2 * e], vs[2 * e + 1])});
    std::set<std::pair<u32, u32>> noise;
    while (noise.size() < 30) {
      u32 u = (u32)gen.next_below(256), v = (u32)gen.next_below(256);
      if (u == v) continue;
      auto e = std::make_pair(std::min(u, v), std::max(u, v));
      if (!planted.count(e)) noise.insert(e);
    }
    std::set<std::pair<u32, u32>> net;
    for (auto& e : planted) {
      sk.feed(make_update(e.first, e.second, +1));
      net.insert(e);
    }
    std::vector<std::pair<u32, u32>> nl(noise.begin(), noise.end());
    for (auto& e : nl) {
      sk.feed(make_update(e.first, e.second, +1));
      net.insert(e);
    }
    for (int d = 0; d < 12; ++d) {
      auto& e = nl[gen.next_below(nl.size())];
      if (net.count(e)) {
        net.erase(e);
        sk.feed(make_update(e.first, e.second, -1));
      }
    }
    auto r = sk.recover(easy_pairs(sk, vs, 45));
    runs_with_output += !r.matching.empty();
    for (auto& e : r.matching) {
      ++edges_out;
      CHECK(net.count(e) == 1);
    }
    for (auto& e : r.rebuilt) CHECK(net.count(e) == 1);
  }
  CHECK(edges_out == 148);
  CHECK(runs_with_output == 144);

  // pure noise with a scattered easy matching never reconstructs garbage
  for (u64 m = 0; m < 200; ++m) {
    SparsifySketch sk(256, cell_b(), derive_seed(m, 0x70u));
    Rng gen(derive_seed(m, 0x71u));
    std::set<std::pair<u32, u32>> net;
    while (net.size() < 40) {
      u32 u = (u32)gen.next_below(256), v = (u32)gen.next_below(256);
      if (u == v) continue;
      net.insert({std::min(u, v), std::max(u, v)});
    }
    std::vector<std::pair<u32, u32>> bl(net.begin(), net.end());
    for (auto& e : bl) sk.feed(make_update(e.first, e.second, +1));
    for (int d = 0; d < 10; ++d) {
      auto& e = bl[gen.next_below(bl.size())];
      if (net.count(e)) {
        net.erase(e);
        sk.feed(make_update(e.first, e.second, -1));
      }
    }
    std::vector<u32> perm(256);
    for (u32 v = 0; v < 256; ++v) perm[v] = v;
    for (u32 v = 255; v > 0; --v) std::swap(perm[v], perm[gen.next_below(v + 1)]);
    std::vector<std::pair<u32, u32>> me;
    for (u32 i = 0; i < 12; i += 2) me.push_back({perm[i], perm[i + 1]});
    auto r = sk.recover(me);
    for (auto& e : r.matching) CHECK(net.count(e) == 1);
    for (auto& e : r.rebuilt) CHECK(net.count(e) == 1);
  }
}

TEST_CASE("group sketches are linear under merge", "[sparsify]") {
  SparsifySketch whole(256, cell_b(), 31);
  SparsifySketch lhs(256, cell_b(), 31);
  SparsifySketch rhs(256, cell_b(), 31);
  Rng gen(77);
  for (int i = 0; i < 150; ++i) {
    u32 u = (u32)gen.next_below(256), v = (u32)gen.next_below(256);
    if (u == v) continue;
    StreamUpdate up = make_update(u, v, i % 5 == 4 ? -1 : +1);
    whole.feed(up);
    (i % 2 ? lhs : rhs).feed(up);
  }
  CHECK_FALSE(lhs.state_equal(whole));
  lhs.merge(rhs);
  CHECK(lhs.state_equal(whole));

  SparsifySketch other(256, cell_b(), 32);
  CHECK_THROWS_AS(lhs.merge(other), std::invalid_argument);
}

TEST_CASE("meter equals its parts plus the group hashes", "[sparsify]") {
  SparsifyParams p = cell_b();
  SparsifySketch sk(256, p, 555);
  BitMeter ref;
  for (u32 i = 0; i < p.k; ++i) {
    if (sk.group(i).empty()) continue;
    SNRecoverySketch snr(256, sk.group(i), p.a, 2 * p.btilde, p.c,
                         derive_seed(555, 0x736eu, i), "sparsify-555");
    NETester tst(256, sk.group(i), p.a, p.btilde,
                 derive_seed(555, 0x6e74u, i), p.tester_scale);
    ref += snr.measure();
    ref += tst.measure();
  }
  // 64 hash coefficients per group drawn below the prime 257
  ref.randomness_bits += u64(p.k) * 64 * bits_for(257);

  BitMeter got = sk.measure();
  CHECK(got.sketch_bits == ref.sketch_bits);
  CHECK(got.randomness_bits == ref.randomness_bits);
  CHECK(got.shared == ref.shared);
  CHECK(got.shared.count("snr-randomness/sparsify-555") == 1);
}

TEST_CASE("recovery validates the easy matching", "[sparsify]") {
  SparsifySketch sk(256, cell_b(), 8);
  CHECK_THROWS_AS(sk.recover({{5, 5}}), std::invalid_argument);
  CHECK_THROWS_AS(sk.recover({{5, 256}}), std::invalid_argument);
  CHECK_THROWS_AS(sk.recover({{5, 6}, {6, 7}}), std::invalid_argument);
}
