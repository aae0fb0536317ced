// Neighborhood counter and sampler. Deterministic guarantees first (support
// sizes 0 and 1, single-neighbor recovery), then statistical bounds with
// fixed master seeds so runs are reproducible.

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <vector>

#include "gsketch/ne_counter.hpp"
#include "gsketch/ne_sampler.hpp"
#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

using namespace gsketch;

TEST_CASE("vector counter: empty support is never One") {
  for (u64 seed = 0; seed < 100; ++seed) {
    NEVectorCounter c(256, 1.0 / 1024, seed);
    REQUIRE(!c.one());
    c.feed_index(3, 2);
    c.feed_index(3, -2);
    REQUIRE(!c.one());
    REQUIRE(c.is_zero());
  }
}

TEST_CASE("vector counter: singleton support is One for every seed") {
  for (u64 seed = 0; seed < 500; ++seed) {
    NEVectorCounter c(256, 1.0 / 1024, seed);
    u64 w = Rng(seed).next_below(256);
    c.feed_index(w, 1 + static_cast<i64>(seed % 5));
    REQUIRE(c.one());
  }
}

TEST_CASE("vector counter: two-coordinate supports rarely fool it") {
  const double delta = 1.0 / 64;
  const int trials = 2000;
  int false_one = 0;
  Rng rng(808);
  for (int t = 0; t < trials; ++t) {
    NEVectorCounter c(256, delta, rng.next());
    u64 a = rng.next_below(256), b = rng.next_below(256);
    while (b == a) b = rng.next_below(256);
    c.feed_index(a, 1);
    c.feed_index(b, 1);
    if (c.one()) ++false_one;
  }
  REQUIRE(false_one <= static_cast<int>(2 * delta * trials));
}

TEST_CASE("vector counter: linearity and merge") {
  Rng rng(909);
  for (int t = 0; t < 40; ++t) {
    u64 seed = rng.next();
    NEVectorCounter whole(128, 1.0 / 256, seed), left(128, 1.0 / 256, seed),
        right(128, 1.0 / 256, seed);
    for (int i = 0; i < 100; ++i) {
      u64 w = rng.next_below(128);
      i64 d = rng.next_below(2) ? 1 : -1;
      whole.feed_index(w, d);
      (i % 2 ? left : right).feed_index(w, d);
    }
    left.merge(right);
    REQUIRE(whole.state_equal(left));
  }
}

TEST_CASE("graph counter: exact on unique-neighbor and empty configurations") {
  // S = {0,1}, T = {4,5}; tiny error budget makes >=2 cases exact too
  const double delta = 1.0 / (1 << 20);
  for (u64 seed = 0; seed < 200; ++seed) {
    NECounter c(8, {0, 1}, {4, 5}, delta, seed);
    REQUIRE(!c.one());                   // no edges at all
    c.feed(make_update(0, 4, 1));
    REQUIRE(c.one());                    // N(S) cap T = {4}
    c.feed(make_update(1, 4, 1));
    REQUIRE(c.one());                    // still just {4}, multiplicity 2
    c.feed(make_update(1, 5, 1));
    REQUIRE(!c.one());                   // {4,5}: caught at this error rate
    c.feed(make_update(1, 5, -1));
    REQUIRE(c.one());                    // deletion restores {4}
    c.feed(make_update(0, 4, -1));
    c.feed(make_update(1, 4, -1));
    REQUIRE(!c.one());                   // back to empty
  }
}

TEST_CASE("graph counter: only S-to-T edges are visible") {
  NECounter c(10, {0, 1}, {4, 5}, 1.0 / 1024, 3);
  c.feed(make_update(0, 1, 1));  // inside S
  c.feed(make_update(6, 7, 1));  // outside S entirely
  c.feed(make_update(2, 4, 1));  // into T but not from S
  c.feed(make_update(0, 8, 1));  // from S but outside T
  REQUIRE(c.state_equal(NECounter(10, {0, 1}, {4, 5}, 1.0 / 1024, 3)));
}

TEST_CASE("neighborhood sampler: unique neighbor is found, every seed") {
  for (u64 seed = 0; seed < 200; ++seed) {
    NESampler s(16, {3}, seed);
    s.feed(make_update(3, 7, 1));
    auto r = s.query();
    REQUIRE(r.kind == NEQueryResult::Kind::Sample);
    REQUIRE(r.s_vertex == 3);
    REQUIRE(r.neighbor == 7);
    REQUIRE(r.value == 1);
  }
}

TEST_CASE("neighborhood sampler: deletions retarget the sample") {
  for (u64 seed = 0; seed < 100; ++seed) {
    NESampler s(16, {3}, seed);
    s.feed(make_update(3, 7, 1));
    s.feed(make_update(3, 9, 1));
    s.feed(make_update(3, 7, -1));
    auto r = s.query();
    REQUIRE(r.kind == NEQueryResult::Kind::Sample);
    REQUIRE(r.neighbor == 9);
  }
}

TEST_CASE("neighborhood sampler: empty neighborhood fails cleanly") {
  NESampler s(16, {3, 4}, 11);
  REQUIRE(s.query().kind == NEQueryResult::Kind::Fail);
  s.feed(make_update(3, 4, 1));   // S-internal edge is not a neighbor
  s.feed(make_update(8, 9, 1));   // nor is a far-away edge
  REQUIRE(s.query().kind == NEQueryResult::Kind::Fail);
}

TEST_CASE("neighborhood sampler: samples are always real S-crossing edges") {
  Rng rng(4242);
  for (int t = 0; t < 300; ++t) {
    NESampler s(64, {0, 1, 2, 3}, rng.next());
    std::set<std::pair<u32, u32>> edges;
    for (int i = 0; i < 40; ++i) {
      u32 u = static_cast<u32>(rng.next_below(64));
      u32 v = static_cast<u32>(rng.next_below(64));
      if (u == v) continue;
      auto up = make_update(u, v, 1);
      if (edges.insert({up.u, up.v}).second) s.feed(up);
    }
    auto r = s.query();
    if (r.kind != NEQueryResult::Kind::Sample) continue;
    REQUIRE(r.s_vertex <= 3);
    REQUIRE(r.neighbor > 3);
    u32 a = std::min(r.s_vertex, r.neighbor), b = std::max(r.s_vertex, r.neighbor);
    REQUIRE(edges.count({a, b}) == 1);
    REQUIRE(r.value == 1);
  }
}

TEST_CASE("neighborhood sampler: failure stays rare on small neighborhoods") {
  Rng rng(31337);
  int fails = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    NESampler s(64, {10}, rng.next());
    for (u32 w : {20u, 21u, 22u, 23u, 24u}) s.feed(make_update(10, w, 1));
    if (s.query().kind == NEQueryResult::Kind::Fail) ++fails;
  }
  REQUIRE(fails <= trials / 100 + 10);
}

TEST_CASE("neighborhood sampler: linear in feeds and merges") {
  Rng rng(616);
  for (int t = 0; t < 15; ++t) {
    u64 seed = rng.next();
    NESampler whole(32, {0, 5}, seed), left(32, {0, 5}, seed), right(32, {0, 5}, seed);
    std::vector<StreamUpdate> ups;
    std::set<std::pair<u32, u32>> present;
    for (int i = 0; i < 60; ++i) {
      u32 u = static_cast<u32>(rng.next_below(32));
      u32 v = static_cast<u32>(rng.next_below(32));
      if (u == v) continue;
      auto e = std::make_pair(std::min(u, v), std::max(u, v));
      if (present.count(e)) {
        present.erase(e);
        ups.push_back(make_update(u, v, -1));
      } else {
        present.insert(e);
        ups.push_back(make_update(u, v, 1));
      }
    }
    for (const auto& up : ups) whole.feed(up);
    for (std::size_t i = 0; i < ups.size(); ++i) (i % 2 ? left : right).feed(ups[i]);
    left.merge(right);
    REQUIRE(whole.state_equal(left));
    REQUIRE(whole.query().kind == left.query().kind);
  }
}

TEST_CASE("neighborhood sampler: meter reports the declared schedule") {
  NESampler s(256, {0}, 1);
  REQUIRE(s.levels() == 17);  // 2*log2(256) + 1
  BitMeter bm = s.measure();
  u64 edge_domain = 256ull * 255 / 2;
  double de = std::pow(256.0, -10.0);
  u64 per_l0 = L0Sampler::declared_sketch_bits(edge_domain, 1.0 / 100, de);
  u64 per_cnt = NEVectorCounter::declared_sketch_bits(256, de);
  REQUIRE(bm.sketch_bits == 50 * 17 * (per_l0 + per_cnt));
  REQUIRE(bm.randomness_bits > 0);
  REQUIRE(bm.shared.count("fingerprint-basis/" + std::to_string(edge_domain)) == 1);
}

TEST_CASE("neighborhood sampler: returned edges exist in the net graph") {
  // a million fresh-seed trials on small random nets, zero tolerance
  Rng rng(0xedull);
  long viol = 0;
  for (long t = 0; t < 1000000; ++t) {
    NESampler sm(256, {0, 1}, rng.next());
    std::set<u64> present;
    u32 deg = 1 + static_cast<u32>(rng.next_below(5));
    for (u32 i = 0; i < deg; ++i) {
      u32 s = static_cast<u32>(rng.next_below(2));
      u32 v = 2 + static_cast<u32>(rng.next_below(254));
      sm.feed(make_update(s, v, 1));
      present.insert(edge_index(s, v, 256));
    }
    // a couple of edges outside S the sampler has to ignore
    sm.feed(make_update(100, 101, 1));
    sm.feed(make_update(102, 103, 1));
    present.insert(edge_index(100, 101, 256));
    present.insert(edge_index(102, 103, 256));
    auto r = sm.query();
    if (r.kind != NEQueryResult::Kind::Sample) continue;
    u32 a = std::min(r.s_vertex, r.neighbor), b = std::max(r.s_vertex, r.neighbor);
    if (present.count(edge_index(a, b, 256)) == 0) ++viol;
  }
  REQUIRE(viol == 0);
}
