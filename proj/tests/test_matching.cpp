#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "gsketch/matching.hpp"

using namespace gsketch;

namespace {

Graph random_graph(u32 n, u32 permille, u64 seed) {
  Graph g;
  g.n = n;
  Rng rng(seed);
  for (u32 u = 0; u < n; ++u)
    for (u32 v = u + 1; v < n; ++v)
      if (rng.next_below(1000) < permille) g.edges.push_back({u, v});
  return g;
}

}  // namespace

TEST_CASE("perfect matching on eight vertices has size four", "[matching]") {
  Graph g;
  g.n = 8;
  for (u32 i = 0; i < 4; ++i) g.edges.push_back({2 * i, 2 * i + 1});
  CHECK(max_matching_small(g).size() == 4);
  CHECK(matching_dp_size(g) == 4);
  auto b = matching_oracle(g);
  CHECK(b.exact);
  CHECK(b.lower == 4);
  CHECK(b.upper == 4);
}

TEST_CASE("complete graph on five vertices has matching number two",
          "[matching]") {
  Graph g;
  g.n = 5;
  for (u32 u = 0; u < 5; ++u)
    for (u32 v = u + 1; v < 5; ++v) g.edges.push_back({u, v});
  CHECK(max_matching_small(g).size() == 2);
  CHECK(matching_dp_size(g) == 2);
}

TEST_CASE("classic odd structures need contraction", "[matching]") {
  Graph c5;  // five-cycle
  c5.n = 5;
  c5.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}};
  CHECK(max_matching_small(c5).size() == 2);
  CHECK(matching_dp_size(c5) == 2);

  Graph petersen;
  petersen.n = 10;
  petersen.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4},
                    {0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9},
                    {5, 7}, {7, 9}, {6, 9}, {6, 8}, {5, 8}};
  CHECK(max_matching_small(petersen).size() == 5);
  CHECK(matching_dp_size(petersen) == 5);

  Graph bowtie;  // two triangles sharing vertex 2
  bowtie.n = 5;
  bowtie.edges = {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}};
  CHECK(max_matching_small(bowtie).size() == 2);
  CHECK(matching_dp_size(bowtie) == 2);
}

TEST_CASE("augmenting search agrees with subset DP on random graphs",
          "[matching]") {
  for (u64 inst = 0; inst < 100; ++inst) {
    u32 permille = 100 + 40 * (u32)(inst % 10);
    Graph g = random_graph(16, permille, derive_seed(515, inst));
    u64 mu = matching_dp_size(g);
    auto m = max_matching_small(g);
    CHECK(m.size() == mu);
    CHECK(validate_matching(m, g).ok());
    auto greedy = greedy_matching(g);
    CHECK(greedy.size() <= mu);
    CHECK(mu <= 2 * greedy.size());
  }
  Graph big = random_graph(22, 180, 31415);
  CHECK(max_matching_small(big).size() == matching_dp_size(big));
}

TEST_CASE("planted disjoint matching at working scale", "[matching]") {
  Graph g;
  g.n = 4096;
  for (u32 i = 0; i < 2048; ++i) g.edges.push_back({2 * i, 2 * i + 1});
  // chords cannot raise a perfect matching
  g.edges.push_back({0, 100});
  g.edges.push_back({7, 3000});
  std::sort(g.edges.begin(), g.edges.end());
  auto m = max_matching_small(g);
  CHECK(m.size() == 2048);
  CHECK(validate_matching(m, g).ok());
}

TEST_CASE("oracle brackets the optimum beyond the exact cutoff",
          "[matching]") {
  Graph g = random_graph(200, 30, 999);
  auto b = matching_oracle(g);
  CHECK_FALSE(b.exact);
  CHECK(b.lower == greedy_matching(g).size());
  CHECK(b.upper == 2 * b.lower);
  u64 mu = max_matching_small(g).size();
  CHECK(b.lower <= mu);
  CHECK(mu <= b.upper);
}

TEST_CASE("greedy output is maximal", "[matching]") {
  for (u64 inst = 0; inst < 20; ++inst) {
    Graph g = random_graph(64, 60, derive_seed(717, inst));
    auto m = greedy_matching(g);
    std::vector<u8> used(g.n, 0);
    for (auto& [u, v] : m) used[u] = used[v] = 1;
    for (auto& [u, v] : g.edges) CHECK((used[u] || used[v]));
  }
}

TEST_CASE("matching validation pinpoints violations", "[matching]") {
  Graph g;
  g.n = 8;
  g.edges = {{0, 1}, {2, 3}, {4, 5}, {5, 6}};
  CHECK(validate_matching({}, g).ok());
  CHECK(validate_matching({{0, 1}, {2, 3}}, g).ok());

  auto rep = validate_matching({{4, 5}, {5, 6}}, g);
  CHECK_FALSE(rep.disjoint);
  CHECK(rep.repeated_vertex == 5);
  CHECK(rep.edges_present);

  auto missing = validate_matching({{0, 1}, {6, 7}}, g);
  CHECK(missing.disjoint);
  CHECK_FALSE(missing.edges_present);
  CHECK(missing.missing_edge == std::pair<u32, u32>{6, 7});

  auto oor = validate_matching({{0, 9}}, g);
  CHECK_FALSE(oor.edges_present);
}

TEST_CASE("matching utilities reject malformed graphs", "[matching]") {
  Graph bad;
  bad.n = 4;
  bad.edges = {{0, 4}};
  CHECK_THROWS_AS(max_matching_small(bad), std::invalid_argument);
  CHECK_THROWS_AS(matching_dp_size(bad), std::invalid_argument);
  CHECK_THROWS_AS(greedy_matching(bad), std::invalid_argument);
  Graph wide;
  wide.n = 25;
  CHECK_THROWS_AS(matching_dp_size(wide), std::invalid_argument);
}
