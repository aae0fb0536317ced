// Extension-field tables against schoolbook polynomial oracles, then the
// syndrome-based sparse recovery against dense-vector and full-enumeration
// oracles.

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "gsketch/ext_field.hpp"
#include "gsketch/sparse_recovery.hpp"
#include "gsketch/util.hpp"

using namespace gsketch;

namespace {

// independent digit arithmetic on packed elements, for oracle use
std::vector<u64> unpack(u64 a, u64 q, u32 e) {
  std::vector<u64> d(e);
  for (u32 i = 0; i < e; ++i) {
    d[i] = a % q;
    a /= q;
  }
  return d;
}

u64 pack(const std::vector<u64>& d, u64 q) {
  u64 v = 0;
  for (std::size_t i = d.size(); i-- > 0;) v = v * q + d[i];
  return v;
}

u64 oracle_add(u64 a, u64 b, u64 q, u32 e) {
  auto da = unpack(a, q, e), db = unpack(b, q, e);
  for (u32 i = 0; i < e; ++i) da[i] = (da[i] + db[i]) % q;
  return pack(da, q);
}

// schoolbook multiply mod the field's modulus polynomial
u64 oracle_mul(u64 a, u64 b, const ExtField& F) {
  u64 q = F.q();
  u32 e = F.degree();
  auto da = unpack(a, q, e), db = unpack(b, q, e);
  std::vector<u64> prod(2 * e - 1, 0);
  for (u32 i = 0; i < e; ++i)
    for (u32 j = 0; j < e; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % q;
  const auto& f = F.modulus_poly();
  for (std::size_t d = prod.size(); d-- > e;) {
    u64 c = prod[d];
    if (!c) continue;
    prod[d] = 0;
    for (u32 i = 0; i < e; ++i) prod[d - e + i] = (prod[d - e + i] + (q - (c * f[i]) % q)) % q;
  }
  prod.resize(e);
  return pack(prod, q);
}

}  // namespace

TEST_CASE("extension field tables: exhaustive agreement with digit oracles") {
  for (auto [q, e] : {std::pair<u64, u32>{2, 4}, {3, 3}, {5, 2}}) {
    ExtField F(q, e);
    REQUIRE(F.size() == [&] {
      u64 s = 1;
      for (u32 i = 0; i < e; ++i) s *= q;
      return s;
    }());
    // generator reaches every nonzero element exactly once
    std::vector<bool> seen(F.size(), false);
    for (u64 i = 0; i < F.order(); ++i) {
      u64 v = F.generator_pow(i);
      REQUIRE(v > 0);
      REQUIRE(v < F.size());
      REQUIRE(!seen[v]);
      seen[v] = true;
    }
    for (u64 a = 0; a < F.size(); ++a)
      for (u64 b = 0; b < F.size(); ++b) {
        REQUIRE(F.add(a, b) == oracle_add(a, b, q, e));
        REQUIRE(F.mul(a, b) == oracle_mul(a, b, F));
      }
    for (u64 a = 1; a < F.size(); ++a) {
      REQUIRE(F.mul(a, F.inv(a)) == 1);
      REQUIRE(F.add(a, F.neg(a)) == 0);
    }
    REQUIRE(F.sub(0, 1) == F.neg(1));
  }
}

TEST_CASE("extension field: minimal degree and shared construction") {
  REQUIRE(ExtField::min_degree(3, 16) == 3);   // 27 > 16
  REQUIRE(ExtField::min_degree(5, 64) == 3);   // 125 > 64
  REQUIRE(ExtField::min_degree(5, 24) == 2);   // 25 > 24
  REQUIRE(ExtField::min_degree(61, 4096) == 3);
  auto a = ExtField::get(5, 3);
  auto b = ExtField::get(5, 3);
  REQUIRE(a.get() == b.get());
}

TEST_CASE("sparse recovery: zero vector decodes to nothing") {
  FqSparseRecovery s(64, 3, 5);
  auto r = s.decode();
  REQUIRE(r.ok());
  REQUIRE(r.entries.empty());
  s.feed_index(9, 1);
  s.feed_index(9, -1);
  r = s.decode();
  REQUIRE(r.ok());
  REQUIRE(r.entries.empty());
}

TEST_CASE("sparse recovery: fixed three-sparse instance over F_5") {
  // maintained dense oracle alongside the sketch
  FqSparseRecovery s(64, 3, 5);
  i64 dense[64] = {0};
  auto feed = [&](u64 j, i64 d) {
    s.feed_index(j, d);
    dense[j] += d;
  };
  feed(1, 1);
  feed(9, 2);
  feed(40, 2);
  auto r = s.decode();
  REQUIRE(r.ok());
  REQUIRE(r.entries.size() == 3);
  for (auto [j, v] : r.entries) REQUIRE(static_cast<i64>(v) == ((dense[j] % 5) + 5) % 5);
  REQUIRE(r.entries[0].first == 1);
  REQUIRE(r.entries[0].second == 1);
  REQUIRE(r.entries[1].first == 9);
  REQUIRE(r.entries[1].second == 2);
  REQUIRE(r.entries[2].first == 40);
  REQUIRE(r.entries[2].second == 2);
}

TEST_CASE("sparse recovery: exhaustive over all <=2-sparse vectors, q=3 m=16") {
  // zero vector
  {
    FqSparseRecovery s(16, 2, 3);
    REQUIRE(s.decode().ok());
    REQUIRE(s.decode().entries.empty());
  }
  // all 1-sparse
  for (u64 j = 0; j < 16; ++j)
    for (u64 v = 1; v < 3; ++v) {
      FqSparseRecovery s(16, 2, 3);
      s.feed_index(j, static_cast<i64>(v));
      auto r = s.decode();
      REQUIRE(r.ok());
      REQUIRE(r.entries.size() == 1);
      REQUIRE(r.entries[0].first == j);
      REQUIRE(r.entries[0].second == v);
    }
  // all 2-sparse
  for (u64 j1 = 0; j1 < 16; ++j1)
    for (u64 j2 = j1 + 1; j2 < 16; ++j2)
      for (u64 v1 = 1; v1 < 3; ++v1)
        for (u64 v2 = 1; v2 < 3; ++v2) {
          FqSparseRecovery s(16, 2, 3);
          s.feed_index(j1, static_cast<i64>(v1));
          s.feed_index(j2, static_cast<i64>(v2));
          auto r = s.decode();
          REQUIRE(r.ok());
          REQUIRE(r.entries.size() == 2);
          REQUIRE(r.entries[0].first == j1);
          REQUIRE(r.entries[0].second == v1);
          REQUIRE(r.entries[1].first == j2);
          REQUIRE(r.entries[1].second == v2);
        }
}

TEST_CASE("sparse recovery: randomized sweeps across shapes") {
  Rng rng(2024);
  for (int t = 0; t < 400; ++t) {
    u64 m = 16 + rng.next_below(1000);
    u32 k = 1 + static_cast<u32>(rng.next_below(8));
    u64 q = smallest_prime_gt(1 + rng.next_below(40));
    FqSparseRecovery s(m, k, q);
    std::map<u64, i64> dense;
    u32 supp = static_cast<u32>(rng.next_below(k + 1));
    for (u32 i = 0; i < supp; ++i) {
      u64 j = rng.next_below(m);
      i64 d = static_cast<i64>(1 + rng.next_below(q - 1));
      if (rng.next_below(2)) d -= static_cast<i64>(q);  // same residue, signed form
      s.feed_index(j, d);
      dense[j] = (dense[j] + d % static_cast<i64>(q) + static_cast<i64>(q)) % static_cast<i64>(q);
    }
    std::map<u64, u64> want;
    for (auto [j, v] : dense)
      if (v % static_cast<i64>(q) != 0) want[j] = static_cast<u64>(v % static_cast<i64>(q));
    auto r = s.decode();
    REQUIRE(r.ok());
    REQUIRE(r.entries.size() == want.size());
    for (auto [j, v] : r.entries) {
      REQUIRE(want.count(j) == 1);
      REQUIRE(want[j] == v);
    }
  }
}

TEST_CASE("sparse recovery: overfull states are flagged, not misdecoded") {
  // six distinct coordinates against k = 2; deterministic sketch, so the
  // flagged outcome is stable
  FqSparseRecovery s(16, 2, 3);
  for (u64 j = 0; j < 6; ++j) s.feed_index(j, 1);
  auto r = s.decode();
  REQUIRE(!r.ok());
  REQUIRE(r.entries.empty());
}

TEST_CASE("sparse recovery: linear in feeds and merges") {
  Rng rng(555);
  for (int t = 0; t < 30; ++t) {
    std::vector<std::pair<u64, i64>> ups;
    for (int i = 0; i < 60; ++i)
      ups.emplace_back(rng.next_below(200), static_cast<i64>(rng.next_below(11)) - 5);
    FqSparseRecovery whole(200, 4, 7), left(200, 4, 7), right(200, 4, 7);
    for (auto& [j, d] : ups) whole.feed_index(j, d);
    for (std::size_t i = 0; i < ups.size(); ++i)
      (i % 2 ? left : right).feed_index(ups[i].first, ups[i].second);
    left.merge(right);
    REQUIRE(whole.state_equal(left));
    std::vector<std::pair<u64, i64>> shuffled = ups;
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);
    FqSparseRecovery reordered(200, 4, 7);
    for (auto& [j, d] : shuffled) reordered.feed_index(j, d);
    REQUIRE(whole.state_equal(reordered));
  }
}

TEST_CASE("sparse recovery: state is exactly 2k extension-field elements") {
  FqSparseRecovery s(64, 3, 5);
  REQUIRE(s.field().degree() == 3);
  BitMeter bm = s.measure();
  REQUIRE(bm.sketch_bits == 2 * 3 * 3 * bits_for(5));  // 2k syndromes, e digits, 3 bits each
  REQUIRE(bm.randomness_bits == 0);                    // fully deterministic
}
