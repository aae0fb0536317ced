// Acceptance suite: ten independent checks over the whole library, one
// PASS/FAIL line each, exit code = number of failures. Every tolerance is
// pinned as a named constant next to the measurement it guards. Pass a
// substring as argv[1] to run a subset, e.g. `acceptance C5` or
// `acceptance scaling`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gsketch/exhaustive_snr.hpp"
#include "gsketch/generators.hpp"
#include "gsketch/index_recovery.hpp"
#include "gsketch/l0_sampler.hpp"
#include "gsketch/match_or_sparsify.hpp"
#include "gsketch/matching.hpp"
#include "gsketch/ne_counter.hpp"
#include "gsketch/ne_sampler.hpp"
#include "gsketch/ne_tester.hpp"
#include "gsketch/pipeline.hpp"
#include "gsketch/report.hpp"
#include "gsketch/sn_recovery.hpp"
#include "gsketch/sparse_recovery.hpp"
#include "gsketch/sparsify.hpp"
#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

using namespace gsketch;

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------
// C1: feed-order invariance and merge-equals-concatenation, bit exact, for
// every sketch type, on randomized streams with >= 30% deletions.

template <class Make>
bool stream_linear(Make make, const std::vector<StreamUpdate>& ups,
                   const std::vector<StreamUpdate>& perm) {
  auto whole = make();
  auto reord = make();
  auto left = make();
  auto right = make();
  for (const auto& u : ups) whole.feed(u);
  for (const auto& u : perm) reord.feed(u);
  std::size_t half = ups.size() / 2;
  for (std::size_t j = 0; j < ups.size(); ++j) {
    auto& tgt = j < half ? left : right;
    tgt.feed(ups[j]);
  }
  left.merge(right);
  return whole.state_equal(reord) && whole.state_equal(left);
}

template <class Make>
bool vector_linear(Make make, const std::vector<StreamUpdate>& ups,
                   const std::vector<StreamUpdate>& perm, u32 n) {
  auto whole = make();
  auto reord = make();
  auto left = make();
  auto right = make();
  auto idx = [n](const StreamUpdate& u) { return edge_index(u.u, u.v, n); };
  for (const auto& u : ups) whole.feed_index(idx(u), u.delta);
  for (const auto& u : perm) reord.feed_index(idx(u), u.delta);
  std::size_t half = ups.size() / 2;
  for (std::size_t j = 0; j < ups.size(); ++j) {
    auto& tgt = j < half ? left : right;
    tgt.feed_index(idx(ups[j]), ups[j].delta);
  }
  left.merge(right);
  return whole.state_equal(reord) && whole.state_equal(left);
}

bool c1_linearity(std::string& details) {
  const int kStreams = 1000;    // randomized streams in total
  const int kKept = 40;         // inserted-and-kept edges per stream
  const int kChurn = 45;        // insert+delete pairs: 90/130 = 34.6% deletions
  const int kTypes = 12;
  const u32 n = 64;
  const std::vector<u32> S{0, 1, 2, 3, 4, 5, 6, 7};
  const std::vector<u32> T{16, 17, 18, 19, 20, 21, 22, 23,
                           24, 25, 26, 27, 28, 29, 30, 31};
  SparsifyParams sp;
  sp.k = 6;
  sp.d_f = 2;
  sp.a = 32;
  sp.btilde = 2;
  sp.c = 5;
  sp.tester_scale = 0.005;

  int bad = 0;
  for (int i = 0; i < kStreams; ++i) {
    Rng rng(derive_seed(0xacc1, i));
    std::vector<StreamUpdate> ups;
    detail::EdgePool pool(n);
    for (int e = 0; e < kKept; ++e) {
      auto [u, v] = pool.fresh_pair(rng, 0, n);
      ups.push_back(make_update(u, v, 1));
    }
    for (int e = 0; e < kChurn; ++e) {
      auto [u, v] = pool.fresh_pair(rng, 0, n);
      ups.push_back(make_update(u, v, 1));
      ups.push_back(make_update(u, v, -1));
    }
    std::vector<StreamUpdate> perm = ups;
    for (std::size_t j = perm.size(); j > 1; --j)
      std::swap(perm[j - 1], perm[rng.next_below(j)]);

    const u64 seed = derive_seed(0xacc2, i);
    const u64 m = (u64)n * (n - 1) / 2;
    bool ok = true;
    switch (i % kTypes) {
      case 0:
        ok = vector_linear([&] { return L0Sampler(m, 0.01, 1e-3, seed); }, ups,
                           perm, n);
        break;
      case 1:
        ok = vector_linear([&] { return FqSparseRecovery(m, 8, 3); }, ups, perm, n);
        break;
      case 2:
        ok = vector_linear(
            [&] { return IndexRecovery(m, 20.0, 1.0 / 24.0, 5, seed); }, ups,
            perm, n);
        break;
      case 3:
        ok = vector_linear(
            [&] { return PartialRecovery(m, 20.0, 1.0 / 24.0, 5, seed); }, ups,
            perm, n);
        break;
      case 4:
        ok = stream_linear(
            [&] { return NECounter(n, S, T, 1.0 / 1024, seed); }, ups, perm);
        break;
      case 5:
        ok = stream_linear([&] { return NESampler(n, S, seed); }, ups, perm);
        break;
      case 6:
        ok = stream_linear([&] { return NETester(n, S, 16, 1, seed, 0.05); },
                           ups, perm);
        break;
      case 7:
        ok = stream_linear(
            [&] { return SNRecoverySketch(n, S, 16, 2, 4, seed); }, ups, perm);
        break;
      case 8:
        ok = stream_linear([&] { return MOSSketch(n, 8, 2.0, seed); }, ups, perm);
        break;
      case 9:
        ok = stream_linear([&] { return SparsifySketch(n, sp, seed); }, ups, perm);
        break;
      case 10:
        ok = stream_linear([&] { return ParityStore(n); }, ups, perm);
        break;
      case 11:
        ok = stream_linear(
            [&] {
              PipelineConfig cfg;
              cfg.n = n;
              cfg.alpha = 4.0;
              cfg.small_alpha_threshold = 2.0;
              cfg.fallback = FallbackPolicy::kBestEffortMos;
              cfg.seed = seed;
              return PipelineSketch(cfg);
            },
            ups, perm);
        break;
    }
    if (!ok) ++bad;
  }
  details = fmt("%d streams x %d sketch types, 34%% deletions, %d failures",
                kStreams, kTypes, bad);
  return bad == 0;
}

// ---------------------------------------------------------------------------
// C2: exact sparse recovery over F_q. Exhaustive <=2-sparse sweep at q=3,
// m=16, then random <=k-sparse vectors across domains up to 4096.

bool fq_roundtrip(u64 m, u32 k, u64 q,
                  const std::vector<std::pair<u64, u64>>& want, Rng& rng) {
  FqSparseRecovery fq(m, k, q);
  for (auto [j, val] : want) {
    // random signed representative of the same residue
    i64 d = rng.next_below(2) ? (i64)val : (i64)val - (i64)q;
    fq.feed_index(j, d);
  }
  auto r = fq.decode();
  return r.ok() && r.entries == want;
}

bool c2_fq_recovery(std::string& details) {
  Rng rng(derive_seed(0xacc2, 0xf0));
  int bad = 0, cases = 0;

  // all <=2-sparse vectors over F_3^16
  for (u64 i = 0; i < 16; ++i)
    for (u64 a = 1; a <= 2; ++a) {
      ++cases;
      if (!fq_roundtrip(16, 2, 3, {{i, a}}, rng)) ++bad;
      for (u64 j = i + 1; j < 16; ++j)
        for (u64 b = 1; b <= 2; ++b) {
          ++cases;
          if (!fq_roundtrip(16, 2, 3, {{i, a}, {j, b}}, rng)) ++bad;
        }
    }
  ++cases;
  if (!fq_roundtrip(16, 2, 3, {}, rng)) ++bad;
  int exhaustive = cases;

  // random <=k-sparse
  const u64 kPrimes[5] = {3, 5, 7, 11, 13};
  for (int t = 0; t < 10000; ++t) {
    u64 q = kPrimes[rng.next_below(5)];
    u32 k = 1 + (u32)rng.next_below(8);
    u64 m = 16ull << rng.next_below(9);  // 16 .. 4096
    u32 cnt = (u32)rng.next_below(k + 1);
    std::set<u64> idx;
    while (idx.size() < cnt) idx.insert(rng.next_below(m));
    std::vector<std::pair<u64, u64>> want;
    for (u64 j : idx) want.push_back({j, 1 + rng.next_below(q - 1)});
    ++cases;
    if (!fq_roundtrip(m, k, q, want, rng)) ++bad;
  }
  details = fmt("%d exhaustive + 10000 random cases, %d wrong", exhaustive, bad);
  return bad == 0;
}

// ---------------------------------------------------------------------------
// C3: uniformity of L0 support sampling and NE neighborhood sampling,
// chi-square at p > 0.001, plus the sampler failure-rate bound.

// 0.1% right-tail chi-square quantiles for the two support sizes used
constexpr double kChi2Dof4 = 18.466826952903171;
constexpr double kChi2Dof63 = 103.44237731987314;
constexpr double kNeFailBound = 1.0 / 100 + 0.02;
constexpr int kUniformTrials = 30000;

double chi_square(const std::map<u32, long>& freq, std::size_t cells) {
  long total = 0;
  for (auto& [k, c] : freq) total += c;
  double exp = (double)total / (double)cells;
  double stat = 0;
  long seen = 0;
  for (auto& [k, c] : freq) {
    stat += ((double)c - exp) * ((double)c - exp) / exp;
    ++seen;
  }
  stat += (double)(cells - seen) * exp;  // empty cells
  return stat;
}

bool c3_uniformity(std::string& details) {
  // L0 over the 64-vertex edge domain, supports of size 5 and 64
  const u64 m = 2016;
  std::vector<u64> supp5{7, 100, 555, 1200, 2015};
  std::vector<u64> supp64;
  for (u64 j = 0; j < 64; ++j) supp64.push_back(5 + 31 * j);

  auto l0_chi = [&](const std::vector<u64>& supp, u64 salt, int& bogus) {
    Rng rng(derive_seed(0xacc3, salt));
    std::map<u32, long> freq;
    for (int t = 0; t < kUniformTrials; ++t) {
      L0Sampler s(m, 0.01, 1e-3, rng.next());
      for (u64 j : supp) s.feed_index(j, 1);
      auto r = s.query();
      if (r.kind != L0Result::Kind::Sample) continue;
      auto it = std::find(supp.begin(), supp.end(), r.index);
      if (it == supp.end() || r.value != 1) {
        ++bogus;
        continue;
      }
      ++freq[(u32)(it - supp.begin())];
    }
    return chi_square(freq, supp.size());
  };

  int bogus = 0;
  double chi5 = l0_chi(supp5, 5, bogus);
  double chi64 = l0_chi(supp64, 64, bogus);

  // NE sampling: S = {0} with neighborhood {1..64} at n = 256
  Rng rng(derive_seed(0xacc3, 256));
  std::map<u32, long> nfreq;
  int nfails = 0;
  for (int t = 0; t < kUniformTrials; ++t) {
    NESampler sm(256, {0}, rng.next());
    for (u32 v = 1; v <= 64; ++v) sm.feed(make_update(0, v, 1));
    auto r = sm.query();
    if (r.kind != NEQueryResult::Kind::Sample) {
      ++nfails;
      continue;
    }
    if (r.neighbor < 1 || r.neighbor > 64) {
      ++bogus;
      continue;
    }
    ++nfreq[r.neighbor];
  }
  double chin = chi_square(nfreq, 64);
  double nrate = (double)nfails / kUniformTrials;

  details = fmt(
      "chi2 supp5=%.1f(<%.1f) supp64=%.1f(<%.1f) nbhd=%.1f(<%.1f), "
      "ne fail rate %.4f (<=%.2f), %d bogus",
      chi5, kChi2Dof4, chi64, kChi2Dof63, chin, kChi2Dof63, nrate,
      kNeFailBound, bogus);
  return chi5 < kChi2Dof4 && chi64 < kChi2Dof63 && chin < kChi2Dof63 &&
         nrate <= kNeFailBound && bogus == 0;
}

// ---------------------------------------------------------------------------
// C4: the neighborhood counter is exact on |N(S) cap T| in {0, 1} and its
// false-One rate on larger intersections stays within twice the budget.

bool c4_counter(std::string& details) {
  const double kDelta = 1.0 / 1024;
  const u32 n = 64;
  const std::vector<u32> S{0, 1, 2, 3};
  std::vector<u32> T;
  for (u32 v = 10; v < 20; ++v) T.push_back(v);

  Rng rng(derive_seed(0xacc4, 1));
  int exactErr = 0;
  for (int t = 0; t < 100000; ++t) {
    NECounter c(n, S, T, kDelta, rng.next());
    if (t & 1) {
      // one crossing neighbor, sometimes reached over two parallel edges
      u32 s = (u32)rng.next_below(4);
      u32 tv = 10 + (u32)rng.next_below(10);
      c.feed(make_update(s, tv, 1));
      if (t % 5 == 0) c.feed(make_update((s + 1) % 4, tv, 1));
      c.feed(make_update(s, 40 + (u32)rng.next_below(10), 1));  // outside T
      if (!c.one()) ++exactErr;
    } else {
      // zero crossing neighbors, with distractor edges
      c.feed(make_update(0, 30 + (u32)rng.next_below(10), 1));
      c.feed(make_update(20, 10 + (u32)rng.next_below(10), 1));  // T but not S
      if (c.one()) ++exactErr;
    }
  }

  int falseOne = 0;
  const int kBigTrials = 100000;
  for (int t = 0; t < kBigTrials; ++t) {
    NECounter c(n, S, T, kDelta, rng.next());
    u32 cnt = 2 + (u32)rng.next_below(4);
    u32 base = (u32)rng.next_below(10 - cnt + 1);
    for (u32 i = 0; i < cnt; ++i)
      c.feed(make_update((u32)rng.next_below(4), 10 + base + i, 1));
    if (c.one()) ++falseOne;
  }
  // one-sided error budget: rate <= 2 * delta
  const int kFalseOneMax = (int)(kBigTrials * 2.0 * kDelta);
  details = fmt("exact {0,1}: %d errors in 100000; false-One %d/%d (max %d)",
                exactErr, falseOne, kBigTrials, kFalseOneMax);
  return exactErr == 0 && falseOne <= kFalseOneMax;
}

// ---------------------------------------------------------------------------
// C5: the tester separates |N(S) - T| <= btilde from >= 2*btilde at the
// full battery size and cutoff for n = 4096.

bool c5_tester(std::string& details) {
  const u32 n = 4096;
  const u64 a = 32, btilde = 2;
  const u64 kt = NETester::sampler_count(n, a, btilde);
  const u64 cut = NETester::decision_cutoff(n);
  if (kt != 21425 || cut != 1664) {
    details = fmt("battery drifted: %llu samplers, cutoff %llu",
                  (unsigned long long)kt, (unsigned long long)cut);
    return false;
  }
  std::vector<u32> T;
  for (u32 v = 1; v <= 28; ++v) T.push_back(v);

  const int kSeeds = 200;
  const int kMinCorrect = 198;  // >= 99% per side
  int yesOk = 0, noOk = 0;
  for (int t = 0; t < kSeeds; ++t) {
    NETester tst(n, {0}, a, btilde, derive_seed(0xacc5, 1, t));
    for (u32 v = 1; v <= 30; ++v) tst.feed(make_update(0, v, 1));
    if (tst.ne_test(T).yes) ++yesOk;  // 2 outside = btilde
  }
  for (int t = 0; t < kSeeds; ++t) {
    NETester tst(n, {0}, a, btilde, derive_seed(0xacc5, 2, t));
    for (u32 v = 1; v <= 32; ++v) tst.feed(make_update(0, v, 1));
    if (!tst.ne_test(T).yes) ++noOk;  // 4 outside = 2*btilde
  }
  details = fmt("yes %d/%d, no %d/%d (need %d), %llu samplers, cutoff %llu",
                yesOk, kSeeds, noOk, kSeeds, kMinCorrect,
                (unsigned long long)kt, (unsigned long long)cut);
  return yesOk >= kMinCorrect && noOk >= kMinCorrect;
}

// ---------------------------------------------------------------------------
// C6: recovery returns exactly N(S) - T against the dense oracle in the
// a >= 100b regime; tiny instances agree with the brute-force decoder; the
// level schedule obeys its quartering and outside-budget laws exactly.

bool c6_snr(std::string& details) {
  Rng rng(derive_seed(0xacc6, 1));
  const u32 n = 1024;
  const std::vector<u32> S{0, 1, 2, 3};
  const u64 a = 200, b = 2, c = 4;  // a >= 100b

  int exact = 0;
  for (int t = 0; t < 1000; ++t) {
    SNRecoverySketch snr(n, S, a, b, c, rng.next());
    // distinct non-S vertices: covered T, silent T, outside
    std::vector<u32> verts(n - 4);
    for (u32 i = 0; i < n - 4; ++i) verts[i] = 4 + i;
    u32 tcnt = 120 + (u32)rng.next_below(60);
    u32 extra = (u32)rng.next_below(20);
    u32 wcnt = (u32)rng.next_below(b + 1);
    for (u32 i = 0; i < tcnt + extra + wcnt; ++i)
      std::swap(verts[i], verts[i + rng.next_below(verts.size() - i)]);
    std::vector<u32> T(verts.begin(), verts.begin() + tcnt + extra);
    std::vector<u32> outside(verts.begin() + tcnt + extra,
                             verts.begin() + tcnt + extra + wcnt);
    auto feed_from = [&](u32 v) {
      u32 deg = 1 + (u32)rng.next_below(3);  // < c neighbors in S
      for (u32 d = 0; d < deg; ++d) snr.feed(make_update(S[(d + v) % 4], v, 1));
    };
    for (u32 i = 0; i < tcnt; ++i) feed_from(T[i]);
    for (u32 v : outside) feed_from(v);
    std::sort(outside.begin(), outside.end());
    auto r = snr.recover(T);
    if (r.status == SnrStatus::Ok && r.outside == outside) ++exact;
  }

  // tiny scale: n = 20 against the brute-force decoder
  int both = 0, agree = 0;
  Rng trng(derive_seed(0xacc6, 2));
  for (int t = 0; t < 300; ++t) {
    const std::vector<u32> S3{0, 1, 2};
    SNRecoverySketch sk(20, S3, 12, 2, 3, derive_seed(0xacc6, 3, t));
    ExhaustiveSNR ex(20, S3, 12, 2, 3, derive_seed(0xacc6, 4, t));
    std::vector<u32> T;
    std::vector<u32> x(20, 0);
    for (u32 v = 3; v < 15; ++v) {
      T.push_back(v);
      if (trng.next_below(2)) x[v] = 1 + (u32)trng.next_below(2);
    }
    u32 w = 15 + (u32)trng.next_below(5);
    if (trng.next_below(3)) x[w] = 1;
    for (u32 v = 3; v < 20; ++v) {
      if (!x[v]) continue;
      sk.feed_index(v, (i64)x[v]);
      ex.feed_index(v, (i64)x[v]);
    }
    auto rs = sk.recover(T);
    auto re = ex.recover(T);
    if (rs.status != SnrStatus::Ok || re.status != ExhaustiveResult::Status::Ok)
      continue;
    ++both;
    if (rs.outside == re.outside) ++agree;
  }

  // schedule laws, checked exactly on three shapes
  bool sched = true;
  const struct { u64 n, a, b; } shapes[3] = {
      {4096, 2048, 20}, {1024, 200, 2}, {1u << 20, 100000, 7}};
  for (auto& sh : shapes) {
    SnrSchedule s = SnrSchedule::compute(sh.n, sh.a, sh.b);
    double aj = (double)sh.a;
    double gj = 1.0 / 24.0;
    for (u64 j = 0; j < s.depth; ++j) {
      if (s.a[j] != aj || s.gamma[j] != gj) sched = false;
      aj /= 4.0;
      gj /= 2.0;
    }
    if (s.depth > 0 && !(s.b.back() <= std::exp(2.0) * (double)sh.b))
      sched = false;
  }

  const int kMinExact = 990;  // >= 99%
  details = fmt("exact %d/1000 (need %d); tiny agreement %d/%d; schedule %s",
                exact, kMinExact, agree, both, sched ? "ok" : "broken");
  return exact >= kMinExact && both > 0 && agree == both && sched;
}

// ---------------------------------------------------------------------------
// C7: the recovery sketch costs a small constant per budget unit
// (a*log2(c) + b*log2(n)*log2(c)) and a fraction of an equivalent battery
// of standalone L0 samplers.

bool c7_snr_space(std::string& details) {
  const u64 a = 2048, b = 20, c = 4;
  const u32 n = 4096;
  // first-calibration constant, later runs must stay within 5%
  const double kFrozenC = 169.8317;
  const double kCTol = 0.05;
  const double kBatteryMax = 0.2;

  SNRecoverySketch snr(n, {0}, a, b, c, 1);
  u64 bits = snr.measure().sketch_bits;
  u64 units = a * 2 + b * 12 * 2;  // a*log2(4) + b*log2(4096)*log2(4)
  double C = (double)bits / (double)units;

  u64 l0 = L0Sampler::declared_sketch_bits(n, 0.01, 1.0 / 1024);
  double ratio = (double)bits / (double)((a + b) * l0);

  details = fmt("%llu bits / %llu units: C=%.4f (frozen %.4f +-5%%); "
                "battery ratio %.4f (<=%.1f)",
                (unsigned long long)bits, (unsigned long long)units, C,
                kFrozenC, ratio, kBatteryMax);
  return std::fabs(C - kFrozenC) <= kCTol * kFrozenC && ratio <= kBatteryMax;
}

// ---------------------------------------------------------------------------
// C8: the match-or-sparsify disjunction on the planted benchmark: either the
// easy matching is large, or the residual graph is sparse and still carries
// most of the optimum.

bool c8_mos(std::string& details) {
  const u32 n = 4096;
  const u64 opt = 2048;
  const double alpha = 4.0;
  const double kKnob = 1.0;
  const u64 kMatchNeed = (u64)(kKnob * (double)opt / (8.0 * alpha));  // 64
  const double l2n = 12.0;
  const double kEdgeBound = kKnob * 20.0 * (double)opt * l2n * l2n * l2n * l2n;
  const u64 kMuNeed = 3 * opt / 4;  // 1536
  const int kSeeds = 50;
  const int kMinHold = 45;  // >= 90%

  int matchCase = 0, sparsifyCase = 0, holds = 0;
  for (int t = 0; t < kSeeds; ++t) {
    InstanceSpec spec;
    spec.family = Family::kPlantedMatching;
    spec.n = n;
    spec.mu = opt;
    spec.deletion_fraction = 0.3;
    spec.seed = derive_seed(0xacc8, t, 1);
    auto inst = generate(spec);

    MOSSketch mos(n, opt, alpha, derive_seed(0xacc8, t, 2));
    feed_all(mos, inst.stream.updates);
    std::vector<char> used(n, 0);
    u64 easy = 0;
    for (const auto& e : mos.recover()) {
      if (used[e.u] || used[e.v]) continue;
      used[e.u] = used[e.v] = 1;
      ++easy;
    }

    Graph net = net_graph(inst.stream);
    Graph resid;
    resid.n = n;
    for (auto [u, v] : net.edges)
      if (!used[u] && !used[v]) resid.edges.push_back({u, v});
    u64 residMu = max_matching_small(resid).size();

    bool mc = easy >= kMatchNeed;
    bool sc = (double)resid.edges.size() <= kEdgeBound && residMu >= kMuNeed;
    if (mc) ++matchCase;
    if (sc) ++sparsifyCase;
    if (mc || sc) ++holds;
  }
  details = fmt("disjunction %d/%d (need %d): match-case %d, sparsify-case %d",
                holds, kSeeds, kMinHold, matchCase, sparsifyCase);
  return holds >= kMinHold;
}

// ---------------------------------------------------------------------------
// C9: end-to-end over the benchmark matrix: output is always a valid
// matching with zero fabricated edges, and reaches mu/alpha in at least 90%
// of seeds per cell. Desk-scale note: the small-alpha threshold is lowered
// to 2 so alpha in {4, 8} drives the guess ladder (out-of-regime guesses
// covered by the parity fallback), alpha = 2 takes the parity path.

bool c9_end_to_end(std::string& details) {
  const u32 ns[3] = {1024, 2048, 4096};
  const double alphas[3] = {2.0, 4.0, 8.0};
  const int kSeeds = 50;
  const int kMinRatio = 45;  // >= 90% per cell
  int invalid = 0, fabricated = 0, worst = kSeeds;
  long runs = 0;

  for (int f = 0; f < 2; ++f)
    for (int ni = 0; ni < 3; ++ni)
      for (int ai = 0; ai < 3; ++ai) {
        int ratioOk = 0;
        for (int t = 0; t < kSeeds; ++t) {
          InstanceSpec spec;
          spec.n = ns[ni];
          spec.deletion_fraction = 0.3;
          spec.seed = derive_seed(0xacc9, f * 100 + ni * 10 + ai, t);
          if (f == 0) {
            spec.family = Family::kPlantedMatching;
            spec.mu = ns[ni] / 4;
          } else {
            spec.family = Family::kHardSparseInduced;
            spec.alpha = alphas[ai];
            spec.noise = 0.25;
          }
          auto inst = generate(spec);

          PipelineConfig cfg;
          cfg.n = ns[ni];
          cfg.alpha = alphas[ai];
          cfg.delta = 0.5;
          cfg.small_alpha_threshold = 2.0;
          cfg.seed = derive_seed(0xacc9, 777, f * 100 + ni * 10 + ai, t);
          RunOutcome out = run_pipeline(inst.stream, cfg);
          ++runs;

          if (!out.report.validation.ok()) ++invalid;
          if (!out.report.validation.edges_present) ++fabricated;
          double mu = (double)out.mu.upper;  // exact for n <= 4096
          if ((double)out.report.matching.size() * alphas[ai] >= mu - 1e-9)
            ++ratioOk;
        }
        worst = std::min(worst, ratioOk);
      }

  // full-report verification sweep at n = 1024: a thousand seeded runs
  // through the JSON round trip, zero fabricated-edge verdicts allowed
  int verifyFail = 0;
  for (int t = 0; t < 1000; ++t) {
    InstanceSpec spec;
    spec.n = 1024;
    spec.deletion_fraction = 0.3;
    spec.seed = derive_seed(0xacc9, 5000, t);
    if (t & 1) {
      spec.family = Family::kPlantedMatching;
      spec.mu = 256;
    } else {
      spec.family = Family::kHardSparseInduced;
      spec.alpha = 4.0;
      spec.noise = 0.25;
    }
    auto inst = generate(spec);
    PipelineConfig cfg;
    cfg.n = 1024;
    cfg.alpha = 4.0;
    cfg.delta = 0.5;
    cfg.small_alpha_threshold = 2.0;
    cfg.seed = derive_seed(0xacc9, 6000, t);
    RunOutcome out = run_pipeline(inst.stream, cfg);
    json rep = report_to_json(out, cfg);
    if (!verify_report(inst.stream, rep).pass) ++verifyFail;
  }

  details = fmt("%ld runs: %d invalid, %d fabricated, worst cell %d/%d "
                "(need %d); 1000-run verify sweep: %d failures "
                "[threshold=2 override]",
                runs, invalid, fabricated, worst, kSeeds, kMinRatio, verifyFail);
  return invalid == 0 && fabricated == 0 && worst >= kMinRatio &&
         verifyFail == 0;
}

// ---------------------------------------------------------------------------
// C10: declared space follows the opt^2/alpha^3 profile, and the guess
// ladder's total stays within the geometric-series bound.

bool c10_scaling(std::string& details) {
  // opt doubling: x4 +- 25%; alpha doubling: /8 +- 30%
  const double kOptLo = 3.0, kOptHi = 5.0;
  const double kAlphaLo = 5.6, kAlphaHi = 10.4;
  const double kGeomMax = 4.0 / 3.0 * 1.10;

  auto bits = [](u64 opt, double alpha) {
    MOSSketch m(8192, opt, alpha, 1);
    return (double)m.measure().total_bits();
  };
  double r1 = bits(8192, 5.0) / bits(4096, 5.0);
  double r2 = bits(4096, 5.0) / bits(2048, 5.0);
  double r3 = bits(8192, 5.0) / bits(8192, 10.0);
  double r4 = bits(4096, 5.0) / bits(4096, 10.0);

  PipelineConfig cfg;
  cfg.n = 8192;
  cfg.alpha = 1.25;
  cfg.delta = 0.5;
  cfg.small_alpha_threshold = 1.0;
  cfg.fallback = FallbackPolicy::kBestEffortMos;
  cfg.seed = 1;
  PipelineSketch pl(cfg);
  double sum = 0, mx = 0;
  for (u64 i = 0; i < pl.guess_count(); ++i) {
    double b = (double)pl.guess_measure(i).total_bits();
    sum += b;
    mx = std::max(mx, b);
  }
  double geom = sum / mx;

  details = fmt("opt x2: %.3f, %.3f (in [%.1f,%.1f]); alpha x2: %.3f, %.3f "
                "(in [%.1f,%.1f]); guess ladder %.4f (<=%.4f)",
                r1, r2, kOptLo, kOptHi, r3, r4, kAlphaLo, kAlphaHi, geom,
                kGeomMax);
  return r1 >= kOptLo && r1 <= kOptHi && r2 >= kOptLo && r2 <= kOptHi &&
         r3 >= kAlphaLo && r3 <= kAlphaHi && r4 >= kAlphaLo &&
         r4 <= kAlphaHi && geom <= kGeomMax;
}

}  // namespace

int main(int argc, char** argv) {
  using Clock = std::chrono::steady_clock;
  struct Criterion {
    const char* id;
    const char* name;
    bool (*fn)(std::string&);
  };
  const Criterion kAll[] = {
      {"C1", "linearity", c1_linearity},
      {"C2", "fq-sparse-recovery", c2_fq_recovery},
      {"C3", "sampler-uniformity", c3_uniformity},
      {"C4", "counter-one-sidedness", c4_counter},
      {"C5", "tester-promise", c5_tester},
      {"C6", "snr-oracle-equivalence", c6_snr},
      {"C7", "snr-space-saving", c7_snr_space},
      {"C8", "match-or-sparsify", c8_mos},
      {"C9", "end-to-end-matching", c9_end_to_end},
      {"C10", "space-scaling", c10_scaling},
  };
  std::string filter = argc > 1 ? argv[1] : "";
  int failed = 0, ran = 0;
  for (const auto& c : kAll) {
    if (!filter.empty() && std::string(c.id) != filter &&
        std::string(c.name).find(filter) == std::string::npos)
      continue;
    ++ran;
    auto t0 = Clock::now();
    std::string details;
    bool ok = false;
    try {
      ok = c.fn(details);
    } catch (const std::exception& e) {
      details = fmt("exception: %s", e.what());
    }
    double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%-3s %-22s %s  (%s) [%.1fs]\n", c.id, c.name,
                ok ? "PASS" : "FAIL", details.c_str(), dt);
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  if (ran == 0) {
    std::printf("no criterion matches '%s'\n", filter.c_str());
    return 2;
  }
  std::printf("acceptance: %d/%d passed\n", ran - failed, ran);
  return failed;
}
