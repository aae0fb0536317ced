#pragma once

// Guess-and-run wrapper. One sketch pair (easy matching + group recovery) per
// power-of-two guess of the matching size; guesses outside the analyzed
// regime route to a configured fallback, and the largest matching across all
// candidates wins. A mod-2 edge store doubles as the exact fallback and as
// the whole pipeline when the approximation target is small.

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsketch/bit_meter.hpp"
#include "gsketch/match_or_sparsify.hpp"
#include "gsketch/matching.hpp"
#include "gsketch/sparsify.hpp"
#include "gsketch/stream.hpp"
#include "gsketch/util.hpp"

namespace gsketch {

// one bit per vertex pair: the net multiplicity mod 2 of every edge. Exact,
// linear, and n*(n-1)/2 bits of state.
class ParityStore {
 public:
  explicit ParityStore(u32 n) : n_(n) {
    if (n_ < 2) throw std::invalid_argument("parity store: need n >= 2");
    bits_.assign((bit_count() + 63) / 64, 0);
  }

  u32 n() const { return n_; }
  u64 bit_count() const { return (u64)n_ * (n_ - 1) / 2; }

  void feed(const StreamUpdate& up) {
    if ((up.delta & 1) == 0) return;
    u64 idx = edge_index(up.u, up.v, n_);
    bits_[idx >> 6] ^= 1ull << (idx & 63);
  }

  Graph extract() const {
    Graph g;
    g.n = n_;
    for (u64 w = 0; w < bits_.size(); ++w) {
      u64 word = bits_[w];
      while (word) {
        u64 idx = (w << 6) + (u64)std::countr_zero(word);
        word &= word - 1;
        g.edges.push_back(edge_unindex(idx, n_));
      }
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
  }

  void merge(const ParityStore& o) {
    if (n_ != o.n_)
      throw std::invalid_argument("parity store: merge shape mismatch");
    for (u64 w = 0; w < bits_.size(); ++w) bits_[w] ^= o.bits_[w];
  }

  bool state_equal(const ParityStore& o) const {
    return n_ == o.n_ && bits_ == o.bits_;
  }

 private:
  u32 n_;
  std::vector<u64> bits_;
};

enum class FallbackPolicy : u8 { kParityStore, kBestEffortMos, kError };

struct PipelineConfig {
  u32 n = 0;
  double alpha = 2.0;
  double delta = 0.5;
  u64 seed = 0;

  // relaxation multipliers for the paper's desk-hostile constants; the first
  // gates keep-the-easy-matching, the other two are read by the harness
  double knob_match = 1.0;
  double knob_edges = 1.0;
  double knob_mu = 1.0;

  FallbackPolicy fallback = FallbackPolicy::kParityStore;
  // the analysis constant in "alpha > 100"; configurable because no desk
  // scale satisfies it, every run below the paper's value is flagged
  double small_alpha_threshold = 100.0;
  u64 parity_budget_bytes = 64ull << 20;
  bool per_guess_bits = true;
};

enum class SparsifyState : u8 { kBuilt, kUnreachable, kOverBudget, kNone };

struct GuessInfo {
  u64 opt = 0;
  bool in_regime = false;
  bool used_fallback = false;
  SparsifyState sparsify = SparsifyState::kNone;
  bool kept_easy = false;
  u64 candidate_size = 0;
  u64 sketch_bits = 0;
  u64 randomness_bits = 0;
};

struct RegimeFlags {
  bool alpha_within_theorem = false;    // alpha <= n^(1/2 - delta)
  bool alpha_exceeds_paper_constant = false;  // alpha > 100
  bool assumption_constant_relaxed = false;   // threshold moved off 100
  bool small_alpha_branch = false;
};

struct MatchingReport {
  std::vector<std::pair<u32, u32>> matching;
  u64 winning_opt = 0;  // 0 means the fallback store won (or nothing did)
  u64 total_bits = 0;
  u64 randomness_bits = 0;
  u64 parity_bits = 0;
  std::vector<GuessInfo> guesses;
  RegimeFlags flags;
  MatchVerdict validation;  // disjointness here; edge presence is the
                            // caller's job once it holds the real graph
};

class PipelineSketch {
 public:
  static double beta_for(double alpha) { return 4.0 * alpha; }

  explicit PipelineSketch(const PipelineConfig& cfg) : cfg_(cfg) {
    if (cfg_.n < 2) throw std::invalid_argument("pipeline: need n >= 2");
    if (!(cfg_.alpha > 1.0))
      throw std::invalid_argument("pipeline: alpha must exceed 1");
    if (!(cfg_.delta > 0.0) || cfg_.delta > 0.5)
      throw std::invalid_argument("pipeline: delta in (0, 0.5]");

    flags_.alpha_within_theorem =
        cfg_.alpha <= std::pow((double)cfg_.n, 0.5 - cfg_.delta);
    flags_.alpha_exceeds_paper_constant = cfg_.alpha > 100.0;
    flags_.assumption_constant_relaxed = cfg_.small_alpha_threshold != 100.0;
    flags_.small_alpha_branch = cfg_.alpha <= cfg_.small_alpha_threshold;

    if (flags_.small_alpha_branch) {
      require_parity_budget();
      parity_.emplace(cfg_.n);
      return;
    }

    double beta = beta_for(cfg_.alpha);
    u64 top = bits_for(cfg_.n);  // ceil(log2 n)
    bool need_fallback = false;
    for (u64 i = 0; i <= top; ++i) {
      Guess g;
      g.opt = 1ull << i;
      g.in_regime = (double)g.opt >=
                    cfg_.alpha * cfg_.alpha *
                        std::pow((double)cfg_.n, cfg_.delta);
      if (g.in_regime) {
        g.mos.emplace(cfg_.n, g.opt, beta, derive_seed(cfg_.seed, 0x706fu, i));
        try {
          SparsifyParams sp =
              SparsifyParams::canonical(cfg_.n, g.opt, beta, cfg_.delta);
          sp.check_promise();
          if (sparsify_units(sp) > kSparsifyUnitCap) {
            g.sparsify = SparsifyState::kOverBudget;
          } else {
            g.sketch.emplace(cfg_.n, sp, derive_seed(cfg_.seed, 0x7370u, i));
            g.sparsify = SparsifyState::kBuilt;
          }
        } catch (const promise_regime_error&) {
          g.sparsify = SparsifyState::kUnreachable;
        }
      } else {
        switch (cfg_.fallback) {
          case FallbackPolicy::kParityStore:
            need_fallback = true;
            g.used_fallback = true;
            break;
          case FallbackPolicy::kBestEffortMos:
            g.mos.emplace(cfg_.n, g.opt, beta,
                          derive_seed(cfg_.seed, 0x706fu, i));
            g.used_fallback = true;
            break;
          case FallbackPolicy::kError:
            throw std::invalid_argument(
                "pipeline: guess " + std::to_string(g.opt) +
                " is outside the regime and the policy forbids fallbacks");
        }
      }
      guesses_.push_back(std::move(g));
    }
    if (need_fallback) {
      require_parity_budget();
      parity_.emplace(cfg_.n);
    }
  }

  const PipelineConfig& config() const { return cfg_; }
  const RegimeFlags& flags() const { return flags_; }
  u64 guess_count() const { return guesses_.size(); }
  u64 guess_opt(u64 idx) const { return guesses_.at(idx).opt; }
  bool guess_in_regime(u64 idx) const { return guesses_.at(idx).in_regime; }
  bool has_parity() const { return parity_.has_value(); }

  void feed(const StreamUpdate& up) {
    if (parity_) parity_->feed(up);
    for (auto& g : guesses_) {
      if (g.mos) g.mos->feed(up);
      if (g.sketch) g.sketch->feed(up);
    }
  }

  // guess_limit trims to the first guesses only (the fallback store, when
  // present, always participates); used to check that enabling more guesses
  // never shrinks the answer
  MatchingReport recover(u64 guess_limit = ~0ull) const {
    MatchingReport rep;
    rep.flags = flags_;

    std::vector<std::pair<u32, u32>> best;
    u64 winning = 0;
    if (parity_) {
      Graph g = parity_->extract();
      best = max_matching_small(g);
      rep.parity_bits = parity_->bit_count();
    }

    double beta = beta_for(cfg_.alpha);
    u64 limit = std::min<u64>(guess_limit, guesses_.size());
    for (u64 i = 0; i < limit; ++i) {
      const Guess& g = guesses_[i];
      GuessInfo info;
      info.opt = g.opt;
      info.in_regime = g.in_regime;
      info.used_fallback = g.used_fallback;
      info.sparsify = g.sparsify;
      if (cfg_.per_guess_bits && (g.mos || g.sketch)) {
        BitMeter bm;
        if (g.mos) bm += g.mos->measure();
        if (g.sketch) bm += g.sketch->measure();
        info.sketch_bits = bm.sketch_bits;
        info.randomness_bits = bm.total_randomness_bits();
      }
      if (g.mos) {
        std::vector<std::pair<u32, u32>> easy;
        for (const MosEdge& e : g.mos->recover()) easy.push_back({e.u, e.v});
        double threshold =
            cfg_.knob_match * (double)g.opt / (8.0 * beta);
        info.kept_easy = g.used_fallback || (double)easy.size() >= threshold;
        std::vector<std::pair<u32, u32>> cand;
        if (info.kept_easy || !g.sketch)
          cand = std::move(easy);
        else
          cand = g.sketch->recover(easy).matching;
        info.candidate_size = cand.size();
        if (cand.size() > best.size()) {
          best = std::move(cand);
          winning = g.opt;
        }
      }
      rep.guesses.push_back(info);
    }

    rep.matching = std::move(best);
    rep.winning_opt = winning;

    BitMeter bm = measure();
    rep.total_bits = bm.total_bits();
    rep.randomness_bits = bm.total_randomness_bits();

    rep.validation.edges_present = true;  // no graph to check against here
    std::vector<u8> seen(cfg_.n, 0);
    for (auto& [u, v] : rep.matching) {
      if (seen[u] || seen[v]) {
        rep.validation.disjoint = false;
        rep.validation.repeated_vertex = seen[u] ? u : v;
        break;
      }
      seen[u] = seen[v] = 1;
    }
    return rep;
  }

  BitMeter measure() const {
    BitMeter bm;
    for (const auto& g : guesses_) {
      if (g.mos) bm += g.mos->measure();
      if (g.sketch) bm += g.sketch->measure();
    }
    if (parity_) bm.sketch_bits += parity_->bit_count();
    return bm;
  }

  BitMeter guess_measure(u64 idx) const {
    const Guess& g = guesses_.at(idx);
    BitMeter bm;
    if (g.mos) bm += g.mos->measure();
    if (g.sketch) bm += g.sketch->measure();
    return bm;
  }

  void merge(const PipelineSketch& o) {
    if (!same_shape(o))
      throw std::invalid_argument("pipeline: merge shape mismatch");
    if (parity_) parity_->merge(*o.parity_);
    for (u64 i = 0; i < guesses_.size(); ++i) {
      if (guesses_[i].mos) guesses_[i].mos->merge(*o.guesses_[i].mos);
      if (guesses_[i].sketch)
        guesses_[i].sketch->merge(*o.guesses_[i].sketch);
    }
  }

  bool state_equal(const PipelineSketch& o) const {
    if (!same_shape(o)) return false;
    if (parity_ && !parity_->state_equal(*o.parity_)) return false;
    for (u64 i = 0; i < guesses_.size(); ++i) {
      if (guesses_[i].mos && !guesses_[i].mos->state_equal(*o.guesses_[i].mos))
        return false;
      if (guesses_[i].sketch &&
          !guesses_[i].sketch->state_equal(*o.guesses_[i].sketch))
        return false;
    }
    return true;
  }

 private:
  struct Guess {
    u64 opt = 0;
    bool in_regime = false;
    bool used_fallback = false;
    SparsifyState sparsify = SparsifyState::kNone;
    std::optional<MOSSketch> mos;
    std::optional<SparsifySketch> sketch;
  };

  // coarse construction-size guard: group count times tester battery; keeps
  // a promise-passing but physically absurd scale from exhausting memory
  static constexpr double kSparsifyUnitCap = 5e6;
  double sparsify_units(const SparsifyParams& p) const {
    return (double)p.k *
           (double)NETester::sampler_count(cfg_.n, p.a, p.btilde);
  }

  void require_parity_budget() {
    u64 bits = (u64)cfg_.n * (cfg_.n - 1) / 2;
    if (bits > 8 * cfg_.parity_budget_bytes)
      throw std::invalid_argument(
          "pipeline: parity store exceeds the configured budget");
  }

  bool same_shape(const PipelineSketch& o) const {
    return cfg_.n == o.cfg_.n && cfg_.alpha == o.cfg_.alpha &&
           cfg_.delta == o.cfg_.delta && cfg_.seed == o.cfg_.seed &&
           cfg_.fallback == o.cfg_.fallback &&
           cfg_.small_alpha_threshold == o.cfg_.small_alpha_threshold;
  }

  PipelineConfig cfg_;
  RegimeFlags flags_;
  std::optional<ParityStore> parity_;
  std::vector<Guess> guesses_;
};

}  // namespace gsketch
