#pragma once

// Harness glue: run a pipeline over a parsed stream, grade the answer
// against an exact or bracketed optimum, serialize the whole run as JSON
// (schema 1), and re-verify a report from nothing but the stream and the
// report itself.

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsketch/matching.hpp"
#include "gsketch/pipeline.hpp"
#include "gsketch/stream.hpp"

namespace gsketch {

using json = nlohmann::ordered_json;

// exact matching size where the solvers can afford it, 2-approx bracket
// beyond that
inline MatchingBound mu_bound(const Graph& g) {
  if (g.n <= 24) {
    u64 m = matching_dp_size(g);
    return {m, m, true};
  }
  if (g.n <= 4096) {
    u64 m = max_matching_small(g).size();
    return {m, m, true};
  }
  u64 sz = greedy_matching(g).size();
  return {sz, std::min<u64>(2 * sz, g.n / 2), false};
}

struct RunOutcome {
  MatchingReport report;
  Graph net;
  MatchingBound mu;
  double wall_ms = 0.0;
  bool timed = false;
};

// single pass: feed every update, recover, then grade against the net
// graph. budget_bits, when nonzero, rejects a sketch whose declared size
// exceeds it before any update is consumed.
inline RunOutcome run_pipeline(const StreamFile& sf, const PipelineConfig& cfg,
                               bool timing = false, u64 budget_bits = 0) {
  if (cfg.n != sf.n)
    throw std::invalid_argument("run: config n does not match the stream");
  RunOutcome out;
  auto t0 = std::chrono::steady_clock::now();
  PipelineSketch pk(cfg);
  if (budget_bits) {
    u64 declared = pk.measure().total_bits();
    if (declared > budget_bits)
      throw std::runtime_error("run: declared " + std::to_string(declared) +
                               " bits exceed the budget of " +
                               std::to_string(budget_bits));
  }
  feed_all(pk, sf.updates);
  out.report = pk.recover();
  out.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  out.timed = timing;
  out.net = net_graph(sf);
  out.report.validation = validate_matching(out.report.matching, out.net);
  out.mu = mu_bound(out.net);
  return out;
}

inline const char* fallback_name(FallbackPolicy f) {
  switch (f) {
    case FallbackPolicy::kParityStore: return "parity_store";
    case FallbackPolicy::kBestEffortMos: return "best_effort_mos";
    case FallbackPolicy::kError: return "error";
  }
  return "?";
}

inline FallbackPolicy fallback_from_name(const std::string& s) {
  if (s == "parity_store") return FallbackPolicy::kParityStore;
  if (s == "best_effort_mos") return FallbackPolicy::kBestEffortMos;
  if (s == "error") return FallbackPolicy::kError;
  throw std::invalid_argument("unknown fallback policy '" + s + "'");
}

inline const char* sparsify_state_name(SparsifyState s) {
  switch (s) {
    case SparsifyState::kBuilt: return "built";
    case SparsifyState::kUnreachable: return "unreachable";
    case SparsifyState::kOverBudget: return "over_budget";
    case SparsifyState::kNone: return "none";
  }
  return "?";
}

inline json report_to_json(const RunOutcome& out, const PipelineConfig& cfg) {
  json j;
  j["schema"] = 1;
  j["config"] = {{"n", cfg.n},
                 {"alpha", cfg.alpha},
                 {"delta", cfg.delta},
                 {"seed", cfg.seed},
                 {"fallback", fallback_name(cfg.fallback)},
                 {"small_alpha_threshold", cfg.small_alpha_threshold},
                 {"knob_match", cfg.knob_match},
                 {"knob_edges", cfg.knob_edges},
                 {"knob_mu", cfg.knob_mu}};

  json edges = json::array();
  for (auto& [u, v] : out.report.matching) edges.push_back({u, v});
  j["matching"] = std::move(edges);
  j["matching_size"] = out.report.matching.size();
  j["winning_opt"] = out.report.winning_opt;

  json per_guess = json::array();
  for (const auto& gi : out.report.guesses)
    per_guess.push_back({{"opt", gi.opt},
                         {"in_regime", gi.in_regime},
                         {"used_fallback", gi.used_fallback},
                         {"sparsify", sparsify_state_name(gi.sparsify)},
                         {"kept_easy", gi.kept_easy},
                         {"candidate_size", gi.candidate_size},
                         {"sketch_bits", gi.sketch_bits},
                         {"randomness_bits", gi.randomness_bits}});
  j["bits"] = {{"total", out.report.total_bits},
               {"randomness", out.report.randomness_bits},
               {"parity", out.report.parity_bits},
               {"per_guess", std::move(per_guess)}};

  j["regime_flags"] = {
      {"alpha_within_theorem", out.report.flags.alpha_within_theorem},
      {"alpha_exceeds_paper_constant",
       out.report.flags.alpha_exceeds_paper_constant},
      {"assumption_constant_relaxed",
       out.report.flags.assumption_constant_relaxed},
      {"small_alpha_branch", out.report.flags.small_alpha_branch}};

  const MatchVerdict& v = out.report.validation;
  json val = {{"disjoint", v.disjoint}, {"edges_present", v.edges_present}};
  if (!v.disjoint) val["repeated_vertex"] = v.repeated_vertex;
  if (!v.edges_present)
    val["missing_edge"] = {v.missing_edge.first, v.missing_edge.second};
  j["validation"] = std::move(val);

  j["ground_truth"] = {{"mu_lower", out.mu.lower},
                       {"mu_upper", out.mu.upper},
                       {"exact", out.mu.exact}};
  if (out.mu.upper == 0) {
    j["ratio"] = nullptr;
    j["ratio_lower_bound"] = nullptr;
  } else {
    j["ratio"] = out.mu.exact ? json((double)out.report.matching.size() /
                                     (double)out.mu.upper)
                              : json(nullptr);
    j["ratio_lower_bound"] =
        (double)out.report.matching.size() / (double)out.mu.upper;
  }
  if (out.timed) j["wall_ms"] = out.wall_ms;
  return j;
}

inline PipelineConfig config_from_json(const json& c) {
  PipelineConfig cfg;
  cfg.n = c.at("n").get<u32>();
  cfg.alpha = c.at("alpha").get<double>();
  cfg.delta = c.at("delta").get<double>();
  cfg.seed = c.at("seed").get<u64>();
  cfg.fallback = fallback_from_name(c.at("fallback").get<std::string>());
  cfg.small_alpha_threshold = c.at("small_alpha_threshold").get<double>();
  cfg.knob_match = c.at("knob_match").get<double>();
  cfg.knob_edges = c.at("knob_edges").get<double>();
  cfg.knob_mu = c.at("knob_mu").get<double>();
  return cfg;
}

struct VerifyOutcome {
  bool pass = true;
  std::vector<std::string> problems;

  void fail(std::string why) {
    pass = false;
    problems.push_back(std::move(why));
  }
};

// Re-derives everything checkable from the stream alone: the matching must
// be disjoint and made of net-graph edges, the counts and ratios must match
// a recomputation, and the declared bill of bits must agree with a freshly
// built (never fed) pipeline of the same config.
inline VerifyOutcome verify_report(const StreamFile& sf, const json& rep) {
  VerifyOutcome out;
  Graph net = net_graph(sf);

  if (!rep.contains("schema") || rep["schema"] != 1) {
    out.fail("unknown or missing schema");
    return out;
  }

  PipelineConfig cfg;
  try {
    cfg = config_from_json(rep.at("config"));
  } catch (const std::exception& e) {
    out.fail(std::string("bad config block: ") + e.what());
    return out;
  }
  if (cfg.n != sf.n)
    out.fail("config n " + std::to_string(cfg.n) + " vs stream n " +
             std::to_string(sf.n));

  std::vector<std::pair<u32, u32>> m;
  for (const auto& e : rep.at("matching")) {
    u64 a = e.at(0).get<u64>(), b = e.at(1).get<u64>();
    if (a >= sf.n || b >= sf.n || a == b) {
      out.fail("malformed matching edge (" + std::to_string(a) + "," +
               std::to_string(b) + ")");
      return out;
    }
    m.push_back({(u32)std::min(a, b), (u32)std::max(a, b)});
  }
  if (rep.at("matching_size").get<u64>() != m.size())
    out.fail("matching_size " + rep.at("matching_size").dump() +
             " but the matching lists " + std::to_string(m.size()));

  MatchVerdict verdict = validate_matching(m, net);
  if (!verdict.disjoint)
    out.fail("vertex " + std::to_string(verdict.repeated_vertex) +
             " is matched twice");
  if (!verdict.edges_present)
    out.fail("fabricated edge (" +
             std::to_string(verdict.missing_edge.first) + "," +
             std::to_string(verdict.missing_edge.second) +
             ") is absent from the net graph");

  MatchingBound mu = mu_bound(net);
  const json& gt = rep.at("ground_truth");
  if (gt.at("mu_lower").get<u64>() != mu.lower ||
      gt.at("mu_upper").get<u64>() != mu.upper ||
      gt.at("exact").get<bool>() != mu.exact)
    out.fail("ground truth disagrees with recomputation: mu in [" +
             std::to_string(mu.lower) + "," + std::to_string(mu.upper) + "]");
  if (mu.upper > 0) {
    double want = (double)m.size() / (double)mu.upper;
    if (!rep.at("ratio_lower_bound").is_number() ||
        rep.at("ratio_lower_bound").get<double>() != want)
      out.fail("ratio_lower_bound does not equal matching/mu_upper");
  }

  try {
    u64 declared = PipelineSketch(cfg).measure().total_bits();
    if (rep.at("bits").at("total").get<u64>() != declared)
      out.fail("declared bits " + rep.at("bits").at("total").dump() +
               " but this config measures " + std::to_string(declared));
  } catch (const std::exception& e) {
    out.fail(std::string("config does not construct: ") + e.what());
  }
  return out;
}

}  // namespace gsketch
