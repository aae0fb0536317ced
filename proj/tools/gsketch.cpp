// Command line front end: stream generation, pipeline runs, verification.
//
//   gsketch gen    --family planted_matching --n 1024 --mu 256 --out s.txt
//   gsketch run    --stream s.txt --alpha 4 --report r.json
//   gsketch verify --stream s.txt --report r.json
//
// verify exits 0 on PASS and 1 on FAIL; everything else exits 2 on error.
// SKETCH_SEED in the environment overrides --seed for gen and run.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gsketch/generators.hpp"
#include "gsketch/report.hpp"

namespace {

std::optional<gsketch::u64> env_seed() {
  const char* s = std::getenv("SKETCH_SEED");
  if (!s || !*s) return std::nullopt;
  return std::stoull(s);
}

gsketch::StreamFile load_stream(const std::string& path) {
  if (path == "-") return gsketch::parse_stream(std::cin);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stream file " + path);
  return gsketch::parse_stream(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gsketch;
  CLI::App app{"linear-sketch matching toolkit"};
  app.require_subcommand(1);

  // ------------------------------------------------------------------ gen
  auto* gen = app.add_subcommand("gen", "generate a benchmark stream");
  std::string family = "planted_matching";
  InstanceSpec spec;
  std::string gen_out = "-";
  gen->add_option("--family", family,
                  "erdos_renyi | planted_matching | hard_sparse_induced");
  gen->add_option("--n", spec.n, "vertex count")->required();
  gen->add_option("--p", spec.p, "erdos_renyi edge probability");
  gen->add_option("--mu", spec.mu, "planted matching size");
  gen->add_option("--alpha", spec.alpha, "hard family distractor ratio");
  gen->add_option("--noise", spec.noise, "hard family sparse-side noise");
  gen->add_option("--deletion-fraction", spec.deletion_fraction,
                  "fraction of churned edges");
  gen->add_option("--seed", spec.seed, "generator seed");
  gen->add_option("--out", gen_out, "output path, - for stdout");

  // ------------------------------------------------------------------ run
  auto* run = app.add_subcommand("run", "feed a stream and recover");
  std::string run_stream, run_report = "-", run_fallback = "parity_store";
  PipelineConfig cfg;
  u64 budget_bits = 0;
  bool timing = false;
  run->add_option("--stream", run_stream, "stream path, - for stdin")
      ->required();
  run->add_option("--alpha", cfg.alpha, "approximation target")->required();
  run->add_option("--delta", cfg.delta, "regime exponent");
  run->add_option("--seed", cfg.seed, "sketch seed");
  run->add_option("--fallback", run_fallback,
                  "parity_store | best_effort_mos | error");
  run->add_option("--small-alpha-threshold", cfg.small_alpha_threshold,
                  "alpha at or below this routes to the parity store");
  run->add_option("--knob-match", cfg.knob_match, "easy-matching cutoff knob");
  run->add_option("--knob-edges", cfg.knob_edges, "sparsity bound knob");
  run->add_option("--knob-mu", cfg.knob_mu, "residual optimum knob");
  run->add_option("--budget-bits", budget_bits,
                  "reject sketches declaring more bits than this (0 = off)");
  run->add_option("--report", run_report, "report path, - for stdout");
  run->add_flag("--timing", timing, "include wall_ms in the report");

  // --------------------------------------------------------------- verify
  auto* verify = app.add_subcommand("verify", "check a report against its stream");
  std::string ver_stream, ver_report;
  verify->add_option("--stream", ver_stream, "stream path")->required();
  verify->add_option("--report", ver_report, "report path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      spec.family = family_from_name(family);
      if (auto s = env_seed()) spec.seed = *s;
      GeneratedInstance inst = generate(spec);
      std::ostringstream os;
      write_stream(os, inst.stream);
      write_text(gen_out, os.str());
      std::cerr << "generated " << inst.stream.updates.size()
                << " updates, planted matching " << inst.planted_mu
                << ", churned pairs " << inst.churned << "\n";
      return 0;
    }

    if (run->parsed()) {
      StreamFile sf = load_stream(run_stream);
      cfg.n = sf.n;
      cfg.fallback = fallback_from_name(run_fallback);
      if (auto s = env_seed()) cfg.seed = *s;
      RunOutcome out = run_pipeline(sf, cfg, timing, budget_bits);
      write_text(run_report, report_to_json(out, cfg).dump(2) + "\n");
      return 0;
    }

    if (verify->parsed()) {
      StreamFile sf = load_stream(ver_stream);
      std::ifstream in(ver_report);
      if (!in) throw std::runtime_error("cannot open report " + ver_report);
      json rep = json::parse(in);
      VerifyOutcome out = verify_report(sf, rep);
      if (out.pass) {
        std::cout << "PASS\n";
        return 0;
      }
      std::cout << "FAIL\n";
      for (const auto& p : out.problems) std::cout << "  " << p << "\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
