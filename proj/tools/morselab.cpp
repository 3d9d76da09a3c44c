// morselab: configuration-driven runner for the discrete Morse homology pipeline.
//
//   morselab validate        --config C
//   morselab critical-points --config C [--out DIR] [--seed N] [--check]
//   morselab homology        --config C [--out DIR] [--seed N] [--check]
//   morselab plot            --config C --kind K [--out DIR] [--seed N]
//
// Exit status: 0 iff every invariant check passed, 1 on a failed check or
// stage, 2 on bad usage or configuration.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "morselab/error.hpp"
#include "morselab/experiment.hpp"
#include "morselab/simd/kernels.hpp"

namespace {

using namespace morselab;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool check = false;
  bool json = false;
  std::string kind;
};

void print_summary(const ExperimentReport& r) {
  std::printf("experiment %s  (kernels: %s)\n", r.config.name.c_str(),
              std::string(simd::active_kernels().name).c_str());
  if (r.search) {
    std::printf("%-4s %-6s %-22s %-12s %-12s\n", "id", "index", "energy", "residual", "gap");
    for (const auto& cp : r.search->points) {
      std::printf("%-4d %-6d %-22.15g %-12.3e %-12.3e\n", cp.id, cp.index(), cp.energy,
                  cp.residual, cp.spectral.gap);
    }
  }
  for (const auto& c : r.counts) {
    std::printf("connections %d -> %d : raw %d, mod 2 = %d%s\n", c.hi_id, c.lo_id, c.raw_count,
                c.mod2, c.resolved ? "" : "  (unresolved)");
  }
  if (r.homology) {
    std::printf("betti (");
    for (std::size_t k = 0; k < r.homology->betti.size(); ++k) {
      std::printf("%s%d", k ? "," : "", r.homology->betti[k]);
    }
    std::printf(")\n");
  }
  for (const auto& c : r.checks) {
    std::printf("%s %-22s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  }
  if (!r.failed_stage.empty()) {
    std::printf("FAIL stage %s: %s\n", r.failed_stage.c_str(), r.failure_reason.c_str());
  }
}

int execute(const Options& o, Stage stage, const std::string& plot_kind) {
  ExperimentConfig cfg = load_experiment_config(o.config);
  if (o.seed) cfg.rng_seed = *o.seed;
  if (!o.out.empty()) cfg.outputs = o.out;
  if (plot_kind == "energy_landscape" && cfg.grid.dim != 1) {
    throw UsageError("energy_landscape is available for 1D grids only");
  }

  const ExperimentReport report = run(cfg, stage);
  if (o.json) {
    std::cout << report.to_json(true).dump(2) << "\n";
  } else {
    print_summary(report);
  }
  if (stage != Stage::validate && !o.check && !cfg.outputs.empty()) {
    auto files = write_artifacts(report, cfg.outputs);
    if (!plot_kind.empty() && report.failed_stage.empty()) {
      const auto more = emit_plotdata(report, plot_kind, cfg.outputs);
      files.insert(files.end(), more.begin(), more.end());
    }
    if (!o.json) std::printf("wrote %zu files to %s\n", files.size(), cfg.outputs.c_str());
  } else if (!plot_kind.empty() && !o.check) {
    throw UsageError("plot needs an output directory (--out or config 'outputs')");
  }
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Morse homology of quasilinear energies on a grid"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool with_outputs) {
    sub->add_option("--config", o.config, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_outputs) {
      sub->add_option("--out", o.out, "artifact directory (overrides config 'outputs')");
      sub->add_option("--seed", seed, "root RNG seed (overrides config 'rng_seed')");
      sub->add_flag("--json", o.json, "print the full report as JSON instead of a summary");
    }
  };

  auto* validate = app.add_subcommand("validate", "check the config and the growth conditions on G");
  add_common(validate, false);
  auto* points = app.add_subcommand("critical-points", "find and classify critical points");
  add_common(points, true);
  points->add_flag("--check", o.check, "run the invariant suite only, write no artifacts");
  auto* homology = app.add_subcommand("homology", "full pipeline up to Betti numbers");
  add_common(homology, true);
  homology->add_flag("--check", o.check, "run the invariant suite only, write no artifacts");
  auto* plot = app.add_subcommand("plot", "run the pipeline and emit CSV plot data");
  add_common(plot, true);
  plot->add_option("--kind", o.kind, "energy_landscape | trajectories | spectrum")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (auto* sub : {points, homology, plot}) {
    if (sub->parsed() && sub->count("--seed") > 0) o.seed = seed;
  }

  try {
    if (validate->parsed()) return execute(o, Stage::validate, "");
    if (points->parsed()) return execute(o, Stage::critical_points, "");
    if (homology->parsed()) return execute(o, Stage::homology, "");
    if (o.kind != "energy_landscape" && o.kind != "trajectories" && o.kind != "spectrum") {
      throw UsageError("unknown plot kind '" + o.kind +
                       "' (expected energy_landscape, trajectories or spectrum)");
    }
    return execute(o, o.kind == "spectrum" ? Stage::critical_points : Stage::homology, o.kind);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "morselab: configuration error: %s\n", e.what());
    return 2;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "morselab: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "morselab: %s\n", e.what());
    return 1;
  }
}
