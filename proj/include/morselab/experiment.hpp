#pragma once

// Configuration-driven pipeline: growth check, critical point search, spectral
// classification, connection counting, chain complex and homology, plus the
// invariant checks that decide the exit status.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "morselab/critical_search.hpp"
#include "morselab/flow.hpp"
#include "morselab/functional.hpp"
#include "morselab/morse_complex.hpp"

namespace morselab {

struct ExperimentConfig {
  std::string name = "experiment";
  GridSpec grid;
  double p = 2.0;
  nlohmann::json g = {{"name", "zero"}};
  double growth_t_min = -10.0;
  double growth_t_max = 10.0;
  int growth_samples = 2001;
  NewtonConfig newton;
  FlowConfig flow;
  std::string outputs;  ///< artifact directory; empty disables file output
  std::uint64_t rng_seed = 1;
  // invariant suite
  double lyapunov_radius = 1e-2;
  int lyapunov_samples = 50;
  int hyperbolic_samples = 20;
  int probe_trajectories = 4;
  PalaisSmaleOptions palais_smale;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

/// How far run() goes. Each stage includes the previous ones.
enum class Stage { validate, critical_points, homology };

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct StoredTrajectory {
  std::string source;  ///< "shot" or "probe"
  int from_id = -1;    ///< shooting critical point, -1 for probes
  Trajectory trajectory;
  PalaisSmaleReport palais_smale;
};

struct ExperimentReport {
  ExperimentConfig config;
  Stage stage = Stage::homology;
  std::shared_ptr<const EnergyFunctional> functional;
  std::string failed_stage;  ///< empty when every requested stage ran
  std::string failure_reason;
  std::optional<GrowthReport> growth;
  std::optional<SearchResult> search;
  std::vector<ConnectionCount> counts;
  std::vector<StoredTrajectory> trajectories;
  std::optional<ChainComplex> complex;
  std::optional<HomologyResult> homology;
  std::vector<CheckResult> checks;
  nlohmann::json timings = nlohmann::json::object();

  bool passed() const;
  /// Timings are kept under their own key so reports can be compared bitwise without them.
  nlohmann::json to_json(bool include_timings = true) const;
};

ExperimentReport run(const ExperimentConfig& cfg, Stage stage = Stage::homology);

/// Writes {name}_report.json, one CSV per critical point and the count table.
/// Returns the written paths.
std::vector<std::string> write_artifacts(const ExperimentReport& report, const std::string& dir);

/// kind: energy_landscape (1D only), trajectories or spectrum. Files are named
/// {name}_{kind}.csv; trajectories adds {name}_trajectories_{k}.csv per stored
/// trajectory. Unknown kind -> UsageError.
std::vector<std::string> emit_plotdata(const ExperimentReport& report, const std::string& kind,
                                       const std::string& dir);

/// Deterministic substream seed for a pipeline stage.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

}  // namespace morselab
