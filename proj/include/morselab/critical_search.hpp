#pragma once

// Damped, deflated, multistart Newton on df(u) = 0, followed by spectral
// classification of every root.

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "morselab/functional.hpp"
#include "morselab/spectral.hpp"

namespace morselab {

struct CriticalPoint {
  int id = -1;
  Field u;
  double energy = 0.0;
  double residual = 0.0;
  SpectralData spectral;
  bool nondegenerate = false;

  int index() const { return spectral.index; }
};

struct NewtonConfig {
  int max_iters = 100;
  /// Bound on the dual stiffness norm of df at an accepted root.
  double newton_tol = 1e-10;
  double backtrack_factor = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 40;
  /// <= 0 selects 1e-4 * domain diameter.
  double dedup_radius = 0.0;
  int seed_count = 40;
  std::uint64_t rng_seed = 1;
  /// Number of low Fourier modes used for structured seeds.
  int seed_modes = 3;
  double amplitude_min = 0.5;
  double amplitude_max = 6.0;
  int max_rounds = 4;
  double spectral_tol = 1e-8;

  void validate() const;
  double dedup_radius_for(const Grid& grid) const;
};

NewtonConfig newton_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NewtonConfig& c);

enum class NewtonStatus { converged, max_iters, stagnated, deflated_root };

std::string to_string(NewtonStatus s);

struct NewtonOutcome {
  NewtonStatus status = NewtonStatus::max_iters;
  Field u;
  double residual = 0.0;
  int iterations = 0;
  /// Iterations where the Hessian was singular and a Sobolev gradient step was taken instead.
  int gradient_steps = 0;
};

/// Newton on df = 0. With a nonempty deflation list the residual is scaled
/// by prod_i (1/|u - u_i|^2 + 1) (stiffness norm), so known roots repel.
NewtonOutcome newton_solve(const EnergyFunctional& f, const Field& u0, const NewtonConfig& cfg,
                           const std::vector<Field>& deflation = {});

struct SearchResult {
  std::vector<CriticalPoint> points;  ///< sorted by energy, ids 0..n-1
  bool any_degenerate = false;
  bool widened = false;
  int seeds_tried = 0;
  int rounds = 0;
  std::vector<std::string> diagnostics;
};

/// Multistart search: low-mode Fourier seeds plus smooth random fields,
/// progressive deflation between rounds, symmetry completion when G is
/// even, and one widened retry when exactly two points are found.
SearchResult multistart_search(const EnergyFunctional& f, const NewtonConfig& cfg);

/// Spectral classification of a converged root.
CriticalPoint classify_point(const EnergyFunctional& f, const Field& u, double spectral_tol);

/// Low-mode Dirichlet eigenfunction sin(k pi x / L) (products in 2D), ordered by frequency.
Field fourier_mode(const Grid& grid, int k);

struct PalaisSmaleOptions {
  /// Sequences with sup |u_n| above this are reported unbounded.
  double bound = 1e3;
  double residual_tol = 1e-2;
  int tail = 5;
  /// Tail diameter must stay below cauchy_tol * max(1, sup |u_n|).
  double cauchy_tol = 1e-2;
};

struct PalaisSmaleReport {
  double sup_norm = 0.0;
  bool bounded = false;
  double final_residual = 0.0;
  bool residual_to_zero = false;
  double tail_diameter = 0.0;
  bool cauchy_tail = false;
  bool passed = false;
};

/// Boundedness, vanishing residual and Cauchy tail of a sequence of states;
/// pass iff bounded and (residual -> 0 implies a Cauchy tail).
PalaisSmaleReport palais_smale_diagnostic(const EnergyFunctional& f, const std::vector<Field>& states,
                                          const PalaisSmaleOptions& opts = {});

nlohmann::json to_json(const PalaisSmaleReport& r);
/// {id, energy, residual, index, gap, ...}; field_ref is added by the caller.
nlohmann::json to_json(const CriticalPoint& cp);

}  // namespace morselab
