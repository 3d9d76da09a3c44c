#pragma once

// Energy-decreasing descent flow u' = -M^{-1} df(u), normalized by a conformal
// factor so the field is bounded, and mod-2 counting of connecting orbits
// between critical points of consecutive index.

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "morselab/critical_search.hpp"

namespace morselab {

enum class FlowMetric { stiffness, euclidean };
/// imex: the quasilinear principal part is taken implicitly through its Gram
/// matrix, (M + h B(u)) delta = -h df(u), and the G part explicitly, with
/// h = dt * conformal factor and dt = min(dt_max, cfl / rho(u)) a continuous
/// function of the state (rho bounds |G''| relative to M). explicit: forward
/// Euler delta = -h M^{-1} df(u) with dt grown on acceptance and halved on rejection.
enum class FlowScheme { imex, explicit_euler };

struct FlowConfig {
  FlowMetric metric = FlowMetric::stiffness;
  FlowScheme scheme = FlowScheme::imex;
  double dt_init = 0.05;
  double dt_min = 1e-14;
  double dt_max = 1.0;
  double dt_growth = 1.25;
  /// imex step: dt = min(dt_max, cfl / rho(u)).
  double cfl = 0.5;
  /// Armijo constant: accepted steps satisfy f_new <= f + c * df[delta] and f_new < f.
  double decrease_check = 1e-4;
  double limit_tol = 1e-3;
  /// Dual stiffness norm of df required, together with limit_tol proximity, to stop at a point.
  double limit_residual = 1e-1;
  /// <= 0 selects 10 * max(1, largest critical-point norm, norm of the start).
  double escape_radius = 0.0;
  long max_steps = 1000000;
  double epsilon_shoot = 1e-3;
  /// Edge tracking stops bisecting once two states with different limits are
  /// this close (stiffness norm, relative to max(1, |hi|)).
  double bisect_tol = 1e-12;
  int circle_samples = 64;
  /// Keep every `thin`-th state (the final `tail_keep` states are always kept).
  int thin = 10;
  int tail_keep = 8;

  void validate() const;
};

FlowConfig flow_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FlowConfig& c);

enum class LimitKind { critical_point, escaped, exhausted };

struct LimitClass {
  LimitKind kind = LimitKind::exhausted;
  int id = -1;
};

struct Trajectory {
  std::vector<Field> states;
  std::vector<long> steps;
  std::vector<double> energies;
  std::vector<double> residuals;
  LimitClass limit;
  long total_steps = 0;
  long rejected_steps = 0;
  std::string diagnostic;
};

/// Conformal factor: 1 on [0,1], 1/s on [2,inf), smooth and decreasing between.
double conformal_factor(double s);

Trajectory integrate_descent(const EnergyFunctional& f, const Field& u0, const FlowConfig& cfg,
                             const std::vector<CriticalPoint>& crit);

/// Nearest critical point within limit_tol (stiffness norm). AmbiguityError when
/// two points qualify. Returns an exhausted/escaped class (kind preserved from
/// `fallback`) when none does.
LimitClass classify_limit(const StiffnessMetric& metric, const Field& state,
                          const std::vector<CriticalPoint>& crit, double limit_tol,
                          LimitKind fallback = LimitKind::exhausted);
LimitClass classify_limit(const StiffnessMetric& metric, const Trajectory& traj,
                          const std::vector<CriticalPoint>& crit, double limit_tol);

/// Descent trajectories leaving `cp` along its unstable directions: two for
/// index 1, `circle_samples` uniformly spaced on the circle for index 2,
/// seeded random directions on the sphere above. PreconditionError for index 0.
std::vector<Trajectory> shoot_unstable(const EnergyFunctional& f, const CriticalPoint& cp,
                                       const FlowConfig& cfg, const std::vector<CriticalPoint>& crit);

struct ConnectionCount {
  int hi_id = -1;
  int lo_id = -1;
  int raw_count = 0;
  int mod2 = 0;
  bool resolved = true;
  std::string diagnostic;
};

struct ConnectionTable {
  std::vector<ConnectionCount> counts;  ///< one entry per point of index(hi) - 1
  std::vector<Trajectory> shots;        ///< sample trajectories (bisection refinements excluded)
  int bisection_flows = 0;
  bool resolved = true;
  std::string diagnostic;
};

/// Counts for every lower neighbour of `hi` at once. Index 1 uses the two
/// shots; index 2 classifies the circle of unstable directions by limiting
/// minimum and bisects every boundary until its flow line stops at a saddle.
ConnectionTable connection_table(const EnergyFunctional& f, const CriticalPoint& hi,
                                 const FlowConfig& cfg, const std::vector<CriticalPoint>& crit);

/// PreconditionError unless index(hi) - index(lo) == 1; DegenerateError for degenerate points.
ConnectionCount count_connections(const EnergyFunctional& f, const CriticalPoint& hi,
                                  const CriticalPoint& lo, const FlowConfig& cfg,
                                  const std::vector<CriticalPoint>& crit);

std::string to_string(LimitKind k);
nlohmann::json to_json(const ConnectionCount& c);
nlohmann::json to_json(const LimitClass& c);

/// Largest stiffness norm among the points, used for the automatic escape radius.
double escape_radius_for(const FlowConfig& cfg, const StiffnessMetric& metric,
                         const std::vector<CriticalPoint>& crit);

}  // namespace morselab
