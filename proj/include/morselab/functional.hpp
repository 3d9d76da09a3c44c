#pragma once

// The quasilinear energy
//   f(u) = 1/(2p) int (1+|grad u|^2)^p dx + int G(u) dx
// on the discrete space of a Grid, together with its first and second
// differentials. All three evaluators are exact derivatives of one discrete
// scalar (midpoint quadrature, G taken at the cell average).

#include <functional>
#include <memory>
#include <json.hpp>
#include <string>

#include "morselab/grid.hpp"
#include "morselab/metric.hpp"

namespace morselab {

/// Nonlinearity G with its first two derivatives and the constants of the
/// growth bound |G(t)| <= beta |t|^alpha + delta.
struct GSpec {
  std::string name = "zero";
  std::function<double(double)> g = [](double) { return 0.0; };
  std::function<double(double)> g1 = [](double) { return 0.0; };
  std::function<double(double)> g2 = [](double) { return 0.0; };
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  /// G(-t) = G(t); enables the u -> -u symmetry checks.
  bool even = true;
  /// Parameters echoed into reports.
  nlohmann::json params = nlohmann::json::object();

  static GSpec zero();
  static GSpec linear(double c);
  /// -(lambda/2) t^2
  static GSpec quadratic(double lambda);
  /// -(lambda/2) t^2 + (kappa/4) t^4
  static GSpec doublewell(double lambda, double kappa);
};

/// {"name": "doublewell", "lambda": 15, "kappa": 1, "alpha"?: .., "beta"?: .., "delta"?: ..}
GSpec gspec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GSpec& g);

struct GrowthReport {
  double alpha = 0.0, beta = 0.0, delta = 0.0, p = 0.0;
  double t_min = 0.0, t_max = 0.0;
  int samples = 0;
  /// max over samples of |G(t)| - (beta|t|^alpha + delta)
  double max_excess = 0.0;
  double worst_t = 0.0;
  /// max over samples of -G(t) - (beta|t|^alpha + delta): the one-sided bound
  /// that coercivity of f actually relies on.
  double max_lower_excess = 0.0;
  bool alpha_ok = false;
  bool bound_ok = false;
  bool lower_bound_ok = false;
  bool passed = false;
};

/// Sampled check of the growth bound on [t_min, t_max]. A failed check is a
/// report outcome, never an exception; samples < 2 is a ConfigError.
GrowthReport validate_growth(const GSpec& g, double p, double t_min, double t_max, int samples);

nlohmann::json to_json(const GrowthReport& r);

struct OperatorSplit {
  Field principal;  ///< derivative of the gradient term alone
  Field lower;      ///< derivative of the G term alone
};

class EnergyFunctional {
 public:
  /// ConfigError unless p > dim/2 and alpha < 2p.
  EnergyFunctional(Grid grid, double p, GSpec g);

  const Grid& grid() const { return grid_; }
  double p() const { return p_; }
  const GSpec& gspec() const { return g_; }
  const StiffnessMetric& metric() const { return *metric_; }

  double energy(const Field& u) const;
  /// Covector: component j is df(u)[e_j] for the nodal basis vector e_j.
  Field gradient(const Field& u) const;
  /// Energy and gradient from one sweep.
  double energy_and_gradient(const Field& u, Field& grad) const;

  /// Exact Jacobian of gradient(): gram(u) + lower_order_hessian(u).
  SparseMatrix hessian(const Field& u) const;
  GramMatrix gram(const Field& u) const;
  /// Cell-average mass matrix weighted by G''(u).
  SparseMatrix lower_order_hessian(const Field& u) const;

  OperatorSplit operator_split(const Field& u) const;

  /// Dual stiffness norm of the gradient.
  double residual(const Field& u) const { return metric_->dual_norm(gradient(u)); }

 private:
  void sweep(const Field& u, bool want_energy, bool want_principal, bool want_lower, double* energy,
             Field* principal, Field* lower) const;

  Grid grid_;
  double p_;
  GSpec g_;
  std::shared_ptr<const StiffnessMetric> metric_;
};

}  // namespace morselab
