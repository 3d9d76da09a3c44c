#include "morselab/functional.hpp"

#include <cmath>
#include <limits>

#include "morselab/error.hpp"
#include "morselab/simd/kernels.hpp"

namespace morselab {

GSpec GSpec::zero() {
  GSpec s;
  s.name = "zero";
  return s;
}

GSpec GSpec::linear(double c) {
  GSpec s;
  s.name = "linear";
  s.g = [c](double t) { return c * t; };
  s.g1 = [c](double) { return c; };
  s.g2 = [](double) { return 0.0; };
  s.alpha = 1.0;
  s.beta = std::abs(c);
  s.delta = 0.0;
  s.even = c == 0.0;
  s.params = {{"c", c}};
  return s;
}

GSpec GSpec::quadratic(double lambda) {
  GSpec s;
  s.name = "quadratic";
  s.g = [lambda](double t) { return -0.5 * lambda * t * t; };
  s.g1 = [lambda](double t) { return -lambda * t; };
  s.g2 = [lambda](double) { return -lambda; };
  s.alpha = 2.0;
  s.beta = 0.5 * std::abs(lambda);
  s.delta = 0.0;
  s.params = {{"lambda", lambda}};
  return s;
}

GSpec GSpec::doublewell(double lambda, double kappa) {
  if (!(kappa > 0.0)) throw ConfigError("doublewell needs kappa > 0");
  GSpec s;
  s.name = "doublewell";
  s.g = [lambda, kappa](double t) {
    const double t2 = t * t;
    return -0.5 * lambda * t2 + 0.25 * kappa * t2 * t2;
  };
  s.g1 = [lambda, kappa](double t) { return -lambda * t + kappa * t * t * t; };
  s.g2 = [lambda, kappa](double t) { return -lambda + 3.0 * kappa * t * t; };
  // G is bounded below by -lambda^2/(4 kappa): the lower bound holds with alpha = 0.
  s.alpha = 0.0;
  s.beta = 0.0;
  s.delta = lambda * lambda / (4.0 * kappa);
  s.params = {{"lambda", lambda}, {"kappa", kappa}};
  return s;
}

GSpec gspec_from_json(const nlohmann::json& j) {
  GSpec s;
  try {
    const auto name = j.at("name").get<std::string>();
    if (name == "zero") {
      s = GSpec::zero();
    } else if (name == "linear") {
      s = GSpec::linear(j.at("c").get<double>());
    } else if (name == "quadratic") {
      s = GSpec::quadratic(j.at("lambda").get<double>());
    } else if (name == "doublewell") {
      s = GSpec::doublewell(j.at("lambda").get<double>(), j.value("kappa", 1.0));
    } else {
      throw ConfigError("unknown G family '" + name +
                        "' (expected zero, linear, quadratic, doublewell)");
    }
    if (j.contains("alpha")) s.alpha = j["alpha"].get<double>();
    if (j.contains("beta")) s.beta = j["beta"].get<double>();
    if (j.contains("delta")) s.delta = j["delta"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed G spec: ") + e.what());
  }
  if (s.alpha < 0.0 || s.beta < 0.0 || s.delta < 0.0) {
    throw ConfigError("growth constants alpha, beta, delta must be >= 0");
  }
  return s;
}

nlohmann::json to_json(const GSpec& g) {
  nlohmann::json j = g.params;
  j["name"] = g.name;
  j["alpha"] = g.alpha;
  j["beta"] = g.beta;
  j["delta"] = g.delta;
  return j;
}

GrowthReport validate_growth(const GSpec& g, double p, double t_min, double t_max, int samples) {
  if (samples < 2) throw ConfigError("growth validation needs at least 2 samples");
  if (!(t_max > t_min)) throw ConfigError("growth window must satisfy t_min < t_max");
  GrowthReport r;
  r.alpha = g.alpha;
  r.beta = g.beta;
  r.delta = g.delta;
  r.p = p;
  r.t_min = t_min;
  r.t_max = t_max;
  r.samples = samples;
  r.max_excess = -std::numeric_limits<double>::infinity();
  r.max_lower_excess = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double t = t_min + (t_max - t_min) * i / (samples - 1);
    const double bound = g.beta * std::pow(std::abs(t), g.alpha) + g.delta;
    const double val = g.g(t);
    const double excess = std::abs(val) - bound;
    if (excess > r.max_excess || !std::isfinite(excess)) {
      r.max_excess = std::isfinite(excess) ? excess : std::numeric_limits<double>::infinity();
      r.worst_t = t;
    }
    r.max_lower_excess = std::max(r.max_lower_excess, -val - bound);
  }
  r.alpha_ok = g.alpha < 2.0 * p;
  r.bound_ok = r.max_excess <= 0.0;
  r.lower_bound_ok = r.max_lower_excess <= 0.0;
  r.passed = r.alpha_ok && r.bound_ok;
  return r;
}

nlohmann::json to_json(const GrowthReport& r) {
  return {{"alpha", r.alpha},
          {"beta", r.beta},
          {"delta", r.delta},
          {"p", r.p},
          {"window", {r.t_min, r.t_max}},
          {"samples", r.samples},
          {"max_excess", r.max_excess},
          {"worst_t", r.worst_t},
          {"max_lower_excess", r.max_lower_excess},
          {"alpha_ok", r.alpha_ok},
          {"bound_ok", r.bound_ok},
          {"lower_bound_ok", r.lower_bound_ok},
          {"passed", r.passed}};
}

EnergyFunctional::EnergyFunctional(Grid grid, double p, GSpec g)
    : grid_(std::move(grid)), p_(p), g_(std::move(g)) {
  check_exponent(grid_, p_);
  if (!(g_.alpha < 2.0 * p_)) {
    throw ConfigError("growth exponent alpha = " + std::to_string(g_.alpha) +
                      " must be < 2p = " + std::to_string(2.0 * p_));
  }
  metric_ = std::make_shared<const StiffnessMetric>(grid_);
}

void EnergyFunctional::sweep(const Field& u, bool want_energy, bool want_principal, bool want_lower,
                             double* energy, Field* principal, Field* lower) const {
  const auto& k = simd::active_kernels();
  const Grid& grid = grid_;
  const std::size_t nc = grid.cell_count();
  const bool two_d = grid.dim() == 2;
  const double vol = grid.cell_volume();

  const auto grads = gradient_field(grid, u);
  const auto avgs = cell_averages(grid, u);

  if (want_energy || want_principal) {
    std::vector<double> s(nc), wp(nc), w1(nc), w2(nc);
    k.squared_norm(grads.gx.data(), two_d ? grads.gy.data() : nullptr, s.data(), nc);
    k.cell_weights(s.data(), p_, wp.data(), w1.data(), w2.data(), nc);
    if (want_energy) {
      double acc = 0.0;
      for (double w : wp) acc += w;
      *energy = vol * acc / (2.0 * p_);
    }
    if (want_principal) {
      principal->setZero(static_cast<Eigen::Index>(grid.dof_count()));
      std::vector<double> fx(nc), fy(two_d ? nc : 0);
      k.multiply(w1.data(), grads.gx.data(), fx.data(), nc);
      const int n0 = grid.interior(0);
      const auto cw = static_cast<std::size_t>(grid.cells_along(0));
      const double sx = vol / grid.spacing(0);
      if (!two_d) {
        k.accumulate_difference(fx.data(), fx.data() + 1, sx, principal->data(),
                                static_cast<std::size_t>(n0));
      } else {
        k.multiply(w1.data(), grads.gy.data(), fy.data(), nc);
        const double sy = vol / grid.spacing(1);
        for (int b = 1; b <= grid.interior(1); ++b) {
          double* out = principal->data() + static_cast<std::size_t>(b - 1) * n0;
          const double* fx_row = fx.data() + static_cast<std::size_t>(b) * cw;
          const double* fy_below = fy.data() + static_cast<std::size_t>(b - 1) * cw;
          const double* fy_here = fy.data() + static_cast<std::size_t>(b) * cw;
          k.accumulate_difference(fx_row, fx_row + 1, sx, out, static_cast<std::size_t>(n0));
          k.accumulate_difference(fy_below + 1, fy_here + 1, sy, out, static_cast<std::size_t>(n0));
        }
      }
    }
  }

  if (want_energy) {
    double acc = 0.0;
    for (double a : avgs) acc += g_.g(a);
    *energy += vol * acc;
  }

  if (want_lower) {
    lower->setZero(static_cast<Eigen::Index>(grid.dof_count()));
    std::vector<double> gp(nc);
    for (std::size_t c = 0; c < nc; ++c) gp[c] = g_.g1(avgs[c]);
    const int n0 = grid.interior(0);
    if (!two_d) {
      const double w = 0.5 * vol;
      for (int a = 0; a < n0; ++a) (*lower)[a] = w * (gp[a] + gp[a + 1]);
    } else {
      const double w = 0.25 * vol;
      const auto cw = static_cast<std::size_t>(grid.cells_along(0));
      for (int b = 1; b <= grid.interior(1); ++b) {
        const double* below = gp.data() + static_cast<std::size_t>(b - 1) * cw;
        const double* here = gp.data() + static_cast<std::size_t>(b) * cw;
        for (int a = 1; a <= n0; ++a) {
          (*lower)[(b - 1) * n0 + (a - 1)] =
              w * (below[a - 1] + below[a] + here[a - 1] + here[a]);
        }
      }
    }
  }
}

double EnergyFunctional::energy(const Field& u) const {
  double e = 0.0;
  sweep(u, true, false, false, &e, nullptr, nullptr);
  return e;
}

Field EnergyFunctional::gradient(const Field& u) const {
  Field principal, lower;
  sweep(u, false, true, true, nullptr, &principal, &lower);
  return principal + lower;
}

double EnergyFunctional::energy_and_gradient(const Field& u, Field& grad) const {
  double e = 0.0;
  Field principal, lower;
  sweep(u, true, true, true, &e, &principal, &lower);
  grad = principal + lower;
  return e;
}

OperatorSplit EnergyFunctional::operator_split(const Field& u) const {
  OperatorSplit out;
  sweep(u, false, true, true, nullptr, &out.principal, &out.lower);
  return out;
}

GramMatrix EnergyFunctional::gram(const Field& u) const { return gram_matrix(grid_, u, p_); }

SparseMatrix EnergyFunctional::lower_order_hessian(const Field& u) const {
  const auto avgs = cell_averages(grid_, u);
  std::vector<double> coeff(avgs.size());
  for (std::size_t c = 0; c < avgs.size(); ++c) coeff[c] = g_.g2(avgs[c]);
  return cell_mass_matrix(grid_, coeff);
}

SparseMatrix EnergyFunctional::hessian(const Field& u) const {
  SparseMatrix a = gram(u).matrix + lower_order_hessian(u);
  a.prune(0.0);
  return a;
}

}  // namespace morselab
