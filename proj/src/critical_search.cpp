#include "morselab/critical_search.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "morselab/error.hpp"
#include "morselab/parallel.hpp"

namespace morselab {

void NewtonConfig::validate() const {
  if (max_iters < 1) throw ConfigError("newton.max_iters must be >= 1");
  if (!(newton_tol > 0.0)) throw ConfigError("newton.newton_tol must be positive");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw ConfigError("newton.backtrack_factor must lie in (0, 1)");
  }
  if (!(armijo > 0.0 && armijo < 1.0)) throw ConfigError("newton.armijo must lie in (0, 1)");
  if (seed_count < 1) throw ConfigError("newton.seed_count must be >= 1");
  if (seed_modes < 1) throw ConfigError("newton.seed_modes must be >= 1");
  if (!(amplitude_min > 0.0 && amplitude_max >= amplitude_min)) {
    throw ConfigError("newton amplitude window must satisfy 0 < min <= max");
  }
  if (max_rounds < 1) throw ConfigError("newton.max_rounds must be >= 1");
  if (!(spectral_tol > 0.0)) throw ConfigError("newton.spectral_tol must be positive");
}

double NewtonConfig::dedup_radius_for(const Grid& grid) const {
  return dedup_radius > 0.0 ? dedup_radius : 1e-4 * grid.diameter();
}

NewtonConfig newton_config_from_json(const nlohmann::json& j) {
  NewtonConfig c;
  try {
    c.max_iters = j.value("max_iters", c.max_iters);
    c.newton_tol = j.value("newton_tol", c.newton_tol);
    c.backtrack_factor = j.value("backtrack_factor", c.backtrack_factor);
    c.armijo = j.value("armijo", c.armijo);
    c.max_backtracks = j.value("max_backtracks", c.max_backtracks);
    c.dedup_radius = j.value("dedup_radius", c.dedup_radius);
    c.seed_count = j.value("seed_count", c.seed_count);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    c.seed_modes = j.value("seed_modes", c.seed_modes);
    c.amplitude_min = j.value("amplitude_min", c.amplitude_min);
    c.amplitude_max = j.value("amplitude_max", c.amplitude_max);
    c.max_rounds = j.value("max_rounds", c.max_rounds);
    c.spectral_tol = j.value("spectral_tol", c.spectral_tol);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed newton config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const NewtonConfig& c) {
  return {{"max_iters", c.max_iters},         {"newton_tol", c.newton_tol},
          {"backtrack_factor", c.backtrack_factor}, {"armijo", c.armijo},
          {"max_backtracks", c.max_backtracks}, {"dedup_radius", c.dedup_radius},
          {"seed_count", c.seed_count},       {"rng_seed", c.rng_seed},
          {"seed_modes", c.seed_modes},       {"amplitude_min", c.amplitude_min},
          {"amplitude_max", c.amplitude_max}, {"max_rounds", c.max_rounds},
          {"spectral_tol", c.spectral_tol}};
}

std::string to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::converged: return "converged";
    case NewtonStatus::max_iters: return "max_iters";
    case NewtonStatus::stagnated: return "stagnated";
    case NewtonStatus::deflated_root: return "deflated_root";
  }
  return "unknown";
}

namespace {

struct Deflation {
  double factor = 1.0;
  Field log_gradient;  ///< grad(m) / m
};

Deflation deflation_at(const StiffnessMetric& metric, const Field& u,
                       const std::vector<Field>& roots) {
  Deflation d;
  d.log_gradient = Field::Zero(u.size());
  for (const auto& root : roots) {
    const Field diff = u - root;
    const Field sdiff = metric.matrix() * diff;
    const double dist2 = std::max(diff.dot(sdiff), 1e-300);
    const double mi = 1.0 / dist2 + 1.0;
    d.factor *= mi;
    // grad(1/d^2 + 1) = -2 S diff / d^4
    d.log_gradient += (-2.0 / (dist2 * dist2) / mi) * sdiff;
  }
  return d;
}

double deflated_merit(const EnergyFunctional& f, const Field& u, const std::vector<Field>& roots) {
  const double r = f.residual(u);
  if (roots.empty()) return r;
  return deflation_at(f.metric(), u, roots).factor * r;
}

}  // namespace

NewtonOutcome newton_solve(const EnergyFunctional& f, const Field& u0, const NewtonConfig& cfg,
                           const std::vector<Field>& deflation) {
  cfg.validate();
  f.grid().check_field(u0);
  const auto& metric = f.metric();
  const double dedup = cfg.dedup_radius_for(f.grid());

  NewtonOutcome out;
  out.u = u0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    out.iterations = it;
    const Field g = f.gradient(out.u);
    out.residual = metric.dual_norm(g);
    if (!std::isfinite(out.residual)) {
      out.status = NewtonStatus::stagnated;
      return out;
    }
    if (out.residual <= cfg.newton_tol) {
      out.status = NewtonStatus::converged;
      for (const auto& root : deflation) {
        if (metric.distance(out.u, root) < dedup) out.status = NewtonStatus::deflated_root;
      }
      return out;
    }

    Field step;
    bool newton_step = true;
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(f.hessian(out.u));
    if (lu.info() == Eigen::Success) {
      step = -lu.solve(g);
      if (lu.info() != Eigen::Success || !step.allFinite()) newton_step = false;
    } else {
      newton_step = false;
    }

    if (!newton_step) {
      // Singular Jacobian: Sobolev gradient step with Armijo backtracking on the energy.
      ++out.gradient_steps;
      const Field d = -metric.solve(g);
      const double e0 = f.energy(out.u);
      const double slope = g.dot(d);
      double alpha = 1.0;
      bool moved = false;
      for (int k = 0; k < cfg.max_backtracks; ++k, alpha *= cfg.backtrack_factor) {
        if (f.energy(out.u + alpha * d) <= e0 + cfg.armijo * alpha * slope) {
          out.u += alpha * d;
          moved = true;
          break;
        }
      }
      if (!moved) {
        out.status = NewtonStatus::stagnated;
        return out;
      }
      continue;
    }

    if (!deflation.empty()) {
      const auto d = deflation_at(metric, out.u, deflation);
      const double denom = 1.0 - d.log_gradient.dot(step);
      if (std::isfinite(denom) && std::abs(denom) > 1e-14) step /= denom;
    }

    const double merit0 = deflated_merit(f, out.u, deflation);
    double alpha = 1.0;
    bool accepted = false;
    for (int k = 0; k < cfg.max_backtracks; ++k, alpha *= cfg.backtrack_factor) {
      const Field trial = out.u + alpha * step;
      const double merit = deflated_merit(f, trial, deflation);
      if (std::isfinite(merit) && merit < (1.0 - cfg.armijo * alpha) * merit0) {
        out.u = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.status = NewtonStatus::stagnated;
      return out;
    }
  }
  out.iterations = cfg.max_iters;
  out.residual = f.residual(out.u);
  out.status = out.residual <= cfg.newton_tol ? NewtonStatus::converged : NewtonStatus::max_iters;
  if (out.status == NewtonStatus::converged) {
    for (const auto& root : deflation) {
      if (metric.distance(out.u, root) < dedup) out.status = NewtonStatus::deflated_root;
    }
  }
  return out;
}

Field fourier_mode(const Grid& grid, int k) {
  if (k < 0) throw ConfigError("mode number must be >= 0");
  const double lx = grid.extent(0);
  if (grid.dim() == 1) {
    const int m = k + 1;
    return grid.interpolate(
        [&](double x, double) { return std::sin(m * std::numbers::pi * x / lx); });
  }
  const double ly = grid.extent(1);
  // Enumerate (i, j) >= 1 by i^2 + j^2, ties by i.
  std::vector<std::pair<int, int>> pairs;
  const int lim = k + 2;
  for (int i = 1; i <= lim; ++i) {
    for (int j = 1; j <= lim; ++j) pairs.emplace_back(i, j);
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    const int na = a.first * a.first + a.second * a.second;
    const int nb = b.first * b.first + b.second * b.second;
    return na != nb ? na < nb : a.first < b.first;
  });
  const auto [mi, mj] = pairs[static_cast<std::size_t>(k)];
  return grid.interpolate([&](double x, double y) {
    return std::sin(mi * std::numbers::pi * x / lx) * std::sin(mj * std::numbers::pi * y / ly);
  });
}

CriticalPoint classify_point(const EnergyFunctional& f, const Field& u, double spectral_tol) {
  CriticalPoint cp;
  cp.u = u;
  cp.energy = f.energy(u);
  cp.residual = f.residual(u);
  cp.spectral = analyze(f, u, spectral_tol);
  cp.nondegenerate = cp.spectral.nondegenerate;
  return cp;
}

namespace {

std::vector<Field> make_seeds(const Grid& grid, const NewtonConfig& cfg) {
  std::vector<Field> seeds;
  const int modes = cfg.seed_modes;
  std::vector<Field> basis;
  for (int k = 0; k < 2 * modes; ++k) basis.push_back(fourier_mode(grid, k));

  const std::array<double, 3> levels{
      cfg.amplitude_min, std::sqrt(cfg.amplitude_min * cfg.amplitude_max), cfg.amplitude_max};
  for (int k = 0; k < modes; ++k) {
    for (double a : levels) {
      seeds.push_back(a * basis[k]);
      seeds.push_back(-a * basis[k]);
    }
  }
  for (int k = 0; k < modes; ++k) {
    for (int l = k + 1; l < modes; ++l) {
      seeds.push_back(levels[1] * (basis[k] + basis[l]));
      seeds.push_back(levels[1] * (basis[k] - basis[l]));
    }
  }

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> amp(cfg.amplitude_min, cfg.amplitude_max);
  const double noise = std::min(grid.spacing(0), grid.dim() == 2 ? grid.spacing(1) : 1.0);
  while (static_cast<int>(seeds.size()) < cfg.seed_count) {
    Field u = Field::Zero(static_cast<Eigen::Index>(grid.dof_count()));
    for (const auto& b : basis) u += unit(rng) * b;
    const double peak = std::max(u.cwiseAbs().maxCoeff(), 1e-12);
    u *= amp(rng) / peak;
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] += noise * unit(rng);
    seeds.push_back(std::move(u));
  }
  if (static_cast<int>(seeds.size()) > cfg.seed_count) {
    seeds.resize(static_cast<std::size_t>(cfg.seed_count));
  }
  return seeds;
}

// Adds `cand` unless an equivalent point (same index within the dedup radius)
// is already present. Returns true when added.
bool merge_point(const EnergyFunctional& f, std::vector<CriticalPoint>& found, const Field& cand,
                 double dedup, double spectral_tol, std::vector<std::string>& diagnostics) {
  std::vector<std::size_t> near;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (f.metric().distance(found[i].u, cand) < dedup) near.push_back(i);
  }
  if (near.empty()) {
    found.push_back(classify_point(f, cand, spectral_tol));
    return true;
  }
  CriticalPoint cp = classify_point(f, cand, spectral_tol);
  for (auto i : near) {
    if (found[i].index() == cp.index()) return false;
  }
  diagnostics.push_back("dedup collision: root within dedup radius of a point with a different "
                        "index (energy " + std::to_string(cp.energy) + ")");
  found.push_back(std::move(cp));
  return true;
}

void sort_and_number(std::vector<CriticalPoint>& pts) {
  std::stable_sort(pts.begin(), pts.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    const double tol = 1e-9 * (1.0 + std::abs(a.energy) + std::abs(b.energy));
    if (std::abs(a.energy - b.energy) > tol) return a.energy < b.energy;
    return a.u.sum() > b.u.sum();
  });
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].id = static_cast<int>(i);
}

void search_rounds(const EnergyFunctional& f, const NewtonConfig& cfg, SearchResult& res) {
  const auto seeds = make_seeds(f.grid(), cfg);
  const double dedup = cfg.dedup_radius_for(f.grid());
  for (int round = 0; round < cfg.max_rounds; ++round) {
    std::vector<Field> deflation;
    for (const auto& cp : res.points) deflation.push_back(cp.u);
    std::vector<NewtonOutcome> outcomes(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
      outcomes[i] = newton_solve(f, seeds[i], cfg, deflation);
    });
    res.seeds_tried += static_cast<int>(seeds.size());
    ++res.rounds;
    bool added = false;
    for (const auto& o : outcomes) {
      if (o.status != NewtonStatus::converged) continue;
      added |= merge_point(f, res.points, o.u, dedup, cfg.spectral_tol, res.diagnostics);
    }
    if (!added && round > 0) break;
  }
}

void complete_symmetry(const EnergyFunctional& f, const NewtonConfig& cfg, SearchResult& res) {
  if (!f.gspec().even) return;
  const double dedup = cfg.dedup_radius_for(f.grid());
  const std::size_t n = res.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Field mirror = -res.points[i].u;
    bool present = false;
    for (const auto& cp : res.points) {
      if (f.metric().distance(cp.u, mirror) < dedup) present = true;
    }
    if (present) continue;
    const auto o = newton_solve(f, mirror, cfg);
    if (o.status == NewtonStatus::converged) {
      merge_point(f, res.points, o.u, dedup, cfg.spectral_tol, res.diagnostics);
    }
  }
}

}  // namespace

SearchResult multistart_search(const EnergyFunctional& f, const NewtonConfig& cfg) {
  cfg.validate();
  SearchResult res;
  search_rounds(f, cfg, res);
  complete_symmetry(f, cfg, res);
  if (res.points.size() == 2) {
    NewtonConfig wide = cfg;
    wide.seed_count = 2 * cfg.seed_count;
    wide.seed_modes = cfg.seed_modes + 2;
    wide.amplitude_max = 2.0 * cfg.amplitude_max;
    wide.rng_seed = cfg.rng_seed + 0x9e3779b97f4a7c15ULL;
    res.widened = true;
    search_rounds(f, wide, res);
    complete_symmetry(f, wide, res);
    if (res.points.size() == 2) {
      res.diagnostics.push_back("exactly two critical points after widened search");
    }
  }
  sort_and_number(res.points);
  for (const auto& cp : res.points) res.any_degenerate |= !cp.nondegenerate;
  return res;
}

PalaisSmaleReport palais_smale_diagnostic(const EnergyFunctional& f, const std::vector<Field>& states,
                                          const PalaisSmaleOptions& opts) {
  if (states.empty()) throw PreconditionError("Palais-Smale diagnostic needs a nonempty sequence");
  const auto& metric = f.metric();
  PalaisSmaleReport r;
  for (const auto& u : states) r.sup_norm = std::max(r.sup_norm, metric.norm(u));
  r.bounded = std::isfinite(r.sup_norm) && r.sup_norm <= opts.bound;
  r.final_residual = f.residual(states.back());
  r.residual_to_zero = r.final_residual <= opts.residual_tol;
  const std::size_t k = std::min<std::size_t>(states.size(), static_cast<std::size_t>(std::max(opts.tail, 1)));
  const std::size_t start = states.size() - k;
  for (std::size_t i = start; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      r.tail_diameter = std::max(r.tail_diameter, metric.distance(states[i], states[j]));
    }
  }
  r.cauchy_tail = r.tail_diameter < opts.cauchy_tol * std::max(1.0, r.sup_norm);
  r.passed = r.bounded && (!r.residual_to_zero || r.cauchy_tail);
  return r;
}

nlohmann::json to_json(const PalaisSmaleReport& r) {
  return {{"sup_norm", r.sup_norm},         {"bounded", r.bounded},
          {"final_residual", r.final_residual}, {"residual_to_zero", r.residual_to_zero},
          {"tail_diameter", r.tail_diameter}, {"cauchy_tail", r.cauchy_tail},
          {"passed", r.passed}};
}

nlohmann::json to_json(const CriticalPoint& cp) {
  nlohmann::json j = to_json(cp.spectral);
  j["id"] = cp.id;
  j["energy"] = cp.energy;
  j["residual"] = cp.residual;
  return j;
}

}  // namespace morselab
