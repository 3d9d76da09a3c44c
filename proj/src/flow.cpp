#include "morselab/flow.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "morselab/error.hpp"
#include "morselab/parallel.hpp"

namespace morselab {

void FlowConfig::validate() const {
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max)) {
    throw ConfigError("flow step sizes must satisfy 0 < dt_min <= dt_init <= dt_max");
  }
  if (!(dt_growth >= 1.0)) throw ConfigError("flow.dt_growth must be >= 1");
  if (!(cfl > 0.0)) throw ConfigError("flow.cfl must be positive");
  if (!(decrease_check > 0.0 && decrease_check < 1.0)) {
    throw ConfigError("flow.decrease_check must lie in (0, 1)");
  }
  if (!(limit_tol > 0.0) || !(limit_residual > 0.0)) {
    throw ConfigError("flow.limit_tol and flow.limit_residual must be positive");
  }
  if (max_steps < 1) throw ConfigError("flow.max_steps must be >= 1");
  if (!(epsilon_shoot > 0.0)) throw ConfigError("flow.epsilon_shoot must be positive");
  if (!(bisect_tol > 0.0)) throw ConfigError("flow.bisect_tol must be positive");
  if (circle_samples < 3) throw ConfigError("flow.circle_samples must be >= 3");
  if (thin < 1 || tail_keep < 1) throw ConfigError("flow.thin and flow.tail_keep must be >= 1");
}

FlowConfig flow_config_from_json(const nlohmann::json& j) {
  FlowConfig c;
  try {
    if (j.contains("metric")) {
      const auto m = j["metric"].get<std::string>();
      if (m == "stiffness") {
        c.metric = FlowMetric::stiffness;
      } else if (m == "euclidean") {
        c.metric = FlowMetric::euclidean;
      } else {
        throw ConfigError("flow.metric must be 'stiffness' or 'euclidean'");
      }
    }
    if (j.contains("scheme")) {
      const auto s = j["scheme"].get<std::string>();
      if (s == "imex") {
        c.scheme = FlowScheme::imex;
      } else if (s == "explicit") {
        c.scheme = FlowScheme::explicit_euler;
      } else {
        throw ConfigError("flow.scheme must be 'imex' or 'explicit'");
      }
    }
    c.dt_init = j.value("dt_init", c.dt_init);
    c.dt_min = j.value("dt_min", c.dt_min);
    c.dt_max = j.value("dt_max", c.dt_max);
    c.dt_growth = j.value("dt_growth", c.dt_growth);
    c.cfl = j.value("cfl", c.cfl);
    c.decrease_check = j.value("decrease_check", c.decrease_check);
    c.limit_tol = j.value("limit_tol", c.limit_tol);
    c.limit_residual = j.value("limit_residual", c.limit_residual);
    c.escape_radius = j.value("escape_radius", c.escape_radius);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.epsilon_shoot = j.value("epsilon_shoot", c.epsilon_shoot);
    c.bisect_tol = j.value("bisect_tol", c.bisect_tol);
    c.circle_samples = j.value("circle_samples", c.circle_samples);
    c.thin = j.value("thin", c.thin);
    c.tail_keep = j.value("tail_keep", c.tail_keep);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed flow config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const FlowConfig& c) {
  const char* scheme = c.scheme == FlowScheme::imex ? "imex" : "explicit";
  return {{"metric", c.metric == FlowMetric::stiffness ? "stiffness" : "euclidean"},
          {"scheme", scheme},
          {"dt_init", c.dt_init},
          {"dt_min", c.dt_min},
          {"dt_max", c.dt_max},
          {"dt_growth", c.dt_growth},
          {"cfl", c.cfl},
          {"decrease_check", c.decrease_check},
          {"limit_tol", c.limit_tol},
          {"limit_residual", c.limit_residual},
          {"escape_radius", c.escape_radius},
          {"max_steps", c.max_steps},
          {"epsilon_shoot", c.epsilon_shoot},
          {"bisect_tol", c.bisect_tol},
          {"circle_samples", c.circle_samples},
          {"thin", c.thin},
          {"tail_keep", c.tail_keep}};
}

std::string to_string(LimitKind k) {
  switch (k) {
    case LimitKind::critical_point: return "critical_point";
    case LimitKind::escaped: return "escaped";
    case LimitKind::exhausted: return "exhausted";
  }
  return "unknown";
}

nlohmann::json to_json(const LimitClass& c) {
  nlohmann::json j{{"kind", to_string(c.kind)}};
  if (c.kind == LimitKind::critical_point) j["id"] = c.id;
  return j;
}

nlohmann::json to_json(const ConnectionCount& c) {
  nlohmann::json j{{"hi_id", c.hi_id},   {"lo_id", c.lo_id},       {"raw_count", c.raw_count},
                   {"mod2", c.mod2},     {"resolved", c.resolved}};
  if (!c.diagnostic.empty()) j["diagnostic"] = c.diagnostic;
  return j;
}

double conformal_factor(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 1.0 / s;
  // Quintic smoothstep blend between 1 and 1/s; monotone since 1 - 1/s >= 0 here.
  const double t = s - 1.0;
  const double chi = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  return 1.0 - chi * (1.0 - 1.0 / s);
}

double escape_radius_for(const FlowConfig& cfg, const StiffnessMetric& metric,
                         const std::vector<CriticalPoint>& crit) {
  if (cfg.escape_radius > 0.0) return cfg.escape_radius;
  double largest = 1.0;
  for (const auto& cp : crit) largest = std::max(largest, metric.norm(cp.u));
  return 10.0 * largest;
}

LimitClass classify_limit(const StiffnessMetric& metric, const Field& state,
                          const std::vector<CriticalPoint>& crit, double limit_tol,
                          LimitKind fallback) {
  LimitClass out{fallback, -1};
  double best = std::numeric_limits<double>::infinity();
  for (const auto& cp : crit) {
    const double d = metric.distance(state, cp.u);
    if (d > limit_tol) continue;
    if (out.kind == LimitKind::critical_point) {
      throw AmbiguityError("critical points " + std::to_string(out.id) + " and " +
                           std::to_string(cp.id) + " both lie within limit_tol of the state");
    }
    out = {LimitKind::critical_point, cp.id};
    best = d;
  }
  (void)best;
  return out;
}

LimitClass classify_limit(const StiffnessMetric& metric, const Trajectory& traj,
                          const std::vector<CriticalPoint>& crit, double limit_tol) {
  if (traj.states.empty()) throw PreconditionError("trajectory has no states");
  const LimitKind fallback =
      traj.limit.kind == LimitKind::escaped ? LimitKind::escaped : LimitKind::exhausted;
  return classify_limit(metric, traj.states.back(), crit, limit_tol, fallback);
}

namespace {

class Stepper {
 public:
  Stepper(const EnergyFunctional& f, const FlowConfig& cfg)
      : f_(f), cfg_(cfg), vol_(f.grid().cell_volume()) {
    // |u^T K u| <= max|G''| u^T M_avg u, and M_avg <= vol I row by row. Against
    // the stiffness metric we also divide by the lowest Dirichlet eigenvalue.
    if (cfg.metric == FlowMetric::stiffness) {
      double lambda1 = 0.0;
      for (int a = 0; a < f.grid().dim(); ++a) {
        const double L = f.grid().extent(a);
        lambda1 += std::numbers::pi * std::numbers::pi / (L * L);
      }
      scale_ = 1.0 / lambda1;
    }
  }

  // Continuous in u, so the imex flow map is continuous in its initial data.
  double imex_dt(const Field& u) const {
    double peak = 0.0;
    for (double a : cell_averages(f_.grid(), u)) peak = std::max(peak, std::abs(f_.gspec().g2(a)));
    const double rho = peak * scale_;
    return rho > 0.0 ? std::min(cfg_.dt_max, cfg_.cfl / rho) : cfg_.dt_max;
  }

  // Returns false if the step could not be formed (factorization failure).
  bool propose(const Field& u, const Field& g, double dt, Field& delta) {
    const bool stiff = cfg_.metric == FlowMetric::stiffness;
    Field d = stiff ? Field(-f_.metric().solve(g)) : Field(-g / vol_);
    const double speed = std::sqrt(std::max(0.0, -g.dot(d)));
    const double h = dt * conformal_factor(speed);
    if (cfg_.scheme == FlowScheme::explicit_euler) {
      delta = h * d;
      return true;
    }
    SparseMatrix sys = f_.gram(u).matrix * h;
    if (stiff) {
      sys += f_.metric().matrix();
    } else {
      SparseMatrix id(sys.rows(), sys.cols());
      id.setIdentity();
      sys += vol_ * id;
    }
    llt_.compute(sys);
    if (llt_.info() != Eigen::Success) return false;
    delta = -h * llt_.solve(g);
    return delta.allFinite();
  }

 private:
  const EnergyFunctional& f_;
  const FlowConfig& cfg_;
  double vol_;
  double scale_ = 1.0;
  Eigen::SimplicialLLT<SparseMatrix> llt_;
};

// One accepted step of the descent; false on step size underflow.
bool descent_step(const EnergyFunctional& f, Stepper& stepper, const FlowConfig& cfg, Field& u,
                  Field& g, double& energy, double& dt, long& rejected) {
  if (cfg.scheme == FlowScheme::imex) dt = stepper.imex_dt(u);
  Field delta;
  while (dt >= cfg.dt_min) {
    if (stepper.propose(u, g, dt, delta)) {
      Field trial = u + delta;
      Field g_trial;
      const double e_trial = f.energy_and_gradient(trial, g_trial);
      const double predicted = g.dot(delta);
      if (std::isfinite(e_trial) && e_trial < energy &&
          e_trial <= energy + cfg.decrease_check * predicted) {
        u = std::move(trial);
        g = std::move(g_trial);
        energy = e_trial;
        dt = std::min(dt * cfg.dt_growth, cfg.dt_max);
        return true;
      }
    }
    ++rejected;
    dt *= 0.5;
  }
  return false;
}

// Proximity test used while integrating: only points strictly below the
// current energy can be limits of a strictly decreasing flow.
int nearby_limit(const StiffnessMetric& metric, const Field& u, double energy, double residual,
                 const std::vector<CriticalPoint>& crit, const FlowConfig& cfg) {
  if (residual > cfg.limit_residual) return -1;
  int hit = -1;
  for (const auto& cp : crit) {
    // ties happen once the state is within rounding of the point
    if (cp.energy > energy) continue;
    if (metric.distance(u, cp.u) > cfg.limit_tol) continue;
    if (hit >= 0) {
      throw AmbiguityError("critical points " + std::to_string(hit) + " and " +
                           std::to_string(cp.id) + " both lie within limit_tol of the state");
    }
    hit = cp.id;
  }
  return hit;
}

}  // namespace

Trajectory integrate_descent(const EnergyFunctional& f, const Field& u0, const FlowConfig& cfg,
                             const std::vector<CriticalPoint>& crit) {
  cfg.validate();
  f.grid().check_field(u0);
  const auto& metric = f.metric();
  // Energy decreases, so the start bounds the trajectory as well as the critical set does.
  const double escape = cfg.escape_radius > 0.0
                            ? cfg.escape_radius
                            : std::max(escape_radius_for(cfg, metric, crit), 10.0 * metric.norm(u0));

  Trajectory traj;
  Stepper stepper(f, cfg);
  std::deque<std::tuple<long, Field, double, double>> tail;

  Field u = u0;
  Field g;
  double energy = f.energy_and_gradient(u, g);
  double residual = metric.dual_norm(g);
  double dt = cfg.dt_init;
  long step = 0;

  auto record = [&](bool force) {
    if (force || step % cfg.thin == 0) {
      traj.states.push_back(u);
      traj.steps.push_back(step);
      traj.energies.push_back(energy);
      traj.residuals.push_back(residual);
    }
    tail.emplace_back(step, u, energy, residual);
    if (static_cast<int>(tail.size()) > cfg.tail_keep) tail.pop_front();
  };
  record(true);

  while (true) {
    const int hit = nearby_limit(metric, u, energy, residual, crit, cfg);
    if (hit >= 0) {
      traj.limit = {LimitKind::critical_point, hit};
      break;
    }
    if (metric.norm(u) > escape) {
      traj.limit = {LimitKind::escaped, -1};
      traj.diagnostic = "left the escape ball";
      break;
    }
    if (step >= cfg.max_steps) {
      traj.limit = {LimitKind::exhausted, -1};
      traj.diagnostic = "max_steps reached";
      break;
    }

    if (!descent_step(f, stepper, cfg, u, g, energy, dt, traj.rejected_steps)) {
      traj.limit = {LimitKind::exhausted, -1};
      traj.diagnostic = "step size underflow without energy decrease";
      break;
    }
    residual = metric.dual_norm(g);
    ++step;
    record(false);
  }

  // The last few states are kept at full resolution: drop thinned samples
  // from that window and append the tail.
  const long first_tail = std::get<0>(tail.front());
  while (traj.steps.size() > 1 && traj.steps.back() >= first_tail) {
    traj.states.pop_back();
    traj.steps.pop_back();
    traj.energies.pop_back();
    traj.residuals.pop_back();
  }
  for (auto& [s, state, e, r] : tail) {
    if (!traj.steps.empty() && s <= traj.steps.back()) continue;
    traj.states.push_back(std::move(state));
    traj.steps.push_back(s);
    traj.energies.push_back(e);
    traj.residuals.push_back(r);
  }
  traj.total_steps = step;
  return traj;
}

namespace {

void require_nondegenerate(const CriticalPoint& cp) {
  if (!cp.nondegenerate) {
    throw DegenerateError("critical point " + std::to_string(cp.id) + " is degenerate");
  }
}

Field unstable_direction(const CriticalPoint& cp, double angle) {
  const auto& v = cp.spectral.eigenvectors;
  return std::cos(angle) * v.col(0) + std::sin(angle) * v.col(1);
}

}  // namespace

std::vector<Trajectory> shoot_unstable(const EnergyFunctional& f, const CriticalPoint& cp,
                                       const FlowConfig& cfg, const std::vector<CriticalPoint>& crit) {
  cfg.validate();
  require_nondegenerate(cp);
  const int index = cp.index();
  if (index < 1) throw PreconditionError("shoot_unstable needs index >= 1");

  std::vector<Field> starts;
  if (index == 1) {
    const Field e = cp.spectral.eigenvectors.col(0);
    starts.push_back(cp.u + cfg.epsilon_shoot * e);
    starts.push_back(cp.u - cfg.epsilon_shoot * e);
  } else if (index == 2) {
    for (int k = 0; k < cfg.circle_samples; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / cfg.circle_samples;
      starts.push_back(cp.u + cfg.epsilon_shoot * unstable_direction(cp, angle));
    }
  } else {
    std::mt19937_64 rng(static_cast<std::uint64_t>(cp.id) * 7919u + 17u);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::MatrixXd neg = cp.spectral.eigenvectors.leftCols(index);
    for (int k = 0; k < cfg.circle_samples; ++k) {
      Eigen::VectorXd c(index);
      for (int i = 0; i < index; ++i) c[i] = normal(rng);
      starts.push_back(cp.u + cfg.epsilon_shoot * (neg * (c / c.norm())));
    }
  }

  std::vector<Trajectory> out(starts.size());
  parallel_for(starts.size(),
               [&](std::size_t i) { out[i] = integrate_descent(f, starts[i], cfg, crit); });
  return out;
}

namespace {

const CriticalPoint* find_point(const std::vector<CriticalPoint>& crit, int id) {
  for (const auto& cp : crit) {
    if (cp.id == id) return &cp;
  }
  return nullptr;
}

struct Boundary {
  int saddle = -1;  ///< -1 when unresolved
  std::string diagnostic;
};

class CircleCounter {
 public:
  CircleCounter(const EnergyFunctional& f, const CriticalPoint& hi, const FlowConfig& cfg,
                const std::vector<CriticalPoint>& crit)
      : f_(f), hi_(hi), cfg_(cfg), crit_(crit) {}

  Field start(double angle) const {
    return hi_.u + cfg_.epsilon_shoot * unstable_direction(hi_, angle);
  }

  LimitClass label(double angle) {
    ++flows_;
    return integrate_descent(f_, start(angle), cfg_, crit_).limit;
  }

  // Separation at which tracked states are bisected again.
  double tracking_separation() const {
    return 1e-4 * std::max(1.0, f_.metric().norm(hi_.u));
  }

  bool is_target(const LimitClass& c) const {
    if (c.kind != LimitKind::critical_point) return false;
    const auto* cp = find_point(crit_, c.id);
    return cp != nullptr && cp->index() == hi_.index() - 1;
  }

  // Refines the arc (a, b) whose end labels differ until a flow line stops at
  // a saddle of index(hi) - 1. The arc is bisected in angle only while it is
  // wide; the boundary is then tracked on states (see track).
  void refine(double a, LimitClass la, double b, LimitClass lb, std::vector<Boundary>& out,
              int depth = 0) {
    if (depth > 8) {
      out.push_back({-1, "too many nested boundaries"});
      return;
    }
    const double wide = tracking_separation();
    while ((b - a) * cfg_.epsilon_shoot > wide) {
      const double m = 0.5 * (a + b);
      const LimitClass lm = label(m);
      if (is_target(lm)) {
        out.push_back({lm.id, {}});
        return;
      }
      if (lm.kind != LimitKind::critical_point) {
        out.push_back({-1, "bisection flow " + to_string(lm.kind)});
        return;
      }
      if (lm.id == la.id) {
        a = m;
      } else if (lm.id == lb.id) {
        b = m;
      } else {
        refine(a, la, m, lm, out, depth + 1);
        refine(m, lm, b, lb, out, depth + 1);
        return;
      }
    }
    track(start(a), la, start(b), lb, out, depth);
  }

  // Edge tracking. Near hi the basin boundary lies exponentially close to the
  // weak unstable direction, far below double precision in angle. So: bisect
  // the segment between two states with different labels until they are
  // bisect_tol apart, flow both forward until they separate again, and repeat
  // until a state passes a target saddle.
  void track(Field xa, LimitClass la, Field xb, LimitClass lb, std::vector<Boundary>& out,
             int depth) {
    const auto& metric = f_.metric();
    const double scale = std::max(1.0, metric.norm(hi_.u));
    const double narrow = cfg_.bisect_tol * scale;
    const double wide = tracking_separation();
    Stepper stepper(f_, cfg_);
    long advanced = 0;
    while (true) {
      while (metric.distance(xa, xb) > narrow) {
        const Field xm = 0.5 * (xa + xb);
        ++flows_;
        const LimitClass lm = integrate_descent(f_, xm, cfg_, crit_).limit;
        if (is_target(lm)) {
          out.push_back({lm.id, {}});
          return;
        }
        if (lm.kind != LimitKind::critical_point) {
          out.push_back({-1, "tracking flow " + to_string(lm.kind)});
          return;
        }
        if (lm.id == la.id) {
          xa = xm;
        } else if (lm.id == lb.id) {
          xb = xm;
        } else {
          if (depth >= 8) {
            out.push_back({-1, "too many nested boundaries"});
            return;
          }
          track(xa, la, xm, lm, out, depth + 1);
          track(xm, lm, xb, lb, out, depth + 1);
          return;
        }
      }
      Field ga, gb;
      double ea = f_.energy_and_gradient(xa, ga);
      double eb = f_.energy_and_gradient(xb, gb);
      double dta = cfg_.dt_init, dtb = cfg_.dt_init;
      long rejected = 0;
      while (metric.distance(xa, xb) <= wide) {
        for (const auto* x : {&xa, &xb}) {
          Field g;
          const double e = f_.energy_and_gradient(*x, g);
          const int hit = nearby_limit(metric, *x, e, metric.dual_norm(g), crit_, cfg_);
          if (hit >= 0 && is_target({LimitKind::critical_point, hit})) {
            out.push_back({hit, {}});
            return;
          }
        }
        if (++advanced > cfg_.max_steps ||
            !descent_step(f_, stepper, cfg_, xa, ga, ea, dta, rejected) ||
            !descent_step(f_, stepper, cfg_, xb, gb, eb, dtb, rejected)) {
          out.push_back({-1, "edge tracking stalled before reaching a saddle"});
          return;
        }
      }
    }
  }

  int flows() const { return flows_; }

 private:
  const EnergyFunctional& f_;
  const CriticalPoint& hi_;
  const FlowConfig& cfg_;
  const std::vector<CriticalPoint>& crit_;
  int flows_ = 0;
};

}  // namespace

ConnectionTable connection_table(const EnergyFunctional& f, const CriticalPoint& hi,
                                 const FlowConfig& cfg, const std::vector<CriticalPoint>& crit) {
  cfg.validate();
  require_nondegenerate(hi);
  const int index = hi.index();
  if (index < 1) throw PreconditionError("connection counting needs index(hi) >= 1");
  if (index > 2) {
    throw PreconditionError("unstable manifolds of index >= 3 are not flowed");
  }

  ConnectionTable table;
  std::map<int, int> raw;
  for (const auto& cp : crit) {
    if (cp.index() == index - 1) {
      require_nondegenerate(cp);
      raw[cp.id] = 0;
    }
  }

  table.shots = shoot_unstable(f, hi, cfg, crit);
  std::vector<LimitClass> labels;
  for (const auto& t : table.shots) labels.push_back(t.limit);

  auto mark_unresolved = [&](const std::string& why) {
    table.resolved = false;
    if (!table.diagnostic.empty()) table.diagnostic += "; ";
    table.diagnostic += why;
  };

  if (index == 1) {
    for (const auto& l : labels) {
      if (l.kind != LimitKind::critical_point) {
        mark_unresolved("shot ended " + to_string(l.kind));
      } else if (raw.count(l.id)) {
        ++raw[l.id];
      } else {
        mark_unresolved("shot ended at point " + std::to_string(l.id) + " of wrong index");
      }
    }
  } else {
    CircleCounter counter(f, hi, cfg, crit);
    const int n = static_cast<int>(labels.size());
    auto angle_of = [&](int k) { return 2.0 * std::numbers::pi * k / n; };
    for (const auto& l : labels) {
      if (l.kind != LimitKind::critical_point) mark_unresolved("circle sample ended " + to_string(l.kind));
    }
    if (table.resolved) {
      // Walk the circle; saddle-labelled samples resolve their boundary directly.
      int start = 0;
      while (start < n && counter.is_target(labels[start])) ++start;
      if (start == n) mark_unresolved("every circle sample stopped at a saddle");
      std::vector<Boundary> boundaries;
      for (int step = 0; step < n && table.resolved; ++step) {
        const int k = (start + step) % n;
        if (counter.is_target(labels[k])) continue;
        // Next sample that is not a saddle.
        int j = (k + 1) % n;
        std::vector<int> saddles;
        while (counter.is_target(labels[j])) {
          saddles.push_back(labels[j].id);
          j = (j + 1) % n;
        }
        const bool differ = labels[j].id != labels[k].id;
        if (!saddles.empty()) {
          if (saddles.size() > 1 || !differ) {
            mark_unresolved("saddle-labelled samples between minima do not isolate one boundary");
          } else {
            boundaries.push_back({saddles.front(), {}});
          }
        } else if (differ) {
          double a = angle_of(k);
          double b = angle_of(k + 1);
          counter.refine(a, labels[k], b, labels[j], boundaries);
        }
        step += static_cast<int>(saddles.size());
      }
      for (const auto& bd : boundaries) {
        if (bd.saddle < 0) {
          mark_unresolved(bd.diagnostic);
        } else if (raw.count(bd.saddle)) {
          ++raw[bd.saddle];
        }
      }
    }
    table.bisection_flows = counter.flows();
  }

  for (const auto& [lo, count] : raw) {
    ConnectionCount c;
    c.hi_id = hi.id;
    c.lo_id = lo;
    c.raw_count = count;
    c.mod2 = count % 2;
    c.resolved = table.resolved;
    c.diagnostic = table.diagnostic;
    table.counts.push_back(c);
  }
  return table;
}

ConnectionCount count_connections(const EnergyFunctional& f, const CriticalPoint& hi,
                                  const CriticalPoint& lo, const FlowConfig& cfg,
                                  const std::vector<CriticalPoint>& crit) {
  if (hi.index() - lo.index() != 1) {
    throw PreconditionError("count_connections needs index(hi) - index(lo) == 1, got " +
                            std::to_string(hi.index()) + " and " + std::to_string(lo.index()));
  }
  require_nondegenerate(hi);
  require_nondegenerate(lo);
  const auto table = connection_table(f, hi, cfg, crit);
  for (const auto& c : table.counts) {
    if (c.lo_id == lo.id) return c;
  }
  throw PreconditionError("point " + std::to_string(lo.id) + " is not in the critical set");
}

}  // namespace morselab
