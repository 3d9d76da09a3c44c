// Acceptance suite: eight criteria, one PASS/FAIL line each on stdout.
// Progress and failure details go to stderr. Exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "morselab/error.hpp"
#include "morselab/experiment.hpp"
#include "morselab/spectral.hpp"

using namespace morselab;

namespace {

struct Case {
  std::string label;
  ExperimentConfig cfg;
};

ExperimentConfig make_config(const std::string& name, int dim, int n, double p, nlohmann::json g) {
  ExperimentConfig c;
  c.name = name;
  c.grid.dim = dim;
  c.grid.extents = {1.0, 1.0};
  c.grid.interior = {n, dim == 2 ? n : 1};
  c.p = p;
  c.g = std::move(g);
  c.growth_t_min = -20.0;
  c.growth_t_max = 20.0;
  c.growth_samples = 4001;
  c.rng_seed = 7;
  return c;
}

nlohmann::json doublewell(double lambda) {
  return {{"name", "doublewell"}, {"lambda", lambda}, {"kappa", 1.0}};
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string betti_string(const std::vector<int>& b) {
  std::string s = "(";
  for (std::size_t k = 0; k < b.size(); ++k) s += (k ? "," : "") + std::to_string(b[k]);
  return s + ")";
}

// Verdict collector for one criterion.
struct Verdict {
  bool ok = true;
  std::vector<std::string> failures;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }
};

int g_failed = 0;

void report(int number, const std::string& title, const Verdict& v, const std::string& summary) {
  std::printf("criterion %d %s %s: %s\n", number, v.ok ? "PASS" : "FAIL", title.c_str(),
              summary.c_str());
  std::fflush(stdout);
  for (const auto& f : v.failures) std::fprintf(stderr, "  criterion %d: %s\n", number, f.c_str());
  if (!v.ok) ++g_failed;
}

void progress(const std::string& msg) { std::fprintf(stderr, "[acceptance] %s\n", msg.c_str()); }

ExperimentReport run_case(const Case& c) {
  const auto t0 = std::chrono::steady_clock::now();
  auto r = run(c.cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  progress(c.label + ": " + std::to_string(r.search ? r.search->points.size() : 0) + " points, " +
           (r.homology ? "betti " + betti_string(r.homology->betti) : "no homology") +
           (r.failed_stage.empty() ? "" : ", failed at " + r.failed_stage + ": " + r.failure_reason) +
           fmt(", %.1fs", secs));
  return r;
}

std::size_t point_count(const ExperimentReport& r) { return r.search ? r.search->points.size() : 0; }

// (hi, lo) -> mod 2 count
std::map<std::pair<int, int>, int> count_map(const ExperimentReport& r) {
  std::map<std::pair<int, int>, int> m;
  for (const auto& c : r.counts) m[{c.hi_id, c.lo_id}] = c.mod2;
  return m;
}

bool contractible_betti(const ExperimentReport& r) {
  if (!r.homology || r.homology->betti.empty() || r.homology->betti[0] != 1) return false;
  for (std::size_t k = 1; k < r.homology->betti.size(); ++k) {
    if (r.homology->betti[k] != 0) return false;
  }
  return true;
}

Field smooth_random(const Grid& g, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  const double a1 = n(rng), a2 = n(rng), a3 = n(rng), a4 = n(rng);
  const double noise = 0.01 * scale;
  Field u = g.interpolate([&](double x, double y) {
    const double sy = g.dim() == 2 ? std::sin(M_PI * y) : 1.0;
    const double sy2 = g.dim() == 2 ? std::sin(2 * M_PI * y) : 1.0;
    return (a1 * std::sin(M_PI * x) + a2 * std::sin(2 * M_PI * x) * sy2 +
            a3 * std::sin(3 * M_PI * x) + a4 * std::sin(5 * M_PI * x)) * sy;
  });
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] += noise * n(rng);
  return u;
}

// ---------------------------------------------------------------------------
// Criterion 1: observed order of central differences for df and d2f.

void criterion_1(const std::vector<Case>& cases) {
  Verdict v;
  double lo = 1e9, hi = -1e9;
  int quadratic_cases = 0;
  for (const auto& c : cases) {
    const Grid grid = build_grid(c.cfg.grid);
    const EnergyFunctional f(grid, c.cfg.p, gspec_from_json(c.cfg.g));
    // p = 1 with G = 0 is a quadratic energy: central differences are exact,
    // so there is no truncation error whose order could be measured.
    const bool quadratic = c.cfg.p == 1.0 && c.cfg.g.at("name") == "zero";
    if (quadratic) ++quadratic_cases;
    std::mt19937_64 rng(derive_seed(c.cfg.rng_seed, 1));
    for (int pair = 0; pair < 20; ++pair) {
      const Field u = smooth_random(grid, rng, 0.8);
      const Field w = smooth_random(grid, rng, 1.0);
      const double exact = f.gradient(u).dot(w);
      auto fd = [&](double h) { return (f.energy(u + h * w) - f.energy(u - h * w)) / (2 * h); };
      const double e3 = std::abs(fd(1e-3) - exact), e4 = std::abs(fd(1e-4) - exact);
      const Field aw = f.hessian(u) * w;
      auto fdg = [&](double h) {
        return Field((f.gradient(u + h * w) - f.gradient(u - h * w)) / (2 * h));
      };
      const double h3 = (fdg(1e-3) - aw).norm(), h4 = (fdg(1e-4) - aw).norm();
      if (quadratic) {
        // exact up to rounding: compare against the size of the quantities
        v.require(e3 <= 1e-8 * (1.0 + std::abs(exact)) && h3 <= 1e-8 * (1.0 + aw.norm()),
                  c.label + ": quadratic energy but central differences are not exact");
        continue;
      }
      const double od = std::log10(e3 / e4), oh = std::log10(h3 / h4);
      lo = std::min({lo, od, oh});
      hi = std::max({hi, od, oh});
      v.require(std::abs(od - 2.0) <= 0.2,
                c.label + fmt(": df order %.3f", od) + " on pair " + std::to_string(pair));
      v.require(std::abs(oh - 2.0) <= 0.2,
                c.label + fmt(": d2f order %.3f", oh) + " on pair " + std::to_string(pair));
    }
  }
  report(1, "calculus consistency", v,
         std::to_string(cases.size()) + " configurations x 20 pairs, orders in [" +
             fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]" +
             (quadratic_cases ? ", " + std::to_string(quadratic_cases) +
                                    " quadratic configurations exact to rounding"
                              : ""));
}

// ---------------------------------------------------------------------------

void criterion_2(const std::vector<Case>& cases, const std::vector<ExperimentReport>& runs) {
  Verdict v;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& r = runs[i];
    const auto& label = cases[i].label;
    v.require(r.failed_stage.empty(), label + ": failed at " + r.failed_stage + ": " + r.failure_reason);
    v.require(point_count(r) == 1, label + ": " + std::to_string(point_count(r)) + " points");
    if (point_count(r) == 1) {
      const auto& cp = r.search->points[0];
      v.require(cp.u.cwiseAbs().maxCoeff() <= 1e-9, label + ": the point is not u = 0");
      v.require(cp.index() == 0, label + ": index " + std::to_string(cp.index()));
    }
    v.require(r.homology && r.homology->betti == std::vector<int>{1}, label + ": betti not (1)");
  }
  // p = 1 is below the admissible range p > dim/2 on the square and must be refused.
  auto bad = make_config("convex_2d_p1", 2, 17, 1.0, {{"name", "zero"}});
  bool refused = false;
  try {
    bad.validate();
  } catch (const ConfigError&) {
    refused = true;
  }
  v.require(refused, "2D p = 1 was not refused");
  report(2, "convex baseline", v,
         std::to_string(cases.size()) + " runs, one minimum at 0, betti (1); 2D p = 1 refused (needs p > 1)");
}

// ---------------------------------------------------------------------------

void criterion_3(const std::vector<Case>& cases, const std::vector<ExperimentReport>& runs) {
  Verdict v;
  std::map<int, std::vector<int>> betti_by_n;  // betti must agree across p at each N
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& r = runs[i];
    const auto& c = cases[i];
    const std::string& label = c.label;
    v.require(r.failed_stage.empty(), label + ": failed at " + r.failed_stage + ": " + r.failure_reason);
    if (point_count(r) != 3) {
      v.require(false, label + ": " + std::to_string(point_count(r)) + " points");
      continue;
    }
    std::vector<int> minima;
    int saddle = -1;
    for (const auto& cp : r.search->points) {
      if (cp.index() == 0) minima.push_back(cp.id);
      if (cp.index() == 1) saddle = cp.id;
    }
    v.require(minima.size() == 2 && saddle >= 0, label + ": indices are not (0,0,1)");
    if (saddle < 0) continue;
    const auto& s = r.search->points[static_cast<std::size_t>(saddle)];
    v.require(s.u.cwiseAbs().maxCoeff() <= 1e-9, label + ": the saddle is not at 0");

    // Dirichlet eigenvalue oracle: pi^2 < 15 < 4 pi^2 in the continuum; the
    // discrete eigenvalues 4 tan^2(k pi h / 2) / h^2 differ by O(h^2).
    const int n = c.cfg.grid.interior[0];
    const double h = 1.0 / (n + 1);
    int continuum = 0, discrete = 0;
    for (int k = 1; k <= n; ++k) {
      const double t = std::tan(k * M_PI * h / 2.0);
      const double kappa = 4.0 * t * t / (h * h);
      if (k * k * M_PI * M_PI < 15.0) ++continuum;
      if (kappa < 15.0) ++discrete;
      if (k <= 2) {
        v.require(std::abs(kappa - k * k * M_PI * M_PI) <= std::pow(k * M_PI, 4) * h * h,
                  label + ": discrete eigenvalue " + std::to_string(k) + " outside O(h^2)");
      }
    }
    v.require(continuum == 1 && discrete == 1 && s.index() == 1,
              label + ": saddle index " + std::to_string(s.index()) + " vs oracle " +
                  std::to_string(continuum) + "/" + std::to_string(discrete));
    const double t1 = std::tan(M_PI * h / 2.0);
    const double lowest = 1.0 - 15.0 / (4.0 * t1 * t1 / (h * h));
    v.require(std::abs(s.spectral.eigenvalues[0] - lowest) <= 1e-9,
              label + fmt(": lowest pencil eigenvalue off the oracle by %.2e",
                          std::abs(s.spectral.eigenvalues[0] - lowest)));

    // boundary of the saddle = m+ + m-
    const auto counts = count_map(r);
    for (int m : minima) {
      const auto it = counts.find({saddle, m});
      v.require(it != counts.end() && it->second == 1,
                label + ": saddle to minimum " + std::to_string(m) + " count is not 1");
    }
    v.require(r.complex && check_boundary_square(*r.complex), label + ": boundary does not square to 0");
    v.require(r.homology && r.homology->betti == std::vector<int>{1, 0}, label + ": betti not (1,0)");
    if (r.homology) {
      auto [it, inserted] = betti_by_n.emplace(n, r.homology->betti);
      v.require(inserted || it->second == r.homology->betti, label + ": betti depends on p");
    }
  }
  report(3, "double well lambda = 15", v,
         std::to_string(cases.size()) + " runs (N 64/128, p 2/3): 3 points, saddle index 1 = oracle, "
         "boundary m+ + m-, betti (1,0) independent of p");
}

// ---------------------------------------------------------------------------

void criterion_4(const std::vector<Case>& sweep, const std::vector<ExperimentReport>& sweep_runs,
                 const std::vector<ExperimentReport>& all_runs) {
  Verdict v;
  std::string counts;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const std::size_t n = point_count(sweep_runs[i]);
    counts += (i ? "," : "") + std::to_string(n);
    v.require(contractible_betti(sweep_runs[i]), sweep[i].label + ": betti not (1,0,...)");
  }
  v.require(point_count(sweep_runs[0]) == 1, "lambda = 5 does not give 1 point");
  v.require(point_count(sweep_runs[1]) == 3, "lambda = 15 does not give 3 points");
  v.require(point_count(sweep_runs[2]) >= 3, "lambda = 50 gives fewer than 3 points");
  int twos = 0;
  for (const auto& r : all_runs) {
    if (point_count(r) == 2) ++twos;
  }
  v.require(twos == 0, std::to_string(twos) + " runs returned exactly two critical points");
  report(4, "one or at least three", v,
         "lambda 5/15/50 -> counts " + counts + "; no count of 2 in " + std::to_string(all_runs.size()) +
             " runs");
}

// ---------------------------------------------------------------------------

void criterion_5(const std::vector<Case>& cases, const std::vector<ExperimentReport>& runs) {
  Verdict v;
  int trajectories = 0, points = 0;
  double worst_ratio = -1e300;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& r = runs[i];
    const auto& label = cases[i].label;
    for (const auto& st : r.trajectories) {
      ++trajectories;
      const auto& e = st.trajectory.energies;
      bool decreasing = true;
      for (std::size_t k = 1; k < e.size(); ++k) decreasing = decreasing && e[k] < e[k - 1];
      v.require(decreasing, label + ": a " + st.source + " trajectory does not strictly decrease");
    }
    if (!r.search) continue;
    for (const auto& cp : r.search->points) {
      if (!cp.nondegenerate) continue;
      ++points;
      // Recompute the spectral data rather than trusting the stored copy.
      const auto sd = analyze(*r.functional, cp.u, cases[i].cfg.newton.spectral_tol);
      const auto L = build_hyperbolic(sd);
      const auto lyap = verify_linear_lyapunov(*r.functional, cp.u, sd, L, 1e-2, 50,
                                               derive_seed(cases[i].cfg.rng_seed, 5000 + cp.id));
      worst_ratio = std::max(worst_ratio, lyap.max_ratio);
      v.require(lyap.passed, label + ": Lyapunov check fails at point " + std::to_string(cp.id) +
                                 fmt(" (max ratio %.3e)", lyap.max_ratio));
      // L = (id, -id) on H^- (+) W: +1 with multiplicity index, -1 on the rest.
      const int dim = sd.dimension();
      const double expect = 2.0 * sd.index - dim;
      const double tr = L.matrix().trace();
      v.require(std::abs(tr - expect) <= 1e-10,
                label + fmt(": trace(L) = %.12f", tr) + " at point " + std::to_string(cp.id));
    }
  }
  report(5, "Lyapunov and hyperbolicity", v,
         std::to_string(trajectories) + " trajectories strictly decreasing; " + std::to_string(points) +
             " points: Lyapunov at radius 1e-2 x 50" + fmt(" (max ratio %.3e)", worst_ratio) +
             ", trace(L) = 2 index - dim");
}

// ---------------------------------------------------------------------------

void criterion_6(const std::vector<Case>& cases, const std::vector<ExperimentReport>& runs) {
  Verdict v;
  int variants = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& base = runs[i];
    std::vector<std::pair<std::string, ExperimentConfig>> alt;
    auto half_dt = cases[i].cfg;
    half_dt.flow.dt_init /= 2.0;
    half_dt.flow.dt_max /= 2.0;
    half_dt.flow.cfl /= 2.0;
    alt.emplace_back("dt/2", half_dt);
    auto half_eps = cases[i].cfg;
    half_eps.flow.epsilon_shoot /= 2.0;
    alt.emplace_back("epsilon_shoot/2", half_eps);
    auto other = cases[i].cfg;
    other.flow.metric =
        other.flow.metric == FlowMetric::stiffness ? FlowMetric::euclidean : FlowMetric::stiffness;
    alt.emplace_back("other metric", other);
    for (const auto& [what, cfg] : alt) {
      ++variants;
      const auto r = run_case({cases[i].label + " " + what, cfg});
      const std::string label = cases[i].label + " with " + what;
      v.require(r.failed_stage.empty(), label + ": failed at " + r.failed_stage + ": " + r.failure_reason);
      v.require(point_count(r) == point_count(base), label + ": point count changed");
      v.require(count_map(r) == count_map(base), label + ": mod-2 counts changed");
      v.require(r.homology && base.homology && r.homology->betti == base.homology->betti,
                label + ": betti changed");
    }
  }
  report(6, "robustness of counts", v,
         std::to_string(variants) + " variant runs (dt/2, epsilon_shoot/2, metric swap) match their base");
}

// ---------------------------------------------------------------------------

void criterion_7(const std::vector<Case>& cases, const std::vector<ExperimentReport>& runs) {
  Verdict v;
  int checked = 0, escaped = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& r = runs[i];
    for (const auto& st : r.trajectories) {
      if (st.trajectory.limit.kind == LimitKind::escaped) {
        ++escaped;
        continue;
      }
      ++checked;
      const auto ps = palais_smale_diagnostic(*r.functional, st.trajectory.states,
                                              cases[i].cfg.palais_smale);
      v.require(ps.passed, cases[i].label + ": " + st.source + " trajectory fails" +
                               fmt(" (sup %.3e", ps.sup_norm) + fmt(", residual %.3e", ps.final_residual) +
                               fmt(", tail %.3e)", ps.tail_diameter));
    }
  }
  report(7, "Palais-Smale diagnostics", v,
         std::to_string(checked) + " non-escaped trajectories pass (" + std::to_string(escaped) +
             " escaped)");
}

// ---------------------------------------------------------------------------

void criterion_8(const std::vector<Case>& cases, const std::vector<ExperimentReport>& runs) {
  Verdict v;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto again = run_case({cases[i].label + " rerun", cases[i].cfg});
    v.require(again.to_json(false).dump() == runs[i].to_json(false).dump(),
              cases[i].label + ": report differs on rerun");
  }
  report(8, "determinism", v,
         std::to_string(cases.size()) + " criterion-3 reports reproduced bitwise (timings excluded)");
}

}  // namespace

int main() {
  const nlohmann::json zero = {{"name", "zero"}};
  const std::vector<Case> convex = {
      {"convex 1D N=64 p=1", make_config("convex_1d_p1", 1, 64, 1.0, zero)},
      {"convex 1D N=64 p=2", make_config("convex_1d_p2", 1, 64, 2.0, zero)},
      {"convex 2D 17x17 p=1.5", make_config("convex_2d_p15", 2, 17, 1.5, zero)},
      {"convex 2D 17x17 p=2", make_config("convex_2d_p2", 2, 17, 2.0, zero)},
  };
  std::vector<Case> dw15;  // N 64 and 128, p 2 and 3
  for (int n : {64, 128}) {
    for (double p : {2.0, 3.0}) {
      const std::string tag = "N=" + std::to_string(n) + " p=" + std::to_string(static_cast<int>(p));
      dw15.push_back({"double well 15 " + tag,
                      make_config("doublewell15_" + std::to_string(n) + "_" + std::to_string(static_cast<int>(p)),
                                  1, n, p, doublewell(15))});
    }
  }
  const std::vector<Case> sweep = {
      {"lambda 5", make_config("lambda5", 1, 64, 2.0, doublewell(5))},
      {"lambda 15", make_config("lambda15", 1, 64, 2.0, doublewell(15))},
      {"lambda 50", make_config("lambda50", 1, 64, 2.0, doublewell(50))},
  };

  std::vector<Case> all;
  for (const std::vector<Case>* group : {&convex, &std::as_const(dw15), &sweep}) all.insert(all.end(), group->begin(), group->end());

  criterion_1(all);

  std::vector<ExperimentReport> runs;
  for (const auto& c : all) runs.push_back(run_case(c));
  auto slice = [&](std::size_t from, std::size_t count) {
    return std::vector<ExperimentReport>(runs.begin() + static_cast<long>(from),
                                         runs.begin() + static_cast<long>(from + count));
  };
  const auto convex_runs = slice(0, convex.size());
  const auto dw15_runs = slice(convex.size(), dw15.size());
  const auto sweep_runs = slice(convex.size() + dw15.size(), sweep.size());

  criterion_2(convex, convex_runs);
  criterion_3(dw15, dw15_runs);
  criterion_4(sweep, sweep_runs, runs);
  criterion_5(all, runs);
  criterion_6(all, runs);
  criterion_7(all, runs);
  criterion_8(dw15, dw15_runs);

  std::fprintf(stderr, "[acceptance] %d of 8 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
