#include "morselab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "morselab/error.hpp"
#include "morselab/field_io.hpp"
#include "morselab/parallel.hpp"
#include "morselab/spectral.hpp"

namespace morselab {

namespace fs = std::filesystem;

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  // splitmix64 finalizer over (root, stream)
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void ExperimentConfig::validate() const {
  if (name.empty() || name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("experiment name must be a nonempty file-name fragment");
  }
  const Grid gr = build_grid(grid);
  check_exponent(gr, p);
  const GSpec gs = gspec_from_json(g);
  if (!(gs.alpha < 2.0 * p)) {
    throw ConfigError("growth exponent alpha = " + std::to_string(gs.alpha) +
                      " must be < 2p = " + std::to_string(2.0 * p));
  }
  if (!(growth_t_min < growth_t_max) || growth_samples < 2) {
    throw ConfigError("growth window needs t_min < t_max and at least 2 samples");
  }
  newton.validate();
  flow.validate();
  if (!(lyapunov_radius > 0.0) || lyapunov_samples < 1 || hyperbolic_samples < 1 ||
      probe_trajectories < 0) {
    throw ConfigError("checks: radius must be positive and sample counts >= 1");
  }
  if (!(palais_smale.bound > 0.0 && palais_smale.residual_tol > 0.0 &&
        palais_smale.cauchy_tol > 0.0 && palais_smale.tail >= 1)) {
    throw ConfigError("checks.palais_smale: tolerances must be positive and tail >= 1");
  }
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys,
                    const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) ==
        keys.end()) {
      throw ConfigError("unknown key '" + k + "' in " + where);
    }
  }
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  reject_unknown(j,
                 {"$schema", "name", "grid", "p", "g", "growth", "newton", "flow", "outputs",
                  "rng_seed", "checks"},
                 "experiment config");
  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    if (!j.contains("grid")) throw ConfigError("experiment config needs a grid");
    c.grid = grid_spec_from_json(j["grid"]);
    c.p = j.value("p", c.p);
    if (j.contains("g")) c.g = j["g"];
    if (j.contains("growth")) {
      const auto& gw = j["growth"];
      reject_unknown(gw, {"t_min", "t_max", "samples"}, "growth");
      c.growth_t_min = gw.value("t_min", c.growth_t_min);
      c.growth_t_max = gw.value("t_max", c.growth_t_max);
      c.growth_samples = gw.value("samples", c.growth_samples);
    }
    if (j.contains("newton")) c.newton = newton_config_from_json(j["newton"]);
    if (j.contains("flow")) c.flow = flow_config_from_json(j["flow"]);
    c.outputs = j.value("outputs", c.outputs);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    if (j.contains("checks")) {
      const auto& ck = j["checks"];
      reject_unknown(ck,
                     {"lyapunov_radius", "lyapunov_samples", "hyperbolic_samples",
                      "probe_trajectories", "palais_smale"},
                     "checks");
      c.lyapunov_radius = ck.value("lyapunov_radius", c.lyapunov_radius);
      c.lyapunov_samples = ck.value("lyapunov_samples", c.lyapunov_samples);
      c.hyperbolic_samples = ck.value("hyperbolic_samples", c.hyperbolic_samples);
      c.probe_trajectories = ck.value("probe_trajectories", c.probe_trajectories);
      if (ck.contains("palais_smale")) {
        const auto& ps = ck["palais_smale"];
        reject_unknown(ps, {"bound", "residual_tol", "tail", "cauchy_tol"}, "palais_smale");
        c.palais_smale.bound = ps.value("bound", c.palais_smale.bound);
        c.palais_smale.residual_tol = ps.value("residual_tol", c.palais_smale.residual_tol);
        c.palais_smale.tail = ps.value("tail", c.palais_smale.tail);
        c.palais_smale.cauchy_tol = ps.value("cauchy_tol", c.palais_smale.cauchy_tol);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return experiment_config_from_json(j);
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"name", c.name},
          {"grid", to_json(c.grid)},
          {"p", c.p},
          {"g", c.g},
          {"growth", {{"t_min", c.growth_t_min}, {"t_max", c.growth_t_max},
                      {"samples", c.growth_samples}}},
          {"newton", to_json(c.newton)},
          {"flow", to_json(c.flow)},
          {"outputs", c.outputs},
          {"rng_seed", c.rng_seed},
          {"checks",
           {{"lyapunov_radius", c.lyapunov_radius},
            {"lyapunov_samples", c.lyapunov_samples},
            {"hyperbolic_samples", c.hyperbolic_samples},
            {"probe_trajectories", c.probe_trajectories},
            {"palais_smale",
             {{"bound", c.palais_smale.bound},
              {"residual_tol", c.palais_smale.residual_tol},
              {"tail", c.palais_smale.tail},
              {"cauchy_tol", c.palais_smale.cauchy_tol}}}}}};
}

bool ExperimentReport::passed() const {
  if (!failed_stage.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::validate: return "validate";
    case Stage::critical_points: return "critical_points";
    case Stage::homology: return "homology";
  }
  return "unknown";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

class StageTimer {
 public:
  StageTimer(nlohmann::json& sink, std::string key)
      : sink_(sink), key_(std::move(key)), t0_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto t1 = std::chrono::steady_clock::now();
    sink_[key_] = std::chrono::duration<double>(t1 - t0_).count();
  }

 private:
  nlohmann::json& sink_;
  std::string key_;
  std::chrono::steady_clock::time_point t0_;
};

void add_check(ExperimentReport& r, std::string name, bool ok, std::string detail) {
  r.checks.push_back({std::move(name), ok, std::move(detail)});
}

// Invariants of individual critical points.
void check_points(ExperimentReport& r) {
  const auto& f = *r.functional;
  const auto& cfg = r.config;
  const auto& pts = r.search->points;
  const int n = static_cast<int>(pts.size());

  double worst_res = 0.0;
  for (const auto& cp : pts) worst_res = std::max(worst_res, f.residual(cp.u));
  add_check(r, "residuals", worst_res <= cfg.newton.newton_tol,
            "max recomputed residual " + fmt(worst_res));

  int degenerate = 0;
  for (const auto& cp : pts) degenerate += cp.nondegenerate ? 0 : 1;
  add_check(r, "nondegenerate", degenerate == 0 && n > 0,
            std::to_string(degenerate) + " degenerate of " + std::to_string(n));

  bool sylvester = true;
  double ortho = 0.0;
  for (const auto& cp : pts) {
    const auto& sd = cp.spectral;
    sylvester = sylvester && sd.index == sd.sylvester_index;
    const Eigen::MatrixXd gram = sd.eigenvectors.transpose() * sd.gram * sd.eigenvectors;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
    ortho = std::max(ortho, (gram - id).cwiseAbs().maxCoeff());
  }
  add_check(r, "sylvester_index", sylvester, "pencil index equals inertia of A");
  add_check(r, "b_orthonormal", ortho <= 1e-10, "max |V^T B V - I| = " + fmt(ortho));

  // Hyperbolicity and the linear Lyapunov property need nondegenerate points.
  std::vector<CheckResult> hyp(pts.size()), lyap(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& cp = pts[i];
    if (!cp.nondegenerate) {
      hyp[i] = {"", false, "point " + std::to_string(cp.id) + " degenerate"};
      lyap[i] = hyp[i];
      return;
    }
    const HyperbolicOperator L(cp.spectral);
    std::mt19937_64 rng(derive_seed(cfg.rng_seed, 2000 + static_cast<std::uint64_t>(cp.id)));
    std::normal_distribution<double> normal;
    double sq = 0.0;
    for (int s = 0; s < cfg.hyperbolic_samples; ++s) {
      Field x(L.dimension());
      for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = normal(rng);
      sq = std::max(sq, (L.apply(L.apply(x)) - x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff());
    }
    const double expected = 2.0 * cp.index() - L.dimension();
    const double tr = L.trace();
    const bool ok = sq <= 1e-12 && std::abs(tr - expected) <= 1e-10;
    hyp[i] = {"", ok,
              "point " + std::to_string(cp.id) + ": |L^2 x - x| " + fmt(sq) + ", trace " +
                  fmt(tr) + " vs " + fmt(expected)};
    const auto rep = verify_linear_lyapunov(
        f, cp.u, cp.spectral, L, cfg.lyapunov_radius, cfg.lyapunov_samples,
        derive_seed(cfg.rng_seed, 1000 + static_cast<std::uint64_t>(cp.id)));
    lyap[i] = {"", rep.passed,
               "point " + std::to_string(cp.id) + ": max ratio " + fmt(rep.max_ratio)};
  });
  auto merge = [&](const char* name, const std::vector<CheckResult>& parts) {
    bool ok = true;
    std::string detail;
    for (const auto& p : parts) {
      ok = ok && p.passed;
      if (!detail.empty()) detail += "; ";
      detail += p.detail;
    }
    add_check(r, name, ok && !parts.empty(), detail.empty() ? "no points" : detail);
  };
  merge("hyperbolic_operator", hyp);
  merge("linear_lyapunov", lyap);

  if (f.gspec().even) {
    const double radius = cfg.newton.dedup_radius_for(f.grid());
    int unmatched = 0;
    for (const auto& a : pts) {
      bool found = false;
      for (const auto& b : pts) {
        if (f.metric().distance(-a.u, b.u) <= radius && a.index() == b.index()) found = true;
      }
      unmatched += found ? 0 : 1;
    }
    add_check(r, "symmetry", unmatched == 0,
              std::to_string(unmatched) + " points without a mirror image");
  }

  add_check(r, "count_not_two", n != 2,
            std::to_string(n) + " critical points" +
                (r.search->widened ? " (after widened search)" : ""));
}

std::vector<Field> probe_starts(const ExperimentConfig& cfg, const Grid& grid) {
  std::mt19937_64 rng(derive_seed(cfg.rng_seed, 3));
  std::uniform_real_distribution<double> amp(-cfg.newton.amplitude_max, cfg.newton.amplitude_max);
  std::vector<Field> out;
  for (int k = 0; k < cfg.probe_trajectories; ++k) {
    Field u = Field::Zero(grid.dof_count());
    for (int m = 0; m < 3; ++m) u += amp(rng) / (m + 1) * fourier_mode(grid, m);
    out.push_back(std::move(u));
  }
  return out;
}

void run_homology(ExperimentReport& r) {
  const auto& f = *r.functional;
  const auto& cfg = r.config;
  const auto& pts = r.search->points;
  if (r.search->any_degenerate) {
    throw DegenerateError("a degenerate critical point was found; homology is not assembled");
  }

  std::vector<const CriticalPoint*> sources;
  for (const auto& cp : pts) {
    if (cp.index() >= 1 && cp.index() <= 2) sources.push_back(&cp);
  }
  std::vector<ConnectionTable> tables(sources.size());
  {
    StageTimer t(r.timings, "connections");
    parallel_for(sources.size(), [&](std::size_t i) {
      tables[i] = connection_table(f, *sources[i], cfg.flow, pts);
    });
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (auto& c : tables[i].counts) r.counts.push_back(c);
    for (auto& traj : tables[i].shots) {
      r.trajectories.push_back({"shot", sources[i]->id, std::move(traj), {}});
    }
  }

  {
    StageTimer t(r.timings, "probes");
    const auto starts = probe_starts(cfg, f.grid());
    std::vector<Trajectory> probes(starts.size());
    parallel_for(starts.size(),
                 [&](std::size_t i) { probes[i] = integrate_descent(f, starts[i], cfg.flow, pts); });
    for (auto& traj : probes) r.trajectories.push_back({"probe", -1, std::move(traj), {}});
  }
  parallel_for(r.trajectories.size(), [&](std::size_t i) {
    auto& st = r.trajectories[i];
    st.palais_smale = palais_smale_diagnostic(f, st.trajectory.states, cfg.palais_smale);
  });

  bool resolved = true;
  std::string unresolved;
  for (const auto& c : r.counts) {
    if (c.resolved) continue;
    resolved = false;
    unresolved += " " + std::to_string(c.hi_id) + "->" + std::to_string(c.lo_id);
  }
  add_check(r, "connections_resolved", resolved,
            resolved ? std::to_string(r.counts.size()) + " counts" : "unresolved:" + unresolved);

  long worst_decrease = 0;
  for (const auto& st : r.trajectories) {
    const auto& e = st.trajectory.energies;
    for (std::size_t k = 1; k < e.size(); ++k) worst_decrease += e[k] < e[k - 1] ? 0 : 1;
  }
  add_check(r, "strict_decrease", worst_decrease == 0,
            std::to_string(r.trajectories.size()) + " trajectories, " +
                std::to_string(worst_decrease) + " non-decreasing steps");

  int ps_checked = 0, ps_failed = 0;
  for (const auto& st : r.trajectories) {
    if (st.trajectory.limit.kind == LimitKind::escaped) continue;
    ++ps_checked;
    ps_failed += st.palais_smale.passed ? 0 : 1;
  }
  add_check(r, "palais_smale", ps_failed == 0,
            std::to_string(ps_failed) + " of " + std::to_string(ps_checked) +
                " non-escaped trajectories fail");

  StageTimer t(r.timings, "complex");
  r.complex = assemble(pts, r.counts);
  const bool square = check_boundary_square(*r.complex);
  add_check(r, "boundary_square", square, "d o d over GF(2)");
  if (!square) throw NumericError("boundary of boundary is nonzero; counts are inconsistent");
  r.homology = betti_numbers(*r.complex);

  const auto& b = r.homology->betti;
  bool contractible = !b.empty() && b[0] == 1;
  for (std::size_t k = 1; k < b.size(); ++k) contractible = contractible && b[k] == 0;
  std::string bs;
  for (int v : b) bs += (bs.empty() ? "" : ",") + std::to_string(v);
  add_check(r, "betti_contractible", contractible, "betti (" + bs + ")");
  add_check(r, "euler_characteristic",
            r.homology->euler_chain == r.homology->euler_homology,
            "chain " + std::to_string(r.homology->euler_chain) + ", homology " +
                std::to_string(r.homology->euler_homology));
}

}  // namespace

ExperimentReport run(const ExperimentConfig& cfg, Stage stage) {
  ExperimentReport r;
  r.config = cfg;
  r.stage = stage;
  const auto t0 = std::chrono::steady_clock::now();
  std::string current = "validate";
  try {
    cfg.validate();
    r.config.newton.rng_seed = derive_seed(cfg.rng_seed, 1);
    GSpec g = gspec_from_json(cfg.g);
    r.functional = std::make_shared<const EnergyFunctional>(build_grid(cfg.grid), cfg.p, g);
    {
      StageTimer t(r.timings, "growth");
      r.growth = validate_growth(g, cfg.p, cfg.growth_t_min, cfg.growth_t_max, cfg.growth_samples);
    }
    // The coercivity argument needs alpha < 2p and the lower bound G >= -beta|t|^alpha - delta;
    // the two-sided bound is reported but not required.
    add_check(r, "growth", r.growth->alpha_ok && r.growth->lower_bound_ok,
              "alpha " + fmt(r.growth->alpha) + " < 2p, lower excess " +
                  fmt(r.growth->max_lower_excess) + ", two-sided excess " +
                  fmt(r.growth->max_excess));

    if (stage != Stage::validate) {
      current = "critical_points";
      {
        StageTimer t(r.timings, "search");
        r.search = multistart_search(*r.functional, r.config.newton);
      }
      check_points(r);
    }
    if (stage == Stage::homology) {
      current = "homology";
      run_homology(r);
    }
  } catch (const std::exception& e) {
    r.failed_stage = current;
    r.failure_reason = e.what();
  }
  r.timings["total"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

nlohmann::json ExperimentReport::to_json(bool include_timings) const {
  using morselab::to_json;
  nlohmann::json j;
  j["experiment"] = config.name;
  j["stage"] = stage_name(stage);
  j["config"] = morselab::to_json(config);
  j["status"] = {{"passed", passed()}};
  if (!failed_stage.empty()) {
    j["status"]["failed_stage"] = failed_stage;
    j["status"]["reason"] = failure_reason;
  }
  if (growth) j["growth"] = morselab::to_json(*growth);
  if (search) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& cp : search->points) {
      auto rec = morselab::to_json(cp);
      rec["field_ref"] = config.name + "_cp" + std::to_string(cp.id) + ".csv";
      pts.push_back(rec);
    }
    j["critical_points"] = pts;
    j["search"] = {{"seeds_tried", search->seeds_tried},
                   {"rounds", search->rounds},
                   {"widened", search->widened},
                   {"any_degenerate", search->any_degenerate},
                   {"diagnostics", search->diagnostics}};
  }
  if (stage == Stage::homology && search) {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : counts) cs.push_back(morselab::to_json(c));
    j["connections"] = cs;
    nlohmann::json ts = nlohmann::json::array();
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
      const auto& st = trajectories[i];
      const auto& tr = st.trajectory;
      nlohmann::json rec{{"id", i},
                         {"source", st.source},
                         {"limit", morselab::to_json(tr.limit)},
                         {"total_steps", tr.total_steps},
                         {"rejected_steps", tr.rejected_steps},
                         {"initial_energy", tr.energies.front()},
                         {"final_energy", tr.energies.back()},
                         {"final_residual", tr.residuals.back()},
                         {"palais_smale", morselab::to_json(st.palais_smale)}};
      if (st.from_id >= 0) rec["from_id"] = st.from_id;
      if (!tr.diagnostic.empty()) rec["diagnostic"] = tr.diagnostic;
      ts.push_back(rec);
    }
    j["trajectories"] = ts;
  }
  if (complex) j["complex"] = morselab::to_json(*complex);
  if (homology) j["homology"] = morselab::to_json(*homology);
  nlohmann::json ck = nlohmann::json::array();
  for (const auto& c : checks) {
    ck.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["checks"] = ck;
  if (include_timings) j["timings"] = timings;
  return j;
}

namespace {

fs::path prepare_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("no output directory given");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output directory " + dir + " cannot be created: " + ec.message());
  }
  return fs::path(dir);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os.precision(17);
  return os;
}

}  // namespace

std::vector<std::string> write_artifacts(const ExperimentReport& report, const std::string& dir) {
  const fs::path root = prepare_dir(dir);
  const auto& name = report.config.name;
  std::vector<std::string> written;

  const fs::path rp = root / (name + "_report.json");
  {
    auto os = open_out(rp);
    os << report.to_json(true).dump(2) << "\n";
  }
  written.push_back(rp.string());

  if (report.search && report.functional) {
    for (const auto& cp : report.search->points) {
      const fs::path cpath = root / (name + "_cp" + std::to_string(cp.id) + ".csv");
      write_field_csv(cpath.string(), report.functional->grid(), cp.u);
      written.push_back(cpath.string());
    }
  }
  if (!report.counts.empty()) {
    const fs::path cpath = root / (name + "_counts.json");
    auto os = open_out(cpath);
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : report.counts) cs.push_back(to_json(c));
    os << cs.dump(2) << "\n";
    written.push_back(cpath.string());
  }
  return written;
}

std::vector<std::string> emit_plotdata(const ExperimentReport& report, const std::string& kind,
                                       const std::string& dir) {
  if (kind != "energy_landscape" && kind != "trajectories" && kind != "spectrum") {
    throw UsageError("unknown plot kind '" + kind +
                     "' (expected energy_landscape, trajectories or spectrum)");
  }
  if (!report.functional) throw PreconditionError("report has no functional; the run failed early");
  const auto& f = *report.functional;
  const auto& name = report.config.name;
  const fs::path root = prepare_dir(dir);
  std::vector<std::string> written;

  if (kind == "spectrum") {
    if (!report.search) throw PreconditionError("spectrum plot needs the critical point stage");
    const fs::path path = root / (name + "_spectrum.csv");
    auto os = open_out(path);
    os << "cp_id,eigenvalue_rank,eigenvalue\n";
    for (const auto& cp : report.search->points) {
      const auto& ev = cp.spectral.eigenvalues;
      for (Eigen::Index k = 0; k < ev.size(); ++k) os << cp.id << ',' << k << ',' << ev[k] << '\n';
    }
    written.push_back(path.string());
  } else if (kind == "trajectories") {
    if (report.stage != Stage::homology) {
      throw PreconditionError("trajectory plot needs the homology stage");
    }
    const fs::path index = root / (name + "_trajectories.csv");
    auto os = open_out(index);
    os << "trajectory_id,source,from_id,limit_kind,limit_id,file\n";
    for (std::size_t i = 0; i < report.trajectories.size(); ++i) {
      const auto& st = report.trajectories[i];
      const auto& tr = st.trajectory;
      const std::string file = name + "_trajectories_" + std::to_string(i) + ".csv";
      os << i << ',' << st.source << ',' << st.from_id << ',' << to_string(tr.limit.kind) << ','
         << tr.limit.id << ',' << file << '\n';
      auto ts = open_out(root / file);
      ts << "step,energy,residual";
      const Eigen::Index n = tr.states.empty() ? 0 : tr.states.front().size();
      for (Eigen::Index k = 0; k < n; ++k) ts << ",u" << k;
      ts << '\n';
      for (std::size_t s = 0; s < tr.states.size(); ++s) {
        ts << tr.steps[s] << ',' << tr.energies[s] << ',' << tr.residuals[s];
        for (Eigen::Index k = 0; k < n; ++k) ts << ',' << tr.states[s][k];
        ts << '\n';
      }
      written.push_back((root / file).string());
    }
    written.insert(written.begin(), index.string());
  } else {
    if (f.grid().dim() != 1) throw UsageError("energy_landscape is available for 1D grids only");
    const Field e0 = fourier_mode(f.grid(), 0);
    const Field e1 = fourier_mode(f.grid(), 1);
    double reach = 1.0;
    if (report.search) {
      for (const auto& cp : report.search->points) {
        reach = std::max(reach, 1.25 * cp.u.cwiseAbs().maxCoeff());
      }
    }
    const int n = 41;
    const fs::path path = root / (name + "_energy_landscape.csv");
    auto os = open_out(path);
    os << "a,b,energy\n";
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        const double a = -reach + 2.0 * reach * i / (n - 1);
        const double b = -reach + 2.0 * reach * k / (n - 1);
        os << a << ',' << b << ',' << f.energy(a * e0 + b * e1) << '\n';
      }
    }
    written.push_back(path.string());
  }
  return written;
}

}  // namespace morselab
