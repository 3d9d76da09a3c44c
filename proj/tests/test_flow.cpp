#include <doctest.h>

#include <cmath>
#include <random>

#include "morselab/error.hpp"
#include "morselab/flow.hpp"
#include "support.hpp"

using namespace morselab;
using morselab::test::line;
using morselab::test::square;

namespace {

struct DoubleWell {
  EnergyFunctional f;
  SearchResult search;
};

DoubleWell doublewell(double lambda, int n = 64) {
  EnergyFunctional f(line(n), 2.0, GSpec::doublewell(lambda, 1));
  auto search = multistart_search(f, NewtonConfig{});
  return {std::move(f), std::move(search)};
}

const CriticalPoint& find_index(const std::vector<CriticalPoint>& crit, int index, int nth = 0) {
  for (const auto& cp : crit) {
    if (cp.index() == index && nth-- == 0) return cp;
  }
  throw std::runtime_error("no such point");
}

}  // namespace

TEST_CASE("conformal factor") {
  CHECK(conformal_factor(0.0) == 1.0);
  CHECK(conformal_factor(1.0) == 1.0);
  CHECK(conformal_factor(2.0) == 0.5);
  CHECK(conformal_factor(10.0) == 0.1);
  // bounded speed and monotone decrease
  double prev = 1.0;
  for (double s = 0.0; s <= 5.0; s += 0.01) {
    const double c = conformal_factor(s);
    CHECK(c <= prev + 1e-15);
    CHECK(c * s <= std::max(1.0, s) * 1.0);
    CHECK(c * s <= 2.0);
    prev = c;
  }
  // continuous across the blend
  CHECK(conformal_factor(1.0 + 1e-9) == doctest::Approx(1.0));
  CHECK(conformal_factor(2.0 - 1e-9) == doctest::Approx(0.5));
}

TEST_CASE("descent from near the convex minimum") {
  std::mt19937_64 rng(4);
  for (const Grid& g : {line(32), square(6, 6)}) {
    const EnergyFunctional f(g, 2.0, GSpec::zero());
    const auto search = multistart_search(f, NewtonConfig{});
    REQUIRE(search.points.size() == 1);
    for (FlowScheme scheme : {FlowScheme::imex, FlowScheme::explicit_euler}) {
      FlowConfig cfg;
      cfg.scheme = scheme;
      const auto tr = integrate_descent(f, test::smooth_field(g, rng, 0.3), cfg, search.points);
      CHECK(tr.limit.kind == LimitKind::critical_point);
      CHECK(tr.limit.id == 0);
    }
  }
}

TEST_CASE("descent to u+ agrees with a refined integration") {
  const auto dw = doublewell(15);
  const auto& crit = dw.search.points;
  REQUIRE(crit.size() == 3);
  const Field u0 = 0.3 * fourier_mode(dw.f.grid(), 0);
  for (FlowScheme scheme : {FlowScheme::imex, FlowScheme::explicit_euler}) {
    FlowConfig cfg;
    cfg.scheme = scheme;
    FlowConfig fine = cfg;
    fine.cfl /= 4.0;
    fine.dt_max /= 4.0;
    fine.dt_init /= 4.0;
    const auto a = integrate_descent(dw.f, u0, cfg, crit);
    const auto b = integrate_descent(dw.f, u0, fine, crit);
    REQUIRE(a.limit.kind == LimitKind::critical_point);
    REQUIRE(b.limit.kind == LimitKind::critical_point);
    CHECK(a.limit.id == b.limit.id);
    CHECK(crit[static_cast<std::size_t>(a.limit.id)].u.sum() > 0.0);
    CHECK(crit[static_cast<std::size_t>(a.limit.id)].index() == 0);
    // Both runs stop inside the limit_tol ball, so they end close to each other.
    CHECK(dw.f.metric().distance(a.states.back(), b.states.back()) <= 2.0 * cfg.limit_tol);
    CHECK(std::abs(a.energies.back() - b.energies.back()) <= 1e-5);
  }
}

TEST_CASE("energy strictly decreases along every trajectory") {
  const auto dw = doublewell(50);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const Field u0 = test::smooth_field(dw.f.grid(), rng, 2.0);
    const auto tr = integrate_descent(dw.f, u0, FlowConfig{}, dw.search.points);
    REQUIRE(tr.energies.size() >= 2);
    for (std::size_t k = 1; k < tr.energies.size(); ++k) CHECK(tr.energies[k] < tr.energies[k - 1]);
    for (std::size_t k = 1; k < tr.steps.size(); ++k) CHECK(tr.steps[k] > tr.steps[k - 1]);
  }
}

TEST_CASE("unstable shots from index-1 and index-2 points") {
  const auto dw = doublewell(15);
  const auto& crit = dw.search.points;
  const auto& saddle = find_index(crit, 1);
  const auto shots = shoot_unstable(dw.f, saddle, FlowConfig{}, crit);
  REQUIRE(shots.size() == 2);
  std::vector<int> limits;
  for (const auto& s : shots) {
    REQUIRE(s.limit.kind == LimitKind::critical_point);
    limits.push_back(s.limit.id);
  }
  CHECK(limits[0] != limits[1]);
  for (int id : limits) CHECK(crit[static_cast<std::size_t>(id)].index() == 0);

  CHECK_THROWS_AS(shoot_unstable(dw.f, find_index(crit, 0), FlowConfig{}, crit), PreconditionError);

  const auto dw50 = doublewell(50);
  const auto& top = find_index(dw50.search.points, 2);
  const auto circle = shoot_unstable(dw50.f, top, FlowConfig{}, dw50.search.points);
  CHECK(circle.size() == 64);
}

TEST_CASE("connection counts for the double well") {
  const auto dw = doublewell(15);
  const auto& crit = dw.search.points;
  const auto table = connection_table(dw.f, find_index(crit, 1), FlowConfig{}, crit);
  CHECK(table.resolved);
  REQUIRE(table.counts.size() == 2);
  for (const auto& c : table.counts) {
    CHECK(c.raw_count == 1);
    CHECK(c.mod2 == 1);
  }
  const auto single = count_connections(dw.f, find_index(crit, 1), find_index(crit, 0), FlowConfig{}, crit);
  CHECK(single.mod2 == 1);
  CHECK_THROWS_AS(count_connections(dw.f, find_index(crit, 0), find_index(crit, 0, 1), FlowConfig{}, crit),
                  PreconditionError);
}

TEST_CASE("connection counts at lambda = 50") {
  const auto dw = doublewell(50);
  const auto& crit = dw.search.points;
  REQUIRE(crit.size() == 5);
  for (const auto& cp : crit) {
    if (cp.index() == 0) continue;
    const auto table = connection_table(dw.f, cp, FlowConfig{}, crit);
    CHECK(table.resolved);
    for (const auto& c : table.counts) {
      INFO("hi ", c.hi_id, " lo ", c.lo_id, " raw ", c.raw_count);
      CHECK(c.mod2 == 1);
    }
    if (cp.index() == 2) CHECK(table.bisection_flows > 0);
  }
  CHECK_THROWS_AS(count_connections(dw.f, find_index(crit, 2), find_index(crit, 0), FlowConfig{}, crit),
                  PreconditionError);
}

TEST_CASE("limit classification") {
  const auto dw = doublewell(15, 32);
  const auto& crit = dw.search.points;
  const auto& metric = dw.f.metric();
  const auto exact = classify_limit(metric, crit[1].u, crit, 1e-3);
  CHECK(exact.kind == LimitKind::critical_point);
  CHECK(exact.id == 1);

  const Field far = 50.0 * fourier_mode(dw.f.grid(), 3);
  CHECK(classify_limit(metric, far, crit, 1e-3).kind == LimitKind::exhausted);
  CHECK(classify_limit(metric, far, crit, 1e-3, LimitKind::escaped).kind == LimitKind::escaped);

  // Two points within tolerance of the state: ambiguous.
  const double gap = metric.distance(crit[0].u, crit[2].u);
  CHECK_THROWS_AS(classify_limit(metric, 0.5 * (crit[0].u + crit[2].u), crit, gap), AmbiguityError);
}

TEST_CASE("flow configuration JSON and validation") {
  FlowConfig c;
  c.metric = FlowMetric::euclidean;
  c.scheme = FlowScheme::explicit_euler;
  c.cfl = 0.25;
  c.circle_samples = 32;
  const auto back = flow_config_from_json(to_json(c));
  CHECK(back.metric == FlowMetric::euclidean);
  CHECK(back.scheme == FlowScheme::explicit_euler);
  CHECK(back.cfl == 0.25);
  CHECK(back.circle_samples == 32);
  CHECK_THROWS_AS(flow_config_from_json({{"scheme", "rk4"}}), ConfigError);
  CHECK_THROWS_AS(flow_config_from_json({{"metric", "l1"}}), ConfigError);

  FlowConfig bad;
  bad.cfl = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = FlowConfig{};
  bad.dt_min = 2.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = FlowConfig{};
  bad.circle_samples = 2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
