#pragma once

// Shared fixtures and independent reference computations for the unit tests.

#include <cmath>
#include <random>

#include "morselab/functional.hpp"
#include "morselab/grid.hpp"

namespace morselab::test {

inline Grid line(int n, double length = 1.0) {
  GridSpec s;
  s.dim = 1;
  s.extents = {length, 1.0};
  s.interior = {n, 1};
  return build_grid(s);
}

inline Grid square(int nx, int ny, double lx = 1.0, double ly = 1.0) {
  GridSpec s;
  s.dim = 2;
  s.extents = {lx, ly};
  s.interior = {nx, ny};
  return build_grid(s);
}

inline Field random_field(const Grid& g, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Field u(static_cast<Eigen::Index>(g.dof_count()));
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = n(rng);
  return u;
}

/// Smooth random field: a few low sine modes with random coefficients.
inline Field smooth_field(const Grid& g, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  const double a1 = n(rng), a2 = n(rng), a3 = n(rng);
  const double lx = g.extent(0), ly = g.extent(1);
  const bool two = g.dim() == 2;
  return g.interpolate([&](double x, double y) {
    const double sy = two ? std::sin(M_PI * y / ly) : 1.0;
    const double sy2 = two ? std::sin(2 * M_PI * y / ly) : 1.0;
    return (a1 * std::sin(M_PI * x / lx) + a2 * std::sin(2 * M_PI * x / lx) * sy2 +
            a3 * std::sin(3 * M_PI * x / lx)) * sy;
  });
}

}  // namespace morselab::test
