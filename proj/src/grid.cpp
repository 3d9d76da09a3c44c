#include "morselab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "morselab/error.hpp"
#include "morselab/simd/kernels.hpp"

namespace morselab {

Grid build_grid(const GridSpec& spec) {
  if (spec.dim != 1 && spec.dim != 2) {
    throw ConfigError("grid dimension must be 1 or 2, got " + std::to_string(spec.dim));
  }
  Grid g;
  g.spec_ = spec;
  g.dofs_ = 1;
  g.cells_ = 1;
  g.cell_volume_ = 1.0;
  for (int axis = 0; axis < spec.dim; ++axis) {
    if (spec.interior[axis] < 1) {
      throw ConfigError("interior node count must be >= 1 on axis " + std::to_string(axis));
    }
    if (!(spec.extents[axis] > 0.0) || !std::isfinite(spec.extents[axis])) {
      throw ConfigError("extent must be positive on axis " + std::to_string(axis));
    }
    g.spacing_[axis] = spec.extents[axis] / (spec.interior[axis] + 1);
    g.dofs_ *= static_cast<std::size_t>(spec.interior[axis]);
    g.cells_ *= static_cast<std::size_t>(spec.interior[axis] + 1);
    g.cell_volume_ *= g.spacing_[axis];
  }
  if (spec.dim == 1) {
    g.spec_.interior[1] = 1;
    g.spec_.extents[1] = 1.0;
    g.spacing_[1] = 1.0;
  }
  return g;
}

double Grid::measure() const {
  return spec_.dim == 1 ? spec_.extents[0] : spec_.extents[0] * spec_.extents[1];
}

double Grid::diameter() const {
  return spec_.dim == 1 ? spec_.extents[0] : std::hypot(spec_.extents[0], spec_.extents[1]);
}

std::array<double, 2> Grid::node_coordinate(std::size_t i) const {
  const int n0 = spec_.interior[0];
  const auto a = static_cast<int>(i % static_cast<std::size_t>(n0));
  const auto b = static_cast<int>(i / static_cast<std::size_t>(n0));
  if (spec_.dim == 1) return {(a + 1) * spacing_[0], 0.0};
  return {(a + 1) * spacing_[0], (b + 1) * spacing_[1]};
}

std::array<double, 2> Grid::cell_center(std::size_t c) const {
  const int w = cells_along(0);
  const auto a = static_cast<int>(c % static_cast<std::size_t>(w));
  const auto b = static_cast<int>(c / static_cast<std::size_t>(w));
  if (spec_.dim == 1) return {(a + 0.5) * spacing_[0], 0.0};
  return {(a + 0.5) * spacing_[0], (b + 0.5) * spacing_[1]};
}

CellStencil Grid::cell_stencil(std::size_t c) const {
  const int n0 = spec_.interior[0];
  const int w = n0 + 1;
  const auto a = static_cast<int>(c % static_cast<std::size_t>(w));
  const auto b = static_cast<int>(c / static_cast<std::size_t>(w));
  const double ihx = 1.0 / spacing_[0];
  CellStencil st;
  if (spec_.dim == 1) {
    auto dof = [&](int pa) { return (pa >= 1 && pa <= n0) ? pa - 1 : -1; };
    st.corners[0] = {dof(a), -ihx, 0.0, 0.5};
    st.corners[1] = {dof(a + 1), ihx, 0.0, 0.5};
    st.size = 2;
    return st;
  }
  const int n1 = spec_.interior[1];
  const double ihy = 1.0 / spacing_[1];
  auto dof = [&](int pa, int pb) {
    return (pa >= 1 && pa <= n0 && pb >= 1 && pb <= n1) ? (pb - 1) * n0 + (pa - 1) : -1;
  };
  st.corners[0] = {dof(a, b), -ihx, -ihy, 0.25};
  st.corners[1] = {dof(a + 1, b), ihx, 0.0, 0.25};
  st.corners[2] = {dof(a, b + 1), 0.0, ihy, 0.25};
  st.corners[3] = {dof(a + 1, b + 1), 0.0, 0.0, 0.25};
  st.size = 4;
  return st;
}

void Grid::check_field(const Field& u) const {
  if (static_cast<std::size_t>(u.size()) != dofs_) {
    throw ShapeError("field has " + std::to_string(u.size()) + " values, grid has " +
                     std::to_string(dofs_) + " interior nodes");
  }
}

std::vector<double> Grid::pad(const Field& u) const {
  check_field(u);
  const int w = padded_width();
  const int n0 = spec_.interior[0];
  std::vector<double> out(static_cast<std::size_t>(w) * padded_rows(), 0.0);
  if (spec_.dim == 1) {
    for (int a = 0; a < n0; ++a) out[a + 1] = u[a];
    return out;
  }
  const int n1 = spec_.interior[1];
  for (int b = 0; b < n1; ++b) {
    for (int a = 0; a < n0; ++a) {
      out[static_cast<std::size_t>(b + 1) * w + a + 1] = u[b * n0 + a];
    }
  }
  return out;
}

CellGradients gradient_field(const Grid& grid, const Field& u) {
  const auto& k = simd::active_kernels();
  const auto padded = grid.pad(u);
  const int w = grid.padded_width();
  const int cw = grid.cells_along(0);
  CellGradients out;
  out.gx.resize(grid.cell_count());
  if (grid.dim() == 1) {
    k.scaled_difference(padded.data(), padded.data() + 1, 1.0 / grid.spacing(0), out.gx.data(),
                        static_cast<std::size_t>(cw));
    return out;
  }
  out.gy.resize(grid.cell_count());
  const double ihx = 1.0 / grid.spacing(0);
  const double ihy = 1.0 / grid.spacing(1);
  for (int b = 0; b < grid.cells_along(1); ++b) {
    const double* row = padded.data() + static_cast<std::size_t>(b) * w;
    const double* next = row + w;
    double* gx = out.gx.data() + static_cast<std::size_t>(b) * cw;
    double* gy = out.gy.data() + static_cast<std::size_t>(b) * cw;
    k.scaled_difference(row, row + 1, ihx, gx, static_cast<std::size_t>(cw));
    k.scaled_difference(row, next, ihy, gy, static_cast<std::size_t>(cw));
  }
  return out;
}

std::vector<double> cell_averages(const Grid& grid, const Field& u) {
  const auto& k = simd::active_kernels();
  const auto padded = grid.pad(u);
  const int w = grid.padded_width();
  const int cw = grid.cells_along(0);
  std::vector<double> out(grid.cell_count());
  if (grid.dim() == 1) {
    k.pair_average(padded.data(), padded.data() + 1, out.data(), static_cast<std::size_t>(cw));
    return out;
  }
  std::vector<double> lower(static_cast<std::size_t>(cw));
  std::vector<double> upper(static_cast<std::size_t>(cw));
  for (int b = 0; b < grid.cells_along(1); ++b) {
    const double* row = padded.data() + static_cast<std::size_t>(b) * w;
    const double* next = row + w;
    k.pair_average(row, row + 1, lower.data(), lower.size());
    k.pair_average(next, next + 1, upper.data(), upper.size());
    k.pair_average(lower.data(), upper.data(), out.data() + static_cast<std::size_t>(b) * cw,
                   lower.size());
  }
  return out;
}

double integrate(const Grid& grid, std::span<const double> cell_values) {
  if (cell_values.size() != grid.cell_count()) {
    throw ShapeError("integrand has " + std::to_string(cell_values.size()) +
                     " cell values, grid has " + std::to_string(grid.cell_count()) + " cells");
  }
  double acc = 0.0;
  for (double v : cell_values) acc += v;
  return acc * grid.cell_volume();
}

void check_exponent(const Grid& grid, double p) {
  if (!(p > 0.5 * grid.dim()) || !std::isfinite(p)) {
    throw ConfigError("exponent p must exceed dim/2 = " + std::to_string(0.5 * grid.dim()) +
                      ", got " + std::to_string(p));
  }
}

namespace {

// First two terms of the second differential, with weights evaluated at `base`.
SparseMatrix assemble_weighted_stiffness(const Grid& grid, const Field& base, double p) {
  const auto grads = gradient_field(grid, base);
  const std::size_t nc = grid.cell_count();
  std::vector<double> s(nc), wp(nc), w1(nc), w2(nc);
  const auto& k = simd::active_kernels();
  k.squared_norm(grads.gx.data(), grid.dim() == 2 ? grads.gy.data() : nullptr, s.data(), nc);
  k.cell_weights(s.data(), p, wp.data(), w1.data(), w2.data(), nc);

  const double vol = grid.cell_volume();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(nc * (grid.dim() == 1 ? 4 : 16));
  for (std::size_t c = 0; c < nc; ++c) {
    const auto st = grid.cell_stencil(c);
    const double gx = grads.gx[c];
    const double gy = grid.dim() == 2 ? grads.gy[c] : 0.0;
    const double second = 2.0 * (p - 1.0) * w2[c];
    for (int i = 0; i < st.size; ++i) {
      const auto& ci = st.corners[i];
      if (ci.dof < 0) continue;
      const double proj_i = gx * ci.dx + gy * ci.dy;
      for (int j = 0; j < st.size; ++j) {
        const auto& cj = st.corners[j];
        if (cj.dof < 0) continue;
        const double proj_j = gx * cj.dx + gy * cj.dy;
        const double val = w1[c] * (ci.dx * cj.dx + ci.dy * cj.dy) + second * proj_i * proj_j;
        if (val != 0.0) trips.emplace_back(ci.dof, cj.dof, vol * val);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(grid.dof_count());
  SparseMatrix m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace

GramMatrix gram_matrix(const Grid& grid, const Field& base, double p) {
  check_exponent(grid, p);
  grid.check_field(base);
  return GramMatrix{assemble_weighted_stiffness(grid, base, p), base, p};
}

SparseMatrix stiffness_matrix(const Grid& grid) {
  return assemble_weighted_stiffness(grid, Field::Zero(static_cast<Eigen::Index>(grid.dof_count())),
                                     1.0);
}

SparseMatrix cell_mass_matrix(const Grid& grid, std::span<const double> coeff) {
  if (coeff.size() != grid.cell_count()) throw ShapeError("cell coefficient size mismatch");
  const double vol = grid.cell_volume();
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (coeff[c] == 0.0) continue;
    const auto st = grid.cell_stencil(c);
    for (int i = 0; i < st.size; ++i) {
      const auto& ci = st.corners[i];
      if (ci.dof < 0) continue;
      for (int j = 0; j < st.size; ++j) {
        const auto& cj = st.corners[j];
        if (cj.dof < 0) continue;
        trips.emplace_back(ci.dof, cj.dof, vol * coeff[c] * ci.avg * cj.avg);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(grid.dof_count());
  SparseMatrix m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace morselab

#include "morselab/metric.hpp"

namespace morselab {

StiffnessMetric::StiffnessMetric(const Grid& grid) : stiffness_(stiffness_matrix(grid)) {
  chol_.compute(stiffness_);
  if (chol_.info() != Eigen::Success) throw NumericError("stiffness matrix is not SPD");
}

double StiffnessMetric::inner(const Field& v, const Field& w) const {
  return v.dot(stiffness_ * w);
}

double StiffnessMetric::norm(const Field& v) const { return std::sqrt(std::max(0.0, inner(v, v))); }

double StiffnessMetric::distance(const Field& v, const Field& w) const {
  return norm(v - w);
}

double StiffnessMetric::dual_norm(const Field& covector) const {
  return std::sqrt(std::max(0.0, covector.dot(solve(covector))));
}

Field StiffnessMetric::solve(const Field& covector) const { return chol_.solve(covector); }

}  // namespace morselab
