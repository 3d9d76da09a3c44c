#pragma once

// Uniform tensor grids on rectangles (n = 1, 2) with homogeneous Dirichlet
// boundary. Only interior nodes carry degrees of freedom; every cell owns a
// forward-difference gradient taken from its lower-left corner and a
// corner-average value used for zeroth-order terms.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace morselab {

using Field = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct GridSpec {
  int dim = 1;
  std::array<double, 2> extents{1.0, 1.0};
  std::array<int, 2> interior{1, 1};
};

/// One corner of a cell: its interior dof (or -1 on the boundary) and the
/// coefficients with which it enters the cell gradient and cell average.
struct StencilEntry {
  int dof = -1;
  double dx = 0.0;
  double dy = 0.0;
  double avg = 0.0;
};

struct CellStencil {
  std::array<StencilEntry, 4> corners{};
  int size = 0;
};

class Grid {
 public:
  int dim() const { return spec_.dim; }
  const GridSpec& spec() const { return spec_; }
  int interior(int axis) const { return axis < spec_.dim ? spec_.interior[axis] : 1; }
  double extent(int axis) const { return spec_.extents[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  int cells_along(int axis) const { return axis < spec_.dim ? spec_.interior[axis] + 1 : 1; }

  std::size_t dof_count() const { return dofs_; }
  std::size_t cell_count() const { return cells_; }
  double cell_volume() const { return cell_volume_; }
  /// Lebesgue measure of the domain.
  double measure() const;
  /// Diameter of the rectangle.
  double diameter() const;

  /// Padded node layout: (interior+2) per axis in 2D, a single row in 1D.
  int padded_width() const { return spec_.interior[0] + 2; }
  int padded_rows() const { return spec_.dim == 2 ? spec_.interior[1] + 2 : 1; }

  /// Interior coordinates of dof `i` (y is 0 in 1D).
  std::array<double, 2> node_coordinate(std::size_t i) const;
  /// Midpoint of cell `c`.
  std::array<double, 2> cell_center(std::size_t c) const;

  CellStencil cell_stencil(std::size_t c) const;

  /// Copy interior values into a zero-padded row-major array.
  std::vector<double> pad(const Field& u) const;

  /// Throws ShapeError unless u has one value per interior node.
  void check_field(const Field& u) const;

  /// Nodal interpolant of a function of the coordinates.
  template <class F>
  Field interpolate(F&& fn) const {
    Field u(static_cast<Eigen::Index>(dofs_));
    for (std::size_t i = 0; i < dofs_; ++i) {
      const auto x = node_coordinate(i);
      u[static_cast<Eigen::Index>(i)] = fn(x[0], x[1]);
    }
    return u;
  }

 private:
  friend Grid build_grid(const GridSpec& spec);
  GridSpec spec_{};
  std::array<double, 2> spacing_{1.0, 1.0};
  std::size_t dofs_ = 0;
  std::size_t cells_ = 0;
  double cell_volume_ = 0.0;
};

/// Validates the spec; ConfigError on dim outside {1,2}, zero interior count
/// or nonpositive extent.
Grid build_grid(const GridSpec& spec);

/// Per-cell gradient components; gy is empty in 1D.
struct CellGradients {
  std::vector<double> gx;
  std::vector<double> gy;
};

CellGradients gradient_field(const Grid& grid, const Field& u);

/// Per-cell corner averages.
std::vector<double> cell_averages(const Grid& grid, const Field& u);

/// Midpoint quadrature: sum of value * cell volume.
double integrate(const Grid& grid, std::span<const double> cell_values);

/// Gram matrix of the base-point dependent scalar product
///   <v,w>_u = int (1+|grad u|^2)^(p-1) <grad v, grad w>
///           + 2(p-1) int (1+|grad u|^2)^(p-2) <grad u, grad v><grad u, grad w>.
struct GramMatrix {
  SparseMatrix matrix;
  Field base;
  double p = 1.0;
};

/// ConfigError unless p > dim/2.
GramMatrix gram_matrix(const Grid& grid, const Field& base, double p);

/// Gram matrix at the zero field: the p-independent stiffness matrix of -Laplace.
SparseMatrix stiffness_matrix(const Grid& grid);

/// sum_cells vol * coeff[c] * avg_i avg_j, the zeroth-order form with a per-cell weight.
SparseMatrix cell_mass_matrix(const Grid& grid, std::span<const double> coeff);

/// Throws ConfigError unless p > dim/2.
void check_exponent(const Grid& grid, double p);

}  // namespace morselab
