#pragma once

#include <Eigen/SparseCholesky>
#include <memory>

#include "morselab/grid.hpp"

namespace morselab {

/// Stiffness (discrete H^1_0) inner product with a cached Cholesky factor.
/// Used for field distances and for dual norms of covectors.
class StiffnessMetric {
 public:
  explicit StiffnessMetric(const Grid& grid);

  const SparseMatrix& matrix() const { return stiffness_; }

  double inner(const Field& v, const Field& w) const;
  double norm(const Field& v) const;
  double distance(const Field& v, const Field& w) const;
  /// sqrt(g^T S^{-1} g): the norm of a covector in the dual of the stiffness norm.
  double dual_norm(const Field& covector) const;
  /// Riesz representative S^{-1} g.
  Field solve(const Field& covector) const;

 private:
  SparseMatrix stiffness_;
  Eigen::SimplicialLLT<SparseMatrix> chol_;
};

}  // namespace morselab
