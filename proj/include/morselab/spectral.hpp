#pragma once

// Morse index and nondegeneracy of a critical point from the symmetric-definite
// pencil A v = lambda B v, with A the second differential and B the Gram matrix
// of the base-point weighted scalar product. The pencil spectrum is the
// finite-dimensional picture of H = id + K: eigenvalue 1 where the G'' term
// vanishes, index = number of negative eigenvalues.

#include <Eigen/Dense>
#include <cstdint>
#include <json.hpp>

#include "morselab/functional.hpp"

namespace morselab {

struct SpectralData {
  Eigen::VectorXd eigenvalues;   ///< ascending
  Eigen::MatrixXd eigenvectors;  ///< columns, B-orthonormal
  Eigen::MatrixXd gram;          ///< B at the base point
  int index = 0;
  /// Negative eigenvalues of A alone; equals `index` by Sylvester's law of inertia.
  int sylvester_index = 0;
  double gap = 0.0;
  double mu_plus = 0.0;    ///< smallest eigenvalue above the tolerance (NaN if none)
  double tolerance = 0.0;  ///< absolute threshold used for index and gap
  bool nondegenerate = false;

  int dimension() const { return static_cast<int>(eigenvalues.size()); }
};

/// Full solution of the pencil at `base`. `relative_tol` is scaled by the
/// largest |eigenvalue|. NumericError if B is not SPD or the solver fails.
SpectralData analyze(const EnergyFunctional& f, const Field& base, double relative_tol = 1e-8);

/// {eigenvalues (first `max_eigenvalues`), index, gap, mu_plus, nondegenerate}
nlohmann::json to_json(const SpectralData& sd, int max_eigenvalues = 16);

/// L = (id, -id) on H^- (+) W: L x = x_- - x_W with x_- the B-orthogonal
/// projection onto the negative eigenspace.
class HyperbolicOperator {
 public:
  /// DegenerateError if sd is degenerate.
  explicit HyperbolicOperator(const SpectralData& sd);

  int dimension() const { return static_cast<int>(gram_.rows()); }
  int index() const { return static_cast<int>(negative_.cols()); }

  Field apply(const Field& x) const;
  Field project_negative(const Field& x) const;
  Eigen::MatrixXd matrix() const;
  /// Equals index - (dimension - index).
  double trace() const;

 private:
  Eigen::MatrixXd negative_;
  Eigen::MatrixXd gram_;
};

HyperbolicOperator build_hyperbolic(const SpectralData& sd);

struct LyapunovReport {
  int samples = 0;
  double radius = 0.0;
  /// max over samples of df(u+x)[Lx] / |x|_B^2
  double max_ratio = 0.0;
  int violations = 0;
  Field worst_offset;
  bool passed = false;
};

/// Samples x in the B-ball of the given radius and checks df(base + x)[L x] < 0.
LyapunovReport verify_linear_lyapunov(const EnergyFunctional& f, const Field& base,
                                      const SpectralData& sd, const HyperbolicOperator& L,
                                      double radius, int samples, std::uint64_t seed);

struct ConvexityReport {
  int samples = 0;
  double radius = 0.0;
  /// min of d2f(u)[v,v] / |v|_B^2 over v in W
  double min_ratio_w = 0.0;
  /// max of the same quotient over v in H^- (NaN when the index is 0)
  double max_ratio_negative = 0.0;
  bool passed = false;
};

ConvexityReport convexity_probe(const EnergyFunctional& f, const Field& base,
                                const SpectralData& sd, double radius, int samples,
                                std::uint64_t seed);

nlohmann::json to_json(const LyapunovReport& r);
nlohmann::json to_json(const ConvexityReport& r);

}  // namespace morselab
