#include "morselab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <random>

#include "morselab/error.hpp"

namespace morselab {

SpectralData analyze(const EnergyFunctional& f, const Field& base, double relative_tol) {
  if (!(relative_tol > 0.0)) throw ConfigError("spectral tolerance must be positive");
  f.grid().check_field(base);
  const Eigen::MatrixXd b = Eigen::MatrixXd(f.gram(base).matrix);
  const Eigen::MatrixXd a = Eigen::MatrixXd(f.hessian(base));

  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) throw NumericError("Gram matrix is not positive definite");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> pencil(
      a, b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (pencil.info() != Eigen::Success) {
    throw NumericError("generalized eigensolver did not converge (n = " +
                       std::to_string(a.rows()) + ")");
  }

  SpectralData sd;
  sd.eigenvalues = pencil.eigenvalues();
  sd.eigenvectors = pencil.eigenvectors();
  sd.gram = b;
  const double scale = sd.eigenvalues.cwiseAbs().maxCoeff();
  sd.tolerance = relative_tol * std::max(scale, std::numeric_limits<double>::min());
  sd.gap = sd.eigenvalues.cwiseAbs().minCoeff();
  sd.nondegenerate = sd.gap > sd.tolerance;
  sd.mu_plus = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
    const double lam = sd.eigenvalues[i];
    if (lam < -sd.tolerance) ++sd.index;
    if (lam > sd.tolerance && std::isnan(sd.mu_plus)) sd.mu_plus = lam;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> plain(a, Eigen::EigenvaluesOnly);
  if (plain.info() != Eigen::Success) throw NumericError("eigensolver failed on the Hessian");
  const auto& ev = plain.eigenvalues();
  const double plain_tol = relative_tol * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -plain_tol) ++sd.sylvester_index;
  }
  return sd;
}

namespace {

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const SpectralData& sd, int max_eigenvalues) {
  auto eig = nlohmann::json::array();
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(max_eigenvalues, sd.eigenvalues.size()); ++i) {
    eig.push_back(sd.eigenvalues[i]);
  }
  return {{"eigenvalues", eig},           {"index", sd.index},
          {"gap", sd.gap},                {"mu_plus", finite_or_null(sd.mu_plus)},
          {"tolerance", sd.tolerance},    {"nondegenerate", sd.nondegenerate},
          {"sylvester_index", sd.sylvester_index}};
}

HyperbolicOperator::HyperbolicOperator(const SpectralData& sd) : gram_(sd.gram) {
  if (!sd.nondegenerate) {
    throw DegenerateError("hyperbolic operator needs a nondegenerate critical point (gap " +
                          std::to_string(sd.gap) + " <= tol " + std::to_string(sd.tolerance) +
                          ")");
  }
  negative_ = sd.eigenvectors.leftCols(sd.index);
}

Field HyperbolicOperator::project_negative(const Field& x) const {
  if (negative_.cols() == 0) return Field::Zero(x.size());
  return negative_ * (negative_.transpose() * (gram_ * x));
}

Field HyperbolicOperator::apply(const Field& x) const { return 2.0 * project_negative(x) - x; }

Eigen::MatrixXd HyperbolicOperator::matrix() const {
  const auto n = gram_.rows();
  Eigen::MatrixXd l = -Eigen::MatrixXd::Identity(n, n);
  if (negative_.cols() > 0) l += 2.0 * negative_ * (negative_.transpose() * gram_);
  return l;
}

double HyperbolicOperator::trace() const { return matrix().trace(); }

HyperbolicOperator build_hyperbolic(const SpectralData& sd) { return HyperbolicOperator(sd); }

namespace {

// Point uniformly distributed in direction on the B-sphere (eigenvector
// coordinates are B-orthonormal), with radius uniform in (0, radius].
Field sample_ball(const SpectralData& sd, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd c(sd.dimension());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = normal(rng);
  const double r = radius * (1.0 - unit(rng));
  return sd.eigenvectors * (c * (r / c.norm()));
}

Field sample_span(const Eigen::MatrixXd& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd c(basis.cols());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = normal(rng);
  return basis * c;
}

}  // namespace

LyapunovReport verify_linear_lyapunov(const EnergyFunctional& f, const Field& base,
                                      const SpectralData& sd, const HyperbolicOperator& L,
                                      double radius, int samples, std::uint64_t seed) {
  if (!(radius > 0.0)) throw ConfigError("Lyapunov probe radius must be positive");
  std::mt19937_64 rng(seed);
  LyapunovReport r;
  r.samples = samples;
  r.radius = radius;
  r.max_ratio = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Field x = sample_ball(sd, radius, rng);
    const double nb2 = x.dot(sd.gram * x);
    const double val = f.gradient(base + x).dot(L.apply(x));
    const double ratio = val / nb2;
    if (!(val < 0.0)) ++r.violations;
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.worst_offset = x;
    }
  }
  r.passed = samples > 0 && r.violations == 0;
  return r;
}

ConvexityReport convexity_probe(const EnergyFunctional& f, const Field& base,
                                const SpectralData& sd, double radius, int samples,
                                std::uint64_t seed) {
  if (!sd.nondegenerate) throw DegenerateError("convexity probe needs a nondegenerate point");
  if (radius < 0.0) throw ConfigError("convexity probe radius must be >= 0");
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd negative = sd.eigenvectors.leftCols(sd.index);
  const Eigen::MatrixXd positive = sd.eigenvectors.rightCols(sd.dimension() - sd.index);
  ConvexityReport r;
  r.samples = samples;
  r.radius = radius;
  r.min_ratio_w = std::numeric_limits<double>::infinity();
  r.max_ratio_negative = sd.index > 0 ? -std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::quiet_NaN();
  for (int s = 0; s < samples; ++s) {
    const Field u = radius > 0.0 ? Field(base + sample_ball(sd, radius, rng)) : base;
    const SparseMatrix a = f.hessian(u);
    if (positive.cols() > 0) {
      const Field v = sample_span(positive, rng);
      r.min_ratio_w = std::min(r.min_ratio_w, v.dot(a * v) / v.dot(sd.gram * v));
    }
    if (negative.cols() > 0) {
      const Field v = sample_span(negative, rng);
      r.max_ratio_negative = std::max(r.max_ratio_negative, v.dot(a * v) / v.dot(sd.gram * v));
    }
  }
  const bool w_ok = positive.cols() == 0 || r.min_ratio_w > 0.0;
  const bool neg_ok = negative.cols() == 0 || r.max_ratio_negative < 0.0;
  r.passed = samples > 0 && w_ok && neg_ok;
  return r;
}

nlohmann::json to_json(const LyapunovReport& r) {
  return {{"samples", r.samples},
          {"radius", r.radius},
          {"max_ratio", finite_or_null(r.max_ratio)},
          {"violations", r.violations},
          {"passed", r.passed}};
}

nlohmann::json to_json(const ConvexityReport& r) {
  return {{"samples", r.samples},
          {"radius", r.radius},
          {"min_ratio_w", finite_or_null(r.min_ratio_w)},
          {"max_ratio_negative", finite_or_null(r.max_ratio_negative)},
          {"passed", r.passed}};
}

}  // namespace morselab
