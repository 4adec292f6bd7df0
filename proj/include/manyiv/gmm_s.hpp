#pragma once

#include <vector>

#include "manyiv/types.hpp"

namespace manyiv {

struct SStatConfig {
  int hac_lag = 4;
  double alpha = 0.10;
  // Exogenous coefficients to concentrate out, matched against x_labels.
  // Ignored on partialled problems. Empty list = no concentration.
  std::vector<std::string> concentrate;
  double optimizer_tol = 1e-8;
  bool centered_hac = true;
  // Search rectangle for the robust overidentification minimum over
  // theta = (lambda, gamma_f); matches the default inversion grid.
  double theta1_min = -0.5, theta1_max = 1.0;   // lambda
  double theta2_min = -0.5, theta2_max = 1.5;   // gamma_f
  int coarse_points = 7;
};

// Continuously updated GMM objective at theta0 (Stock-Wright S):
//   S = T * epsbar' W epsbar,  epsbar = T^{-1} Z_s' eps0,
//   W = [Newey-West covariance of {Z_st * eps0_t}]^{-1}.
// The weight is inverted by symmetric eigendecomposition with eigenvalue
// floor 1e-12 * lambda_max; a below-floor eigenvalue raises
// singular_weight_error (with the condition number) rather than ridging.
double s_statistic(const Matrix& Zs, const Vector& eps0,
                   const SStatConfig& config);

// eps0 = y - Y*theta0 on the (possibly partialled) problem, restricted to the
// selected instrument columns.
double s_statistic(const EstimationProblem& problem,
                   const std::vector<int>& selected, const Vector& theta0,
                   const SStatConfig& config);

struct ConcentratedS {
  double value = 0.0;
  Vector beta;       // minimizing exogenous coefficients (may be empty)
  int evaluations = 0;
  Eigen::Index moment_count = 0;      // instrument columns used
  Eigen::Index concentrated_count = 0;
};

// min over beta of S(theta0, beta) where the concentrated X columns join the
// instrument set. The CUE weight is re-inverted at every beta. Initialized at
// the least-squares plug-in, then Brent (one coefficient) or Nelder-Mead.
ConcentratedS concentrated_s(const EstimationProblem& problem,
                             const std::vector<int>& selected,
                             const Vector& theta0, const SStatConfig& config);

// S test of H0: theta = theta0 against chi2(k_s), k_s the full moment count
// (selected instruments plus concentrated exogenous columns). Concentration
// is not credited back in the reference distribution, which keeps the test
// conservative.
TestResult s_test(const EstimationProblem& problem,
                  const std::vector<int>& selected, const Vector& theta0,
                  const SStatConfig& config);

// Weak-identification robust Hansen test: min of S over theta inside the
// configured rectangle (concentrated beta free), compared to the
// chi2(k_s - p2) quantile.
TestResult robust_overid(const EstimationProblem& problem,
                         const std::vector<int>& selected,
                         const SStatConfig& config);

}  // namespace manyiv
