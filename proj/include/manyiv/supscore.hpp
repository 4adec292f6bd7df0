#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manyiv/rng.hpp"
#include "manyiv/types.hpp"

namespace manyiv {

struct SupScoreConfig {
  int block_length = 4;      // b_T
  int bootstrap_draws = 500; // B
  double alpha = 0.10;
  std::uint64_t rng_seed = 0;
  int workers = 1;
  bool retain_draws = false;
};

struct SupScoreOutcome {
  double statistic = 0.0;       // R = max_j |T^{-1/2} Z_j' eps0|
  double critical_value = 0.0;  // c(alpha) from the block multiplier bootstrap
  bool reject = false;
  double alpha = 0.0;
  int argmax_index = -1;
  std::string argmax_label;
  std::vector<double> bootstrap_draws;  // retained only on request
};

// max_j |T^{-1/2} Z_j' eps0| with ties broken by the lowest column index.
std::pair<double, int> sup_score_statistic(const Matrix& Z, const Vector& eps0);

// Block sums of the moment products: for t = 1..floor(T/b_T),
//   A_tj = sum over block t of Z_lj*eps0_l  -  mean over all T of Z_tj*eps0_t.
// Observations past the last full block enter only through the mean.
Matrix block_sums(const Matrix& Z, const Vector& eps0, int block_length);

// (1-alpha) empirical quantile (order statistic ceil((1-alpha)B), 1-based) of
//   L_A^(b) = max_j T^{-1/2} |sum_t A_tj e_t|,  e ~ N(0, I_{l_T}) i.i.d.
// One derived RNG substream per replicate, so any worker count gives the
// same draws. T is the original sample size behind A.
double bootstrap_critical_value(const Matrix& A, Eigen::Index T, double alpha,
                                int B, const Rng& rng, int workers = 1,
                                std::vector<double>* draws = nullptr);

// Full decision rule: reject iff R > c(alpha). The problem must already be
// partialled (exogenous covariates removed) with standardized instruments.
SupScoreOutcome sup_score_test(const EstimationProblem& problem,
                               const Vector& theta0,
                               const SupScoreConfig& config);

}  // namespace manyiv
