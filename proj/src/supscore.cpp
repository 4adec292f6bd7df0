#include "manyiv/supscore.hpp"

#include <algorithm>
#include <cmath>

#include "manyiv/errors.hpp"
#include "manyiv/parallel.hpp"

namespace manyiv {

std::pair<double, int> sup_score_statistic(const Matrix& Z, const Vector& eps0) {
  if (Z.rows() != eps0.size())
    throw config_error("sup_score_statistic: dimension mismatch");
  if (Z.cols() < 1) throw config_error("sup_score_statistic: no instruments");
  const double root_t = std::sqrt(double(Z.rows()));
  Vector scores = (Z.transpose() * eps0) / root_t;
  int argmax = 0;
  double best = scores.cwiseAbs().maxCoeff(&argmax);  // first max wins ties
  return {best, argmax};
}

Matrix block_sums(const Matrix& Z, const Vector& eps0, int block_length) {
  const auto T = Z.rows();
  if (block_length < 1 || block_length > T)
    throw config_error("block_sums: block length must be in [1, T]");
  const auto l_T = T / block_length;

  Matrix products = Z.array().colwise() * eps0.array();  // T x k
  Eigen::RowVectorXd mean = products.colwise().mean();

  Matrix A(l_T, Z.cols());
  for (Eigen::Index t = 0; t < l_T; ++t)
    A.row(t) =
        products.middleRows(t * block_length, block_length).colwise().sum() -
        mean;
  return A;
}

double bootstrap_critical_value(const Matrix& A, Eigen::Index T, double alpha,
                                int B, const Rng& rng, int workers,
                                std::vector<double>* draws) {
  if (B < 1) throw config_error("bootstrap_critical_value: B must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw config_error("bootstrap_critical_value: alpha must be in (0, 1)");
  const auto l_T = A.rows();
  const double root_t = std::sqrt(double(T));

  std::vector<double> values(static_cast<std::size_t>(B));
  parallel_for(static_cast<std::size_t>(B), workers, [&](std::size_t b) {
    Rng local = rng.derive(b);
    Vector e(l_T);
    for (Eigen::Index t = 0; t < l_T; ++t) e[t] = local.normal();
    values[b] = (A.transpose() * e).cwiseAbs().maxCoeff() / root_t;
  });
  if (draws) *draws = values;

  // order statistic ceil((1-alpha)B), guarded against FP noise at integers
  int index = static_cast<int>(std::ceil((1.0 - alpha) * B - 1e-9));
  index = std::clamp(index, 1, B);
  std::nth_element(values.begin(), values.begin() + (index - 1), values.end());
  return values[static_cast<std::size_t>(index - 1)];
}

SupScoreOutcome sup_score_test(const EstimationProblem& problem,
                               const Vector& theta0,
                               const SupScoreConfig& config) {
  if (!problem.partialled && problem.p2() > 0)
    throw config_error(
        "sup_score_test: exogenous covariates must be partialled out first");
  if (theta0.size() != problem.p1())
    throw config_error("sup_score_test: theta0 size mismatch");
  if (config.block_length >= problem.T())
    throw config_error("sup_score_test: block length must be below T");

  Vector eps0 = problem.y - problem.Y * theta0;

  SupScoreOutcome out;
  out.alpha = config.alpha;
  auto [stat, argmax] = sup_score_statistic(problem.Z, eps0);
  out.statistic = stat;
  out.argmax_index = argmax;
  out.argmax_label =
      argmax < static_cast<int>(problem.labels.size())
          ? problem.labels[static_cast<std::size_t>(argmax)]
          : "col" + std::to_string(argmax);

  Matrix A = block_sums(problem.Z, eps0, config.block_length);
  out.critical_value = bootstrap_critical_value(
      A, problem.T(), config.alpha, config.bootstrap_draws,
      Rng(config.rng_seed), config.workers,
      config.retain_draws ? &out.bootstrap_draws : nullptr);
  out.reject = out.statistic > out.critical_value;
  return out;
}

}  // namespace manyiv
