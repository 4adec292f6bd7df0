#include "manyiv/gmm_s.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "manyiv/chi_square.hpp"
#include "manyiv/errors.hpp"
#include "manyiv/hac.hpp"
#include "manyiv/optim.hpp"

namespace manyiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix select_columns(const Matrix& Z, const std::vector<int>& selected) {
  Matrix out(Z.rows(), static_cast<Eigen::Index>(selected.size()));
  for (std::size_t j = 0; j < selected.size(); ++j) {
    int idx = selected[j];
    if (idx < 0 || idx >= Z.cols())
      throw config_error("selected instrument index " + std::to_string(idx) +
                         " out of range [0, " + std::to_string(Z.cols()) + ")");
    out.col(static_cast<Eigen::Index>(j)) = Z.col(idx);
  }
  return out;
}

// X columns to concentrate out; empty on partialled problems.
std::vector<int> concentrated_columns(const EstimationProblem& problem,
                                      const SStatConfig& config) {
  std::vector<int> cols;
  if (problem.partialled || config.concentrate.empty()) return cols;
  for (const auto& name : config.concentrate) {
    auto it = std::find(problem.x_labels.begin(), problem.x_labels.end(), name);
    if (it == problem.x_labels.end())
      throw config_error("concentrate: no exogenous column named '" + name + "'");
    cols.push_back(static_cast<int>(it - problem.x_labels.begin()));
  }
  return cols;
}

double s_core_or_inf(const Matrix& Zs, const Vector& eps0,
                     const SStatConfig& config) {
  try {
    return s_statistic(Zs, eps0, config);
  } catch (const singular_weight_error&) {
    return kInf;
  }
}

}  // namespace

double s_statistic(const Matrix& Zs, const Vector& eps0,
                   const SStatConfig& config) {
  const auto T = eps0.size();
  if (Zs.rows() != T) throw config_error("s_statistic: dimension mismatch");
  if (Zs.cols() < 1) throw config_error("s_statistic: no instruments");

  Matrix moments = Zs.array().colwise() * eps0.array();
  Vector epsbar = moments.colwise().mean();
  Matrix S = hac_covariance({moments, config.hac_lag}, config.centered_hac);

  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  const Vector& lambda = es.eigenvalues();  // ascending
  const double lmax = lambda(lambda.size() - 1);
  const double floor = 1e-12 * lmax;
  if (!(lambda(0) > floor)) {
    const double cond =
        lambda(0) > 0.0 ? lmax / lambda(0) : std::numeric_limits<double>::infinity();
    std::ostringstream msg;
    msg << "near-singular weight matrix: min eigenvalue " << lambda(0)
        << ", condition number " << cond;
    throw singular_weight_error(msg.str());
  }
  Vector u = es.eigenvectors().transpose() * epsbar;
  return double(T) * (u.array().square() / lambda.array()).sum();
}

double s_statistic(const EstimationProblem& problem,
                   const std::vector<int>& selected, const Vector& theta0,
                   const SStatConfig& config) {
  if (theta0.size() != problem.p1())
    throw config_error("theta0 size does not match the endogenous count");
  Vector eps0 = problem.y - problem.Y * theta0;
  return s_statistic(select_columns(problem.Z, selected), eps0, config);
}

ConcentratedS concentrated_s(const EstimationProblem& problem,
                             const std::vector<int>& selected,
                             const Vector& theta0, const SStatConfig& config) {
  ConcentratedS out;
  const auto conc = concentrated_columns(problem, config);
  if (conc.empty()) {
    out.value = s_statistic(problem, selected, theta0, config);
    out.moment_count = static_cast<Eigen::Index>(selected.size());
    out.evaluations = 1;
    return out;
  }
  if (theta0.size() != problem.p1())
    throw config_error("theta0 size does not match the endogenous count");

  const auto T = problem.T();
  const auto p2c = static_cast<Eigen::Index>(conc.size());
  Matrix Xc(T, p2c);
  for (Eigen::Index j = 0; j < p2c; ++j) Xc.col(j) = problem.X.col(conc[j]);

  Matrix Zfull(T, p2c + static_cast<Eigen::Index>(selected.size()));
  Zfull.leftCols(p2c) = Xc;
  Zfull.rightCols(static_cast<Eigen::Index>(selected.size())) =
      select_columns(problem.Z, selected);

  Vector r0 = problem.y - problem.Y * theta0;
  // least-squares plug-in start (X is its own instrument)
  Vector beta0 = Xc.colPivHouseholderQr().solve(r0);
  Vector resid0 = r0 - Xc * beta0;
  const double resid_scale = std::max(
      1e-8, std::sqrt(resid0.squaredNorm() / double(T)));
  Vector steps(p2c);
  for (Eigen::Index j = 0; j < p2c; ++j) {
    double rms = std::sqrt(Xc.col(j).squaredNorm() / double(T));
    steps[j] = resid_scale / std::max(rms, 1e-8);
  }

  auto objective = [&](const Vector& beta) {
    return s_core_or_inf(Zfull, r0 - Xc * beta, config);
  };

  OptimResult opt;
  if (p2c == 1) {
    opt = line_minimize([&](double b) { return objective(Vector::Constant(1, b)); },
                        beta0[0], steps[0], config.optimizer_tol);
  } else {
    // scale coordinates so the simplex explores each coefficient comparably
    auto scaled = [&](const Vector& u) {
      return objective(beta0 + steps.cwiseProduct(u));
    };
    opt = nelder_mead(scaled, Vector::Zero(p2c), 1.0, config.optimizer_tol,
                      1e-10, 6000);
    opt.x = beta0 + steps.cwiseProduct(opt.x);
  }
  if (!opt.converged) {
    std::ostringstream msg;
    msg << "concentrated_s did not converge after " << opt.evaluations
        << " evaluations (best value " << opt.value << ")";
    throw convergence_error(msg.str());
  }
  if (!std::isfinite(opt.value))
    throw singular_weight_error(
        "concentrated_s: weight matrix singular at the minimizer");

  out.value = opt.value;
  out.beta = opt.x;
  out.evaluations = opt.evaluations;
  out.moment_count = Zfull.cols();
  out.concentrated_count = p2c;
  return out;
}

TestResult s_test(const EstimationProblem& problem,
                  const std::vector<int>& selected, const Vector& theta0,
                  const SStatConfig& config) {
  auto conc = concentrated_s(problem, selected, theta0, config);
  // reference distribution is chi2 over the full moment count; concentrated
  // coefficients are not credited back, which keeps the test conservative
  const int df = static_cast<int>(conc.moment_count);
  if (df < 1)
    throw config_error("s_test: no moment conditions");
  TestResult result;
  result.statistic = conc.value;
  result.critical_value = chi_square_quantile(df, 1.0 - config.alpha);
  result.reject = result.statistic > result.critical_value;
  result.alpha = config.alpha;
  result.method = "s:chi2(" + std::to_string(df) + ")";
  for (Eigen::Index j = 0; j < conc.beta.size(); ++j)
    result.extras["beta_" + config.concentrate[static_cast<std::size_t>(j)]] =
        conc.beta[j];
  return result;
}

TestResult robust_overid(const EstimationProblem& problem,
                         const std::vector<int>& selected,
                         const SStatConfig& config) {
  const auto conc_cols = concentrated_columns(problem, config);
  const auto p1 = problem.p1();
  const auto p2c = static_cast<Eigen::Index>(conc_cols.size());
  const auto T = problem.T();
  const auto n_sel = static_cast<Eigen::Index>(selected.size());
  // moment count is p2c + n_sel, so k_s - p2 reduces to the selected count
  const int df = static_cast<int>(n_sel);
  if (df < 1) throw config_error("robust_overid: k_s must exceed p2");

  Matrix Xc(T, p2c);
  for (Eigen::Index j = 0; j < p2c; ++j) Xc.col(j) = problem.X.col(conc_cols[j]);
  Matrix Zsel = select_columns(problem.Z, selected);
  Matrix Zfull(T, p2c + n_sel);
  Zfull.leftCols(p2c) = Xc;
  Zfull.rightCols(n_sel) = Zsel;

  // the search for the minimum stays inside the hypothesis rectangle; an
  // unconstrained minimum under endogenous selection drifts to spurious
  // far-off zeros and defeats the overidentification gate
  const bool boxed = (p1 == 2);
  auto inside = [&](const Vector& v) {
    if (!boxed) return true;
    return v[0] >= config.theta1_min && v[0] <= config.theta1_max &&
           v[1] >= config.theta2_min && v[1] <= config.theta2_max;
  };
  auto objective = [&](const Vector& v) {
    if (!inside(v)) return kInf;
    Vector eps = problem.y - problem.Y * v.head(p1);
    if (p2c > 0) eps -= Xc * v.tail(p2c);
    return s_core_or_inf(Zfull, eps, config);
  };
  auto plug_beta = [&](Vector& v) {
    if (p2c == 0) return;
    Vector r = problem.y - problem.Y * v.head(p1);
    v.tail(p2c) = Xc.colPivHouseholderQr().solve(r);
  };

  std::vector<Vector> starts;
  double best = kInf;
  Vector best_v = Vector::Zero(p1 + p2c);
  if (boxed) {
    // coarse sweep of the rectangle with the least-squares beta plug-in
    const int n = std::max(config.coarse_points, 2);
    double second = kInf;
    Vector cand2;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Vector v = Vector::Zero(p1 + p2c);
        v[0] = config.theta1_min +
               (config.theta1_max - config.theta1_min) * i / double(n - 1);
        v[1] = config.theta2_min +
               (config.theta2_max - config.theta2_min) * j / double(n - 1);
        plug_beta(v);
        double f = objective(v);
        if (f < best) {
          second = best; cand2 = best_v;
          best = f; best_v = v;
        } else if (f < second) {
          second = f; cand2 = v;
        }
      }
    }
    starts.push_back(best_v);
    if (cand2.size()) starts.push_back(cand2);
  } else {
    // no rectangle for other endogenous layouts; multistart from the
    // least-squares plug-in at theta = 0
    Vector v = Vector::Zero(p1 + p2c);
    plug_beta(v);
    starts.push_back(v);
  }
  // 2SLS start when it falls inside the search region
  {
    Matrix R(T, p1 + p2c);
    R.leftCols(p1) = problem.Y;
    if (p2c > 0) R.rightCols(p2c) = Xc;
    Matrix fitted = Zfull * Zfull.colPivHouseholderQr().solve(R);
    Vector coef = fitted.colPivHouseholderQr().solve(problem.y);
    if (coef.allFinite() && inside(coef)) starts.push_back(coef);
  }

  int evals = 0;
  for (const auto& s0 : starts) {
    OptimResult opt = nelder_mead(objective, s0, 0.1, 1e-9, 1e-9, 6000);
    evals += opt.evaluations;
    if (opt.value < best) {
      best = opt.value;
      best_v = opt.x;
    }
  }
  if (!std::isfinite(best))
    throw singular_weight_error("robust_overid: weight singular everywhere searched");

  TestResult result;
  result.statistic = best;
  result.critical_value = chi_square_quantile(df, 1.0 - config.alpha);
  result.reject = result.statistic > result.critical_value;
  result.alpha = config.alpha;
  result.method = "s-overid:chi2(" + std::to_string(df) + ")";
  for (Eigen::Index j = 0; j < p1; ++j)
    result.extras["theta_min_" + std::to_string(j)] = best_v[j];
  result.extras["evaluations"] = evals;
  return result;
}

}  // namespace manyiv
