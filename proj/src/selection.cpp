#include "manyiv/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "manyiv/dataset.hpp"
#include "manyiv/errors.hpp"

namespace manyiv {

std::vector<int> select_random(int k, const SelectionSpec& spec, Rng& rng) {
  if (spec.k_s > k)
    throw config_error("select_random: k_s=" + std::to_string(spec.k_s) +
                       " exceeds k=" + std::to_string(k));
  std::vector<int> pool(static_cast<std::size_t>(k));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < spec.k_s; ++i) {
    auto j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + spec.k_s);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// |corr| ranking per endogenous column; ties broken by the lower index.
std::vector<int> top_by_abs_correlation(const Vector& y, const Matrix& Z,
                                        int budget) {
  Vector yc = y.array() - y.mean();
  const double sy = yc.norm();
  if (!(sy > 0.0)) throw data_error("crude thresholding: endogenous column is constant");

  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(static_cast<std::size_t>(Z.cols()));
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    Vector zc = Z.col(j).array() - Z.col(j).mean();
    const double sz = zc.norm();
    if (!(sz > 0.0))
      throw data_error("crude thresholding: instrument column " +
                       std::to_string(j) + " has zero variance");
    ranked.emplace_back(std::abs(yc.dot(zc)) / (sy * sz), static_cast<int>(j));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int> out;
  for (int i = 0; i < budget && i < static_cast<int>(ranked.size()); ++i)
    out.push_back(ranked[static_cast<std::size_t>(i)].second);
  return out;
}

}  // namespace

std::vector<int> select_crude_threshold(const Matrix& Y, const Matrix& Z,
                                        const SelectionSpec& spec) {
  const int p1 = static_cast<int>(Y.cols());
  if (p1 < 1) throw config_error("select_crude_threshold: no endogenous columns");
  const int budget = spec.k_s / p1;
  if (budget < 1)
    throw config_error("select_crude_threshold: k_s too small for p1");
  std::set<int> chosen;
  for (Eigen::Index r = 0; r < p1; ++r) {
    auto top = top_by_abs_correlation(Y.col(r), Z, budget);
    chosen.insert(top.begin(), top.end());
  }
  return {chosen.begin(), chosen.end()};
}

LassoFit lasso_fit(const Vector& y, const Matrix& Z, double lambda,
                   const Vector* warm_start) {
  const auto T = y.size();
  const auto k = Z.cols();
  if (Z.rows() != T) throw config_error("lasso_fit: dimension mismatch");
  if (lambda < 0.0) throw config_error("lasso_fit: negative penalty");

  Vector col_sq(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    col_sq[j] = Z.col(j).squaredNorm();
    if (!(col_sq[j] > 0.0))
      throw data_error("lasso_fit: column " + std::to_string(j) + " is zero");
  }

  LassoFit fit;
  fit.penalty = lambda;
  fit.coefficients =
      warm_start && warm_start->size() == k ? *warm_start : Vector::Zero(k);
  Vector resid = y - Z * fit.coefficients;

  const double half = 0.5 * lambda;
  const int max_sweeps = 10000;
  double max_delta = 0.0;
  for (fit.sweeps = 0; fit.sweeps < max_sweeps; ++fit.sweeps) {
    max_delta = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double old = fit.coefficients[j];
      const double rho = Z.col(j).dot(resid) + col_sq[j] * old;
      double next = 0.0;
      if (rho > half) next = (rho - half) / col_sq[j];
      else if (rho < -half) next = (rho + half) / col_sq[j];
      if (next != old) {
        resid += Z.col(j) * (old - next);
        fit.coefficients[j] = next;
        max_delta = std::max(max_delta, std::abs(next - old));
      }
    }
    if (max_delta < 1e-11) break;
  }
  if (max_delta > 1e-9)
    throw convergence_error("lasso_fit: coordinate descent still moving " +
                            std::to_string(max_delta) + " after " +
                            std::to_string(fit.sweeps) + " sweeps");

  for (Eigen::Index j = 0; j < k; ++j)
    if (fit.coefficients[j] != 0.0) fit.active_set.push_back(static_cast<int>(j));
  return fit;
}

std::pair<std::vector<int>, LassoFit> lasso_path_select(const Vector& y_r,
                                                        const Matrix& Z,
                                                        int budget) {
  const auto T = y_r.size();
  const auto k = Z.cols();
  if (budget < 1) throw config_error("lasso_path_select: budget must be >= 1");
  if (budget > std::min<Eigen::Index>(T, k))
    throw config_error("lasso_path_select: budget exceeds min(T, k)");

  // comparable penalties across columns require standardized data
  Vector y = y_r.array() - y_r.mean();
  const double sy = std::sqrt(y.squaredNorm() / double(T));
  if (!(sy > 0.0)) throw data_error("lasso_path_select: constant response");
  y /= sy;
  Matrix Zs = standardize_columns(Z).values;

  const double lambda_max = 2.0 * (Zs.transpose() * y).cwiseAbs().maxCoeff();
  const int grid_points = 100;
  const double ratio = 1e-3;

  LassoFit fit;
  Vector warm = Vector::Zero(k);
  for (int i = 0; i < grid_points; ++i) {
    const double lambda =
        lambda_max * std::pow(ratio, double(i) / double(grid_points - 1));
    fit = lasso_fit(y, Zs, lambda, &warm);
    warm = fit.coefficients;
    if (static_cast<int>(fit.active_set.size()) >= budget) break;
  }

  std::vector<int> active = fit.active_set;
  if (static_cast<int>(active.size()) > budget) {
    // path jumped past the target: keep the largest-|coefficient| entries
    std::sort(active.begin(), active.end(), [&](int a, int b) {
      double fa = std::abs(fit.coefficients[a]);
      double fb = std::abs(fit.coefficients[b]);
      if (fa != fb) return fa > fb;
      return a < b;
    });
    active.resize(static_cast<std::size_t>(budget));
    std::sort(active.begin(), active.end());
  }
  return {active, fit};
}

std::vector<int> select_lasso(const Matrix& Y, const Matrix& Z,
                              const SelectionSpec& spec) {
  const int p1 = static_cast<int>(Y.cols());
  if (p1 < 1) throw config_error("select_lasso: no endogenous columns");
  const int budget = spec.k_s / p1;
  if (budget < 1) throw config_error("select_lasso: k_s too small for p1");
  std::set<int> chosen;
  for (Eigen::Index r = 0; r < p1; ++r) {
    auto [active, fit] = lasso_path_select(Y.col(r), Z, budget);
    chosen.insert(active.begin(), active.end());
  }
  return {chosen.begin(), chosen.end()};
}

std::vector<int> select_instruments(const Matrix& Y, const Matrix& Z,
                                    const SelectionSpec& spec, Rng& rng) {
  switch (spec.method) {
    case SelectionMethod::Random:
      return select_random(static_cast<int>(Z.cols()), spec, rng);
    case SelectionMethod::CrudeThreshold:
      return select_crude_threshold(Y, Z, spec);
    case SelectionMethod::Lasso:
      return select_lasso(Y, Z, spec);
  }
  throw config_error("unknown selection method");
}

}  // namespace manyiv
