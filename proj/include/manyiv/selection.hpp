#pragma once

#include <cstdint>
#include <vector>

#include "manyiv/rng.hpp"
#include "manyiv/types.hpp"

namespace manyiv {

enum class SelectionMethod { Random, CrudeThreshold, Lasso };

struct SelectionSpec {
  SelectionMethod method = SelectionMethod::Random;
  int k_s = 4;  // target count; per-endogenous budget is floor(k_s / p1)
  std::uint64_t rng_seed = 0;
};

// k_s indices drawn uniformly without replacement, sorted ascending.
std::vector<int> select_random(int k, const SelectionSpec& spec, Rng& rng);

// Per endogenous column: rank instruments by |corr(Y_r, Z_j)| descending and
// keep the top floor(k_s/p1). Returns the sorted union, which may fall short
// of k_s when the per-column sets overlap.
std::vector<int> select_crude_threshold(const Matrix& Y, const Matrix& Z,
                                        const SelectionSpec& spec);

struct LassoFit {
  Vector coefficients;          // k, on standardized data
  double penalty = 0.0;         // Lambda_r in the sum-of-squares + L|z| form
  std::vector<int> active_set;  // indices of nonzero coefficients
  int sweeps = 0;
};

// Single LASSO solve at a fixed penalty (coordinate descent on standardized
// y and Z): min_z  sum_t (y_t - z'Z_t)^2 + Lambda * |z|_1.
LassoFit lasso_fit(const Vector& y, const Matrix& Z, double lambda,
                   const Vector* warm_start = nullptr);

// Walks a geometric penalty path from Lambda_max = 2*max_j |Z_j'y| downward
// (100 points, ratio 1e-3) and returns the active set at the first point with
// at least `budget` members, truncated to the budget largest-|coefficient|
// entries if the path jumps past it.
std::pair<std::vector<int>, LassoFit> lasso_path_select(const Vector& y_r,
                                                        const Matrix& Z,
                                                        int budget);

// Union of the per-endogenous-column lasso_path_select active sets.
std::vector<int> select_lasso(const Matrix& Y, const Matrix& Z,
                              const SelectionSpec& spec);

// Dispatch on spec.method.
std::vector<int> select_instruments(const Matrix& Y, const Matrix& Z,
                                    const SelectionSpec& spec, Rng& rng);

}  // namespace manyiv
