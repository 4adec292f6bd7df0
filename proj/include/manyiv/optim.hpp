#pragma once

#include <Eigen/Dense>
#include <functional>

namespace manyiv {

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Brent minimization on [a, b]. `tol` is the absolute x tolerance.
OptimResult brent_minimize(const std::function<double(double)>& f, double a,
                           double b, double tol = 1e-10, int max_iter = 200);

// Expands a bracket around x0 until f(mid) <= min(f(lo), f(hi)) and then
// Brent-minimizes inside it. `step` is the initial half-width.
OptimResult line_minimize(const std::function<double(double)>& f, double x0,
                          double step, double tol = 1e-10);

// Nelder-Mead simplex minimization. `scale` sets the initial simplex edge
// length. Converges when the simplex f-spread falls below `ftol` (relative)
// or the simplex collapses below `xtol`.
OptimResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& x0, double scale = 0.1,
                        double ftol = 1e-10, double xtol = 1e-10,
                        int max_iter = 4000);

}  // namespace manyiv
