#include "manyiv/optim.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace manyiv {

OptimResult brent_minimize(const std::function<double(double)>& f, double a,
                           double b, double tol, int max_iter) {
  const double gold = 0.3819660112501051;
  double x = a + gold * (b - a), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  int evals = 1;
  double d = 0.0, e = 0.0;

  for (int iter = 0; iter < max_iter; ++iter) {
    double m = 0.5 * (a + b);
    double tol1 = tol + 1e-12 * std::abs(x);
    double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) {
      OptimResult r;
      r.x = Eigen::VectorXd::Constant(1, x);
      r.value = fx;
      r.evaluations = evals;
      r.converged = true;
      return r;
    }
    bool parabolic = false;
    if (std::abs(e) > tol1) {
      // parabolic fit through (v, w, x)
      double r1 = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r1;
      q = 2.0 * (q - r1);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      double e_old = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) &&
          p < q * (b - x)) {
        d = p / q;
        double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
        parabolic = true;
      }
    }
    if (!parabolic) {
      e = (x < m) ? b - x : a - x;
      d = gold * e;
    }
    double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
    double fu = f(u);
    ++evals;
    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  OptimResult r;
  r.x = Eigen::VectorXd::Constant(1, x);
  r.value = fx;
  r.evaluations = evals;
  r.converged = false;
  return r;
}

OptimResult line_minimize(const std::function<double(double)>& f, double x0,
                          double step, double tol) {
  double lo = x0 - step, hi = x0 + step;
  double fmid = f(x0), flo = f(lo), fhi = f(hi);
  int evals = 3;
  // grow the bracket until the interior point is no worse than both ends
  for (int i = 0; i < 60 && (flo < fmid || fhi < fmid); ++i) {
    if (flo < fmid) {
      hi = x0; fhi = fmid;
      x0 = lo; fmid = flo;
      lo = x0 - (hi - x0) * 2.0;
      flo = f(lo);
    } else {
      lo = x0; flo = fmid;
      x0 = hi; fmid = fhi;
      hi = x0 + (x0 - lo) * 2.0;
      fhi = f(hi);
    }
    ++evals;
  }
  OptimResult r = brent_minimize(f, lo, hi, tol);
  r.evaluations += evals;
  if (fmid < r.value) {
    r.x = Eigen::VectorXd::Constant(1, x0);
    r.value = fmid;
  }
  return r;
}

OptimResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& x0, double scale, double ftol,
                        double xtol, int max_iter) {
  const int n = static_cast<int>(x0.size());
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i) {
    double h = scale * std::max(1.0, std::abs(x0[i]));
    pts[i + 1][i] += h;
  }
  for (int i = 0; i <= n; ++i) fv[i] = f(pts[i]);
  int evals = n + 1;

  std::vector<int> order(n + 1);
  auto sort_simplex = [&] {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fv[a] < fv[b]; });
  };

  OptimResult result;
  for (int iter = 0; iter < max_iter; ++iter) {
    sort_simplex();
    int best = order[0], worst = order[n], second = order[n - 1];
    double fspread = std::abs(fv[worst] - fv[best]);
    double fscale = std::abs(fv[best]) + std::abs(fv[worst]) + 1e-30;
    double xspread = 0.0;
    for (int i = 1; i <= n; ++i)
      xspread = std::max(xspread, (pts[order[i]] - pts[best]).norm());
    if (fspread <= ftol * fscale || xspread <= xtol) {
      result.x = pts[best];
      result.value = fv[best];
      result.evaluations = evals;
      result.converged = true;
      return result;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= n;

    Eigen::VectorXd xr = centroid + alpha * (centroid - pts[worst]);
    double fr = f(xr);
    ++evals;
    if (fr < fv[best]) {
      Eigen::VectorXd xe = centroid + gamma * (xr - centroid);
      double fe = f(xe);
      ++evals;
      if (fe < fr) { pts[worst] = xe; fv[worst] = fe; }
      else { pts[worst] = xr; fv[worst] = fr; }
    } else if (fr < fv[second]) {
      pts[worst] = xr; fv[worst] = fr;
    } else {
      Eigen::VectorXd xc = centroid + rho * (pts[worst] - centroid);
      double fc = f(xc);
      ++evals;
      if (fc < fv[worst]) {
        pts[worst] = xc; fv[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + sigma * (pts[i] - pts[best]);
          fv[i] = f(pts[i]);
          ++evals;
        }
      }
    }
  }
  sort_simplex();
  result.x = pts[order[0]];
  result.value = fv[order[0]];
  result.evaluations = evals;
  result.converged = false;
  return result;
}

}  // namespace manyiv
