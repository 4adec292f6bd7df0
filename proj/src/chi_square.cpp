#include "manyiv/chi_square.hpp"

#include <cmath>
#include <limits>

#include "manyiv/errors.hpp"

namespace manyiv {

// Series expansion, reliable for x < a + 1.
static double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), reliable for x >= a + 1.
static double gamma_q_cf(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0) throw config_error("regularized_gamma_p: a must be positive");
  if (x < 0.0) throw config_error("regularized_gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double chi_square_cdf(double x, int df) {
  if (df < 1) throw config_error("chi_square_cdf: df must be >= 1");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi_square_quantile(int df, double p) {
  if (df < 1) throw config_error("chi_square_quantile: df must be >= 1");
  if (!(p > 0.0 && p < 1.0))
    throw config_error("chi_square_quantile: p must be in (0, 1)");

  double lo = 0.0;
  double hi = df + 10.0;
  while (chi_square_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (chi_square_cdf(mid, df) < p) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-12 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace manyiv
