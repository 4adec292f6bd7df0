#pragma once

namespace manyiv {

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double regularized_gamma_p(double a, double x);

// CDF of a chi-squared variable with df degrees of freedom.
double chi_square_cdf(double x, int df);

// Inverse CDF by bracketing inversion, absolute tolerance 1e-8.
double chi_square_quantile(int df, double p);

}  // namespace manyiv
