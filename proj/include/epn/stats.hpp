#pragma once

#include <cstdint>

namespace epn {

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
/// Series expansion for x < a + 1, continued fraction otherwise.
double regularized_gamma_lower(double a, double x);

/// CDF of the chi-squared distribution with df degrees of freedom.
double chi2_cdf(double x, unsigned df);

/// alpha-quantile of the chi-squared distribution with df >= 1 degrees of
/// freedom. Bisection on the regularized incomplete gamma, seeded by the
/// Wilson-Hilferty approximation. Relative error below 1e-9.
double chi2_quantile(unsigned df, double alpha);

/// Quantile of the standard normal distribution (Acklam's rational
/// approximation); only used to seed the chi-squared bracket.
double inverse_normal_cdf(double p);

}  // namespace epn
