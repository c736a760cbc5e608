#include "epn/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace epn {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 500;

// Lower regularized gamma via its power series, for x < a + 1.
double gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma via Lentz's continued fraction, for x >= a + 1.
double gamma_cont_fraction(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_lower(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("gamma shape must be positive");
    if (x < 0.0) throw std::invalid_argument("gamma argument must be non-negative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_cont_fraction(a, x);
}

double chi2_cdf(double x, unsigned df) {
    if (df == 0) throw std::invalid_argument("chi-squared needs df >= 1");
    if (x <= 0.0) return 0.0;
    return regularized_gamma_lower(0.5 * df, 0.5 * x);
}

double inverse_normal_cdf(double p) {
    if (p <= 0.0 || p >= 1.0)
        throw std::invalid_argument("normal quantile needs p in (0,1)");
    // Acklam's approximation, |relative error| < 1.2e-9.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double chi2_quantile(unsigned df, double alpha) {
    if (df == 0) throw std::invalid_argument("chi-squared quantile needs df >= 1");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("alpha must be in (0,1)");

    // Wilson-Hilferty seed, then widen to a guaranteed bracket.
    const double z = inverse_normal_cdf(alpha);
    const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    double seed = df * t * t * t;
    if (!(seed > 0.0) || !std::isfinite(seed)) seed = double(df);

    double lo = 0.0;
    double hi = std::max(seed * 2.0, 1.0);
    while (chi2_cdf(hi, df) < alpha) {
        hi *= 2.0;
        if (hi > 1e12) break;
    }

    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(mid, df) < alpha)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace epn
