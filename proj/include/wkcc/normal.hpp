#ifndef WKCC_NORMAL_HPP
#define WKCC_NORMAL_HPP

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wkcc/error.hpp"

namespace wkcc {

inline double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

inline double normal_pdf(double z)
{
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// Inverse standard normal cdf: Acklam's rational approximation (relative
/// error about 1e-9) refined by one Halley step on erfc.
inline double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0)
            return -INFINITY;
        if (p == 1.0)
            return INFINITY;
        fail(ErrorCode::DomainError, "normal quantile level must lie in [0, 1]");
    }
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley step.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

namespace detail {

inline void check_truncation(double mean, double sd, double lo, double hi)
{
    if (!(lo < hi) || !(sd > 0.0) || !std::isfinite(mean) || !std::isfinite(sd))
        fail(ErrorCode::DomainError, "truncated normal needs lo < hi and sd > 0");
}

}  // namespace detail

/// cdf of N(mean, sd^2) truncated to [lo, hi].
inline double truncated_normal_cdf(double x, double mean, double sd, double lo, double hi)
{
    detail::check_truncation(mean, sd, lo, hi);
    if (x <= lo)
        return 0.0;
    if (x >= hi)
        return 1.0;
    const double fa = normal_cdf((lo - mean) / sd);
    const double fb = normal_cdf((hi - mean) / sd);
    return (normal_cdf((x - mean) / sd) - fa) / (fb - fa);
}

/// Quantile of N(mean, sd^2) truncated to [lo, hi].
inline double truncated_normal_quantile(double u, double mean, double sd, double lo, double hi)
{
    detail::check_truncation(mean, sd, lo, hi);
    if (!(u >= 0.0 && u <= 1.0))
        fail(ErrorCode::DomainError, "quantile level must lie in [0, 1]");
    const double fa = normal_cdf((lo - mean) / sd);
    const double fb = normal_cdf((hi - mean) / sd);
    if (!(fb > fa))
        fail(ErrorCode::DomainError, "truncation interval has zero normal mass");
    const double x = mean + sd * normal_quantile(fa + u * (fb - fa));
    return std::clamp(x, lo, hi);
}

}  // namespace wkcc

#endif  // WKCC_NORMAL_HPP
