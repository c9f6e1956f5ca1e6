#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "herdsim/errors.hpp"

namespace herdsim::stats {

inline double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Unbiased sample variance (n-1 divisor); 0 for fewer than two points.
inline double sample_variance(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) {
        const double d = x - m;
        s += d * d;
    }
    return s / static_cast<double>(n - 1);
}

inline double standard_error(std::span<const double> v) {
    if (v.size() < 2) return std::numeric_limits<double>::infinity();
    return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

namespace detail {

// log Gamma(x), Lanczos approximation.
inline double log_gamma(double x) {
    static const double c[6] = {76.18009172947146,    -86.50532032941677,
                                24.01409824083091,    -1.231739572450155,
                                0.1208650973866179e-2, -0.5395239384953e-5};
    double y = x;
    double tmp = x + 5.5;
    tmp -= (x + 0.5) * std::log(tmp);
    double ser = 1.000000000190015;
    for (double ci : c) ser += ci / ++y;
    return -tmp + std::log(2.5066282746310005 * ser / x);
}

// Regularized lower incomplete gamma P(a, x) by series expansion; x < a + 1.
inline double gamma_p_series(double a, double x) {
    if (x <= 0.0) return 0.0;
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction; x >= a + 1.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

} // namespace detail

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw ValidationError("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

// Survival function of the chi-square distribution with dof degrees of
// freedom: P(X > statistic).
inline double chi_square_sf(double statistic, std::size_t dof) {
    if (dof == 0) throw ValidationError("chi_square_sf: dof must be positive");
    if (statistic <= 0.0) return 1.0;
    return gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

// z for a two-sided 99% normal interval.
inline constexpr double kZ99 = 2.5758293035489004;

// Half-width of the Wilson score interval around the (adjusted) center.
inline double wilson_halfwidth(double p_hat, std::size_t n, double z = kZ99) {
    if (n == 0) return 1.0;
    const double nn = static_cast<double>(n);
    const double z2 = z * z;
    return (z / (1.0 + z2 / nn)) *
           std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn));
}

// Pearson chi-square goodness of fit of observed counts against expected
// counts. Bins with small expectation are pooled into the trailing bin to keep
// the statistic valid.
struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::size_t bins_used = 0;
};

inline ChiSquareResult chi_square_gof(std::span<const double> observed,
                                      std::span<const double> expected,
                                      double min_expected = 10.0) {
    if (observed.size() != expected.size() || observed.empty())
        throw DimensionMismatchError("chi_square_gof: count vectors disagree");
    double pool_obs = 0.0;
    double pool_exp = 0.0;
    double stat = 0.0;
    std::size_t bins = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] < min_expected) {
            pool_obs += observed[i];
            pool_exp += expected[i];
        } else {
            const double d = observed[i] - expected[i];
            stat += d * d / expected[i];
            ++bins;
        }
    }
    if (pool_exp > 0.0) {
        const double d = pool_obs - pool_exp;
        stat += d * d / pool_exp;
        ++bins;
    }
    ChiSquareResult r;
    r.statistic = stat;
    r.bins_used = bins;
    r.dof = bins > 1 ? bins - 1 : 1;
    r.p_value = chi_square_sf(stat, r.dof);
    return r;
}

} // namespace herdsim::stats
