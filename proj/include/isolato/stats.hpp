#pragma once

// Uncertainty quantification for the property and acceptance suites:
// binomial estimates with Wilson intervals, Pearson chi-square tests, and
// the delta-method standard error of the correlation estimator.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "isolato/counts.hpp"

namespace isolato {

namespace detail {

inline constexpr double kGammaRelTol = 1e-12;
inline constexpr int kGammaMaxIter = 10000;

// Regularized lower incomplete gamma P(a, x) by power series; valid for
// x < a + 1.
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kGammaMaxIter; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kGammaRelTol) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction;
// valid for x >= a + 1.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kGammaMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kGammaRelTol) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || !std::isfinite(x)) {
        throw std::invalid_argument("regularized_gamma_p: need a > 0 and x >= 0");
    }
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || !std::isfinite(x)) {
        throw std::invalid_argument("regularized_gamma_q: need a > 0 and x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

/// Survival function of the chi-square distribution with dof degrees of
/// freedom.
inline double chi_square_sf(double statistic, int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_sf: dof must be >= 1");
    return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

struct BinomialEstimate {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    double p_hat = 0.0;
    double standard_error = 0.0;
    double ci_low = 0.0;   // Wilson 95% interval
    double ci_high = 0.0;
};

inline constexpr double kZ95 = 1.9599639845400542;

inline BinomialEstimate binomial_estimate(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) throw std::invalid_argument("binomial_estimate: trials must be >= 1");
    if (successes > trials) throw std::invalid_argument("binomial_estimate: successes > trials");
    BinomialEstimate est;
    est.successes = successes;
    est.trials = trials;
    const double n = static_cast<double>(trials);
    est.p_hat = static_cast<double>(successes) / n;
    est.standard_error = std::sqrt(est.p_hat * (1.0 - est.p_hat) / n);
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double center = (est.p_hat + z2 / (2.0 * n)) / denom;
    const double half =
        kZ95 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / n + z2 / (4.0 * n * n)) / denom;
    est.ci_low = std::max(0.0, center - half);
    est.ci_high = std::min(1.0, center + half);
    return est;
}

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Pearson chi-square test of observed bin counts against expected bin
/// weights (any positive weights; normalized internally). Requires every
/// expected count to be at least 5.
inline ChiSquareResult chi_square_uniformity(const std::vector<std::uint64_t>& counts,
                                             const std::vector<double>& expected_weights) {
    if (counts.size() < 2 || counts.size() != expected_weights.size()) {
        throw std::invalid_argument("chi_square_uniformity: need >= 2 bins, matching sizes");
    }
    std::uint64_t total = 0;
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (!(expected_weights[i] > 0.0)) {
            throw std::invalid_argument("chi_square_uniformity: expected weights must be > 0");
        }
        total += counts[i];
        weight_sum += expected_weights[i];
    }
    ChiSquareResult result;
    result.dof = static_cast<int>(counts.size()) - 1;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expect = static_cast<double>(total) * expected_weights[i] / weight_sum;
        if (expect < 5.0) {
            throw std::invalid_argument("chi_square_uniformity: expected count below 5 in a bin");
        }
        const double diff = static_cast<double>(counts[i]) - expect;
        result.statistic += diff * diff / expect;
    }
    result.p_value = chi_square_sf(result.statistic, result.dof);
    return result;
}

/// Delta-method standard error of the correlation estimator. Outcomes are
/// +/-1 per coincidence (0 per rejected trial under kAllEmissions), so the
/// variance is 1 - E^2 resp. f - E^2 with f the coincidence fraction.
inline double correlation_stderr(const CountsTable& counts, Normalization normalization) {
    const std::uint64_t denom = normalization == Normalization::kCoincidenceOnly
                                    ? counts.coincidences()
                                    : counts.n_emitted;
    if (denom == 0) throw NoDataError("correlation_stderr: empty denominator");
    const double e = correlation(counts, normalization);
    const double second_moment =
        normalization == Normalization::kCoincidenceOnly
            ? 1.0
            : static_cast<double>(counts.coincidences()) / static_cast<double>(counts.n_emitted);
    const double variance = std::max(0.0, second_moment - e * e);
    return std::sqrt(variance / static_cast<double>(denom));
}

}  // namespace isolato
