#pragma once

// Analytic and quadrature ground truth used to validate the Monte Carlo
// estimates: closed-form joint probabilities, direct integration of the
// sigma densities over the outcome regions of the spin projections, the
// correlation E = -cos(theta_a - theta_b) that follows from them, and the
// prepared-vs-observed ensemble totals behind the pair-detection fraction.

#include <cmath>
#include <utility>
#include <vector>

#include "isolato/model.hpp"
#include "isolato/quadrature.hpp"

namespace isolato {

enum class JointOutcome { kPP, kPM, kMP, kMM };

enum class SigmaChoice { kSigma1, kSigma2 };

inline std::pair<Spin, Spin> outcome_spins(JointOutcome outcome) {
    switch (outcome) {
    case JointOutcome::kPP: return {Spin::kPlus, Spin::kPlus};
    case JointOutcome::kPM: return {Spin::kPlus, Spin::kMinus};
    case JointOutcome::kMP: return {Spin::kMinus, Spin::kPlus};
    default: return {Spin::kMinus, Spin::kMinus};
    }
}

/// Joint probability of a spin-sign pair for the singlet state:
/// equal signs (1/2) sin^2(delta/2), opposite signs (1/2) cos^2(delta/2).
inline double quantum_probability(JointOutcome outcome, double theta_a, double theta_b) {
    const double half_delta = 0.5 * (theta_a - theta_b);
    const auto [sa, sb] = outcome_spins(outcome);
    if (sa == sb) {
        const double s = std::sin(half_delta);
        return 0.5 * s * s;
    }
    const double c = std::cos(half_delta);
    return 0.5 * c * c;
}

/// Joint probability obtained by integrating the chosen sigma density over
/// the x_A region where both spin projections give the requested signs
/// (x_B fixed at the half-period shift). Valid for arbitrary angle pairs;
/// the region decomposition follows the circle wrap.
inline double quadrature_probability(JointOutcome outcome, double theta_a, double theta_b,
                                     SigmaChoice sigma, double half_period = 1.0,
                                     double abs_tol = 1e-10) {
    const double v = half_period;
    const double ta = reduce_angle(theta_a);
    const double tb = reduce_angle(theta_b);
    const double a_pos = (v * ta) / kPi;
    const double b_pos = (v * tb) / kPi;

    // Sign flips of either station, which are also the kinks of both
    // densities.
    std::vector<double> edges = {-v, v};
    for (double p : {a_pos, a_pos + v, b_pos, b_pos + v}) {
        const double w = wrap(p, v);
        if (w > -v && w < v) edges.push_back(w);
    }
    std::sort(edges.begin(), edges.end());

    const double theta_sigma = sigma == SigmaChoice::kSigma1 ? ta : tb;
    const auto density = [&](double x) { return sigma1_density(x, theta_sigma, v); };
    const auto [want_a, want_b] = outcome_spins(outcome);

    const double min_width = 1e-12 * 2.0 * v;
    const double piece_tol = abs_tol / static_cast<double>(edges.size());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i];
        const double hi = edges[i + 1];
        if (hi - lo < min_width) continue;
        const double mid = 0.5 * (lo + hi);
        if (spin_projection(ta, mid, v) != want_a) continue;
        if (spin_projection(tb, wrap(mid - v, v), v) != want_b) continue;
        total += integrate(density, lo, hi, piece_tol);
    }
    return total;
}

/// E(theta_a, theta_b) = -cos(theta_a - theta_b).
inline double analytic_correlation(double theta_a, double theta_b) {
    return -std::cos(theta_a - theta_b);
}

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b') on the analytic correlation.
inline double analytic_chsh(double a, double a_prime, double b, double b_prime) {
    return analytic_correlation(a, b) - analytic_correlation(a, b_prime) +
           analytic_correlation(a_prime, b) + analytic_correlation(a_prime, b_prime);
}

namespace detail {

// One-period totals of the prepared (unnormalized) and observed ensembles,
// marginalized over the mode variables. Computed by quadrature; the pair
// fraction is their ratio and does not depend on the analyzer settings.
struct EnsembleTotals {
    double prepared = 0.0;
    double observed = 0.0;
};

inline EnsembleTotals ensemble_totals(Variant variant, double half_period, double abs_tol) {
    const double v = half_period;
    EnsembleTotals totals;
    const auto prepared_density = [&](double) { return kPi / (4.0 * v); };
    totals.prepared = integrate(prepared_density, -v, v, abs_tol);

    // Observed-pair x_A marginal at reference settings theta_a = theta_b = 0:
    // sigma1 for the one-sided variant, the half-half mixture otherwise.
    const std::vector<double> kinks = {0.0};
    if (variant == Variant::kAsymmetricA) {
        const auto density = [&](double x) { return sigma1_density(x, 0.0, v); };
        totals.observed = integrate_split(density, -v, v, kinks, abs_tol);
    } else {
        const auto density = [&](double x) {
            return 0.5 * sigma1_density(x, 0.0, v) + 0.5 * sigma2_density(x, 0.0, v);
        };
        totals.observed = integrate_split(density, -v, v, kinks, abs_tol);
    }
    return totals;
}

}  // namespace detail

/// Fraction of prepared pairs observed as pairs: the observed-to-prepared
/// ensemble ratio, 2/pi in both variants.
inline double pair_fraction_analytic(Variant variant, double half_period = 1.0,
                                     double abs_tol = 1e-10) {
    const auto totals = detail::ensemble_totals(variant, half_period, abs_tol);
    return totals.observed / totals.prepared;
}

/// Singles observed per observed pair: (pi - 2)/2 in both variants.
inline double singles_to_pairs_ratio_analytic(Variant variant, double half_period = 1.0,
                                              double abs_tol = 1e-10) {
    const auto totals = detail::ensemble_totals(variant, half_period, abs_tol);
    return (totals.prepared - totals.observed) / totals.observed;
}

}  // namespace isolato
