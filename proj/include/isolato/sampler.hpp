#pragma once

// Sampling of the initially prepared pair ensemble and the detection
// predicates that classify one emission into a coincidence or a single.
//
// A particle goes undetected ("isolato") when its mode variable lambda
// exceeds (pi/4V)|sin(pi*x/V - theta)|, i.e. when its continuous spin value
// sits too far from the quantized poles. In the asymmetric variant only
// station A can reject; in the symmetric variant the pair variable mu picks
// which side may reject: mu < 0 gates A, mu >= 0 gates B (with the B
// threshold phase-shifted by a half turn).

#include <cmath>
#include <stdexcept>

#include "isolato/model.hpp"
#include "isolato/rng.hpp"

namespace isolato {

struct HiddenPairState {
    double x_a = 0.0;
    double lambda_a = 0.0;
    double x_b = 0.0;
    double lambda_b = 0.0;
    double mu = 0.0;  // present in both variants, ignored by kAsymmetricA
};

enum class OutcomeKind {
    kCoincidence,
    kSingleA,  // only A detected (B rejected)
    kSingleB,  // only B detected (A rejected)
};

struct TrialOutcome {
    OutcomeKind kind;
    Spin spin_a;  // meaningful unless kind == kSingleB
    Spin spin_b;  // meaningful unless kind == kSingleA
};

/// Draw one pair from the prepared ensemble: x_A uniform on the circle,
/// x_B the exact half-period shift, lambdas uniform on [0, pi/4V], mu
/// uniform on [-1, 1]. Always consumes exactly four RNG draws.
///
/// x_A lives on the 2^-52 grid of the circle so that the shift to x_B is
/// exact whenever V is a power of two; perfect anticorrelation at equal
/// analyzer angles then holds trial by trial, not just in expectation.
inline HiddenPairState sample_initial_pair(RngStream& rng, const ModelParams& params) {
    params.validate();
    const double v = params.half_period;
    const double lambda_max = kPi / (4.0 * v);

    const double m = rng.next_symmetric();        // (-1, 1]
    const double m_shift = m > 0.0 ? m - 1.0 : m + 1.0;  // exact on the grid

    HiddenPairState state;
    state.x_a = v * m;
    state.lambda_a = lambda_max * rng.next_unit();
    state.x_b = v * m_shift;
    state.lambda_b = lambda_max * rng.next_unit();
    state.mu = 2.0 * rng.next_unit() - 1.0;
    return state;
}

/// Rejection threshold for station A: sigma1 evaluated at x_A.
inline double isolato_threshold_a(double x_a, double theta_a, double half_period) {
    return sigma1_density(x_a, theta_a, half_period);
}

/// Rejection threshold for station B; the phase carries the extra half turn
/// of the second density solution: (pi/4V)|sin(pi*x_B/V - pi - theta_B)|.
inline double isolato_threshold_b(double x_b, double theta_b, double half_period) {
    const double v = half_period;
    return kPi / (4.0 * v) * std::abs(std::sin(kPi * x_b / v - kPi - theta_b));
}

/// True when particle A goes undetected. Ties (lambda equal to the
/// threshold) count as detected.
inline bool is_isolato_a(const HiddenPairState& state, double theta_a, const ModelParams& params) {
    if (params.variant == Variant::kSymmetric && !(state.mu < 0.0)) return false;
    return state.lambda_a > isolato_threshold_a(state.x_a, theta_a, params.half_period);
}

/// True when particle B goes undetected; never in the asymmetric variant.
inline bool is_isolato_b(const HiddenPairState& state, double theta_b, const ModelParams& params) {
    if (params.variant != Variant::kSymmetric) return false;
    if (state.mu < 0.0) return false;
    return state.lambda_b > isolato_threshold_b(state.x_b, theta_b, params.half_period);
}

/// Classify one emission under the given analyzer settings.
inline TrialOutcome measure_trial(const HiddenPairState& state, const Settings& settings,
                                  const ModelParams& params) {
    const bool iso_a = is_isolato_a(state, settings.theta_a, params);
    const bool iso_b = is_isolato_b(state, settings.theta_b, params);
    if (iso_a && iso_b) {
        // unreachable: the mu gates are disjoint
        throw std::logic_error("measure_trial: both particles undetected");
    }
    if (iso_a) {
        return {OutcomeKind::kSingleB, Spin::kPlus,
                spin_projection(settings.theta_b, state.x_b, params.half_period)};
    }
    if (iso_b) {
        return {OutcomeKind::kSingleA,
                spin_projection(settings.theta_a, state.x_a, params.half_period), Spin::kPlus};
    }
    return {OutcomeKind::kCoincidence,
            spin_projection(settings.theta_a, state.x_a, params.half_period),
            spin_projection(settings.theta_b, state.x_b, params.half_period)};
}

}  // namespace isolato
