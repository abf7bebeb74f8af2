#pragma once

// Hidden-variable state space for the EPR-Bohm pair simulation.
//
// Each particle carries a coordinate x on a circle of circumference 2V,
// represented by the half-open interval (-V, V]. The quantized spin sign
// along analyzer angle theta is
//
//   +1  if  0 < (x - (V/pi)*theta mod 2V) <= V,
//   -1  otherwise,
//
// and the singlet constraint places the partner at x_B = x_A - V (mod 2V).
// The sigma densities below are the coincidence-conditioned distributions
// of x_A; their one-period integral is 1.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace isolato {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

enum class Variant {
    kAsymmetricA,  // only particle A can go undetected
    kSymmetric,    // either side, gated by the pair variable mu
};

enum class Spin : int {
    kPlus = +1,
    kMinus = -1,
};

inline int sign_of(Spin s) { return static_cast<int>(s); }

struct ModelParams {
    double half_period = 1.0;  // V, gauge of the hidden coordinate
    Variant variant = Variant::kAsymmetricA;
    std::uint64_t seed = 1;

    void validate() const {
        if (!std::isfinite(half_period) || half_period <= 0.0) {
            throw std::invalid_argument("ModelParams: half_period must be finite and > 0");
        }
    }
};

/// Reduce an angle into [0, 2*pi).
inline double reduce_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("reduce_angle: non-finite angle");
    }
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r + 0.0;  // never -0.0
}

/// Analyzer angles, stored reduced to [0, 2*pi).
struct Settings {
    Settings(double a, double b) : theta_a(reduce_angle(a)), theta_b(reduce_angle(b)) {}
    double theta_a;
    double theta_b;
};

/// Map x into the canonical interval (-V, V] of the circle with period 2V.
/// std::remainder is exact, so the result is congruent to x mod 2V with no
/// rounding error; only the representative choice at -V needs fixing up.
inline double wrap(double x, double half_period) {
    if (!std::isfinite(half_period) || half_period <= 0.0) {
        throw std::invalid_argument("wrap: half_period must be finite and > 0");
    }
    if (!std::isfinite(x)) {
        throw std::invalid_argument("wrap: non-finite coordinate");
    }
    double r = std::remainder(x, 2.0 * half_period);
    if (r == -half_period) r = half_period;
    return r + 0.0;  // never -0.0
}

/// Quantized spin sign (units of hbar/2) along direction theta for hidden
/// coordinate x. The half-open branch convention makes the half-period
/// shift an exact sign flip.
inline Spin spin_projection(double theta, double x, double half_period) {
    const double shift = (half_period * theta) / kPi;
    const double u = wrap(x - shift, half_period);
    return u > 0.0 ? Spin::kPlus : Spin::kMinus;
}

/// Continuous diagnostic version of the spin projection: sin(pi*x/V - theta),
/// in units of hbar/2. Agrees in sign with spin_projection away from zeros.
inline double nonquantized_spin(double theta, double x, double half_period) {
    if (!std::isfinite(half_period) || half_period <= 0.0) {
        throw std::invalid_argument("nonquantized_spin: half_period must be finite and > 0");
    }
    return std::sin(kPi * x / half_period - theta);
}

/// Coincidence-conditioned density of x_A when only station A rejects:
/// (pi/4V) |sin(pi*x/V - theta_a)|. One period integrates to 1.
inline double sigma1_density(double x, double theta_a, double half_period) {
    if (!std::isfinite(half_period) || half_period <= 0.0) {
        throw std::invalid_argument("sigma1_density: half_period must be finite and > 0");
    }
    return kPi / (4.0 * half_period) * std::abs(std::sin(kPi * x / half_period - theta_a));
}

/// Same functional form with theta_b in the phase; the second solution of
/// the coincidence-density equations.
inline double sigma2_density(double x, double theta_b, double half_period) {
    return sigma1_density(x, theta_b, half_period);
}

}  // namespace isolato
