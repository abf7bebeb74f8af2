#pragma once

// Adaptive Simpson quadrature with explicit breakpoint splitting.
//
// The model's densities are |sin| shapes: smooth between kinks, so the
// caller lists the kink/jump locations and each smooth piece is integrated
// adaptively to its share of the absolute tolerance budget. If the
// accumulated error estimate cannot meet the requested tolerance the
// integration reports failure instead of returning a silently degraded
// value.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace isolato {

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(double requested, double achieved)
        : std::runtime_error("quadrature did not converge: requested abs tol " +
                             std::to_string(requested) + ", achieved " +
                             std::to_string(achieved)),
          requested_tol(requested),
          achieved_tol(achieved) {}
    double requested_tol;
    double achieved_tol;
};

namespace detail {

inline constexpr int kMaxSimpsonDepth = 48;

template <typename F>
double simpson_recurse(F& f, double a, double fa, double b, double fb, double m, double fm,
                       double whole, double tol, int depth, double& err_accum) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth >= kMaxSimpsonDepth) {
        err_accum += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1, err_accum) +
           simpson_recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1, err_accum);
}

template <typename F>
double simpson_piece(F& f, double a, double b, double tol, double& err_accum) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, a, fa, b, fb, m, fm, whole, tol, 0, err_accum);
}

}  // namespace detail

/// Integrate f over [a, b] to absolute tolerance abs_tol.
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol) {
    double err = 0.0;
    const double value = detail::simpson_piece(f, a, b, abs_tol, err);
    if (err > abs_tol) throw QuadratureError(abs_tol, err);
    return value;
}

/// Integrate f over [a, b], splitting at the given interior breakpoints
/// (kinks or jumps of f). Breakpoints outside (a, b) are ignored.
template <typename F>
double integrate_split(F&& f, double a, double b, std::vector<double> breaks, double abs_tol) {
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> edges;
    edges.reserve(breaks.size());
    const double min_width = 1e-12 * (b - a);
    for (double p : breaks) {
        if (p < a || p > b) continue;
        if (!edges.empty() && p - edges.back() < min_width) continue;
        edges.push_back(p);
    }
    if (edges.empty() || edges.back() < b) edges.push_back(b);

    const double piece_tol = abs_tol / static_cast<double>(edges.size());
    double err = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        total += detail::simpson_piece(f, edges[i], edges[i + 1], piece_tol, err);
    }
    if (err > abs_tol) throw QuadratureError(abs_tol, err);
    return total;
}

}  // namespace isolato
