#pragma once

// Batch trial runner: chunked, reproducible Monte Carlo over emissions,
// CHSH sweeps, delayed-choice timelines, and correlation scans.
//
// Trials are processed in fixed chunks of 2^16 emissions, one RNG substream
// per chunk, so serial and parallel executions tally bit-identical counts
// regardless of scheduling. Multi-run operations (CHSH settings, scan rows)
// space their substreams 2^32 apart.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "isolato/counts.hpp"
#include "isolato/model.hpp"
#include "isolato/rng.hpp"
#include "isolato/sampler.hpp"
#include "isolato/stats.hpp"

namespace isolato {

inline constexpr std::uint64_t kTrialChunk = 1ULL << 16;
inline constexpr std::uint64_t kSubstreamStride = 1ULL << 32;

namespace detail {

inline CountsTable run_chunk(const ModelParams& params, const Settings& settings,
                             std::uint64_t seed_substream, std::uint64_t n_trials) {
    RngStream rng(params.seed, seed_substream);
    CountsTable counts;
    for (std::uint64_t i = 0; i < n_trials; ++i) {
        const HiddenPairState state = sample_initial_pair(rng, params);
        counts.record(measure_trial(state, settings, params));
    }
    return counts;
}

inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace detail

/// Run n emissions at fixed settings and tally the outcomes. Deterministic
/// in (params.seed, substream_base, n); independent of the thread count.
inline CountsTable run_experiment(const ModelParams& params, const Settings& settings,
                                  std::uint64_t n, int threads = 0,
                                  std::uint64_t substream_base = 0) {
    params.validate();
    if (n == 0) throw std::invalid_argument("run_experiment: n must be >= 1");

    const std::uint64_t n_chunks = (n + kTrialChunk - 1) / kTrialChunk;
    const auto chunk_len = [n, n_chunks](std::uint64_t c) {
        return c + 1 < n_chunks ? kTrialChunk : n - c * kTrialChunk;
    };

    const int worker_count =
        static_cast<int>(std::min<std::uint64_t>(detail::resolve_threads(threads), n_chunks));
    if (worker_count <= 1) {
        CountsTable total;
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
            total += detail::run_chunk(params, settings, substream_base + c, chunk_len(c));
        }
        return total;
    }

    std::vector<CountsTable> partial(static_cast<std::size_t>(worker_count));
    std::atomic<std::uint64_t> next_chunk{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(worker_count));
    for (int w = 0; w < worker_count; ++w) {
        workers.emplace_back([&, w] {
            CountsTable local;
            for (std::uint64_t c = next_chunk.fetch_add(1); c < n_chunks;
                 c = next_chunk.fetch_add(1)) {
                local += detail::run_chunk(params, settings, substream_base + c, chunk_len(c));
            }
            partial[static_cast<std::size_t>(w)] = local;
        });
    }
    for (auto& t : workers) t.join();

    CountsTable total;
    for (const auto& p : partial) total += p;
    return total;
}

struct ChshSpec {
    double a = 0.0;
    double a_prime = kPi / 2.0;
    double b = kPi / 4.0;
    double b_prime = 3.0 * kPi / 4.0;
    Normalization normalization = Normalization::kCoincidenceOnly;
    std::uint64_t trials_per_setting = 1000000;

    void validate() const {
        if (trials_per_setting == 0) {
            throw std::invalid_argument("ChshSpec: trials_per_setting must be >= 1");
        }
        for (double angle : {a, a_prime, b, b_prime}) {
            if (!std::isfinite(angle)) throw std::invalid_argument("ChshSpec: non-finite angle");
        }
    }
};

struct ChshResult {
    double s = 0.0;                      // E(a,b) - E(a,b') + E(a',b) + E(a',b')
    std::array<double, 4> e{};           // per setting pair, order as above
    std::array<double, 4> e_stderr{};
    std::array<CountsTable, 4> counts{};
    double s_stderr = 0.0;
};

inline ChshResult run_chsh(const ModelParams& params, const ChshSpec& spec, int threads = 0) {
    spec.validate();
    const std::array<Settings, 4> pairs = {
        Settings(spec.a, spec.b),
        Settings(spec.a, spec.b_prime),
        Settings(spec.a_prime, spec.b),
        Settings(spec.a_prime, spec.b_prime),
    };
    ChshResult result;
    double var_sum = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        result.counts[i] = run_experiment(params, pairs[i], spec.trials_per_setting, threads,
                                          static_cast<std::uint64_t>(i) * kSubstreamStride);
        result.e[i] = correlation(result.counts[i], spec.normalization);
        result.e_stderr[i] = correlation_stderr(result.counts[i], spec.normalization);
        var_sum += result.e_stderr[i] * result.e_stderr[i];
    }
    result.s = result.e[0] - result.e[1] + result.e[2] + result.e[3];
    result.s_stderr = std::sqrt(var_sum);
    return result;
}

struct PhiKnot {
    double t = 0.0;
    double phi = 0.0;
};

/// Timeline for a run whose A-side analyzer parameter evolves in flight:
/// emission at t0, arrival at the apparatus at t1, evolution frozen at the
/// final setting from t2 on. The profile is piecewise linear and
/// nondecreasing; an empty profile means a straight ramp from theta_initial
/// to theta_final (unwound by full turns so the ramp never decreases).
struct DelayedChoiceSpec {
    double t0 = 0.0;
    double t1 = 1.0;
    double t2 = 1.0;
    double theta_initial = 0.0;
    double theta_final = 0.0;
    std::vector<PhiKnot> profile;  // optional

    void validate() const {
        for (double v : {t0, t1, t2, theta_initial, theta_final}) {
            if (!std::isfinite(v)) throw std::invalid_argument("DelayedChoiceSpec: non-finite field");
        }
        if (!(t0 < t1)) throw std::invalid_argument("DelayedChoiceSpec: requires t0 < t1");
        if (!(t1 <= t2)) throw std::invalid_argument("DelayedChoiceSpec: requires t1 <= t2");
        if (profile.empty()) return;
        for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
            if (!(profile[i].t < profile[i + 1].t)) {
                throw std::invalid_argument("DelayedChoiceSpec: knot times must increase");
            }
            if (profile[i].phi > profile[i + 1].phi) {
                throw std::invalid_argument("DelayedChoiceSpec: profile must be nondecreasing");
            }
        }
        if (!(profile.back().t <= t2)) {
            throw std::invalid_argument("DelayedChoiceSpec: profile must freeze at or before t2");
        }
        if (!same_direction(profile.front().phi, theta_initial) ||
            !same_direction(profile.back().phi, theta_final)) {
            throw std::invalid_argument(
                "DelayedChoiceSpec: profile endpoints must equal theta_initial/theta_final "
                "(mod 2*pi)");
        }
    }

    /// Piecewise-linear profile value; constant before the first and after
    /// the last knot.
    double phi_at(double t) const {
        const std::vector<PhiKnot> knots = profile.empty() ? default_ramp() : profile;
        if (t <= knots.front().t) return knots.front().phi;
        if (t >= knots.back().t) return knots.back().phi;
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            if (t <= knots[i + 1].t) {
                const double frac = (t - knots[i].t) / (knots[i + 1].t - knots[i].t);
                return knots[i].phi + frac * (knots[i + 1].phi - knots[i].phi);
            }
        }
        return knots.back().phi;
    }

private:
    static bool same_direction(double x, double y) {
        const double d = std::abs(reduce_angle(x) - reduce_angle(y));
        return std::min(d, kTwoPi - d) < 1e-9;
    }

    std::vector<PhiKnot> default_ramp() const {
        double target = theta_final;
        while (target < theta_initial) target += kTwoPi;
        return {{t0, theta_initial}, {t2, target}};
    }
};

/// Run with the A-side parameter following the timeline; the rejection
/// predicate is evaluated at measurement time, after the profile has
/// frozen, so only the final value enters the statistics.
inline CountsTable run_delayed_choice(const ModelParams& params, const DelayedChoiceSpec& spec,
                                      double theta_b, std::uint64_t n, int threads = 0) {
    spec.validate();
    const double theta_at_measurement = spec.phi_at(spec.t2);
    return run_experiment(params, Settings(theta_at_measurement, theta_b), n, threads);
}

struct ScanRow {
    double delta = 0.0;
    double e_coinc = 0.0;
    double e_coinc_stderr = 0.0;
    double e_all = 0.0;
    double pair_fraction = 0.0;
    std::uint64_t n = 0;
};

/// Sweep theta_a = delta with theta_b = 0, one independent substream block
/// per row.
inline std::vector<ScanRow> run_scan(const ModelParams& params, const std::vector<double>& deltas,
                                     std::uint64_t n_per_point, int threads = 0) {
    if (deltas.empty()) throw std::invalid_argument("run_scan: empty grid");
    std::vector<ScanRow> rows;
    rows.reserve(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const CountsTable counts =
            run_experiment(params, Settings(deltas[i], 0.0), n_per_point, threads,
                           static_cast<std::uint64_t>(i) * kSubstreamStride);
        ScanRow row;
        row.delta = deltas[i];
        row.e_coinc = correlation(counts, Normalization::kCoincidenceOnly);
        row.e_coinc_stderr = correlation_stderr(counts, Normalization::kCoincidenceOnly);
        row.e_all = correlation(counts, Normalization::kAllEmissions);
        row.pair_fraction = static_cast<double>(counts.coincidences()) /
                            static_cast<double>(counts.n_emitted);
        row.n = counts.n_emitted;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace isolato
