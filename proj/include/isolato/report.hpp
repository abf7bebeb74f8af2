#pragma once

// Run configuration and result serialization: JSON reports for structured
// runs, CSV for scans. Every output embeds the config that produced it, so
// a report can be reproduced from its own payload. No timestamps or other
// nondeterministic fields: identical config and seed give identical bytes.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "isolato/engine.hpp"
#include "isolato/oracle.hpp"

namespace isolato {

using nlohmann::json;

struct RunConfig {
    std::string command = "run";  // run | chsh | scan | oracle | delayed
    Variant variant = Variant::kAsymmetricA;
    std::uint64_t seed = 1;
    double half_period = 1.0;
    std::uint64_t n = 1000000;
    Normalization normalization = Normalization::kCoincidenceOnly;
    int threads = 0;

    // run / oracle
    double theta_a = 0.0;
    double theta_b = 0.0;

    // chsh
    double chsh_a = 0.0;
    double chsh_a_prime = kPi / 2.0;
    double chsh_b = kPi / 4.0;
    double chsh_b_prime = 3.0 * kPi / 4.0;

    // scan
    int scan_points = 33;
    double scan_max_delta = kTwoPi;

    // delayed
    double t0 = 0.0;
    double t1 = 1.0;
    double t2 = 1.0;
    double theta_initial = 0.0;
    double theta_final = 0.0;
    double delayed_theta_b = 0.0;
    std::vector<PhiKnot> knots;

    // oracle
    int oracle_grid = 20;
    double oracle_abs_tol = 1e-9;

    ModelParams model_params() const { return ModelParams{half_period, variant, seed}; }
};

inline std::string to_string(Variant v) {
    return v == Variant::kAsymmetricA ? "asym" : "sym";
}

inline Variant variant_from_string(const std::string& s) {
    if (s == "asym") return Variant::kAsymmetricA;
    if (s == "sym") return Variant::kSymmetric;
    throw std::invalid_argument("unknown variant '" + s + "' (expected asym or sym)");
}

inline std::string to_string(Normalization n) {
    return n == Normalization::kCoincidenceOnly ? "coinc" : "all";
}

inline Normalization normalization_from_string(const std::string& s) {
    if (s == "coinc") return Normalization::kCoincidenceOnly;
    if (s == "all") return Normalization::kAllEmissions;
    throw std::invalid_argument("unknown normalization '" + s + "' (expected coinc or all)");
}

/// Locale-independent decimal formatting with 17 significant digits.
inline std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline json config_to_json(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["variant"] = to_string(cfg.variant);
    j["seed"] = cfg.seed;
    j["v"] = cfg.half_period;
    j["n"] = cfg.n;
    j["normalization"] = to_string(cfg.normalization);
    j["threads"] = cfg.threads;
    if (cfg.command == "run" || cfg.command == "oracle") {
        j["theta_a"] = cfg.theta_a;
        j["theta_b"] = cfg.theta_b;
    }
    if (cfg.command == "chsh") {
        j["chsh"] = {{"a", cfg.chsh_a},
                     {"a_prime", cfg.chsh_a_prime},
                     {"b", cfg.chsh_b},
                     {"b_prime", cfg.chsh_b_prime}};
    }
    if (cfg.command == "scan") {
        j["scan"] = {{"points", cfg.scan_points}, {"max_delta", cfg.scan_max_delta}};
    }
    if (cfg.command == "delayed") {
        json knots = json::array();
        for (const auto& k : cfg.knots) knots.push_back({k.t, k.phi});
        j["delayed"] = {{"t0", cfg.t0},
                        {"t1", cfg.t1},
                        {"t2", cfg.t2},
                        {"theta_initial", cfg.theta_initial},
                        {"theta_final", cfg.theta_final},
                        {"theta_b", cfg.delayed_theta_b},
                        {"knots", knots}};
    }
    if (cfg.command == "oracle") {
        j["oracle"] = {{"grid", cfg.oracle_grid}, {"abs_tol", cfg.oracle_abs_tol}};
    }
    return j;
}

inline RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    cfg.command = j.value("command", cfg.command);
    if (j.contains("variant")) cfg.variant = variant_from_string(j.at("variant").get<std::string>());
    cfg.seed = j.value("seed", cfg.seed);
    cfg.half_period = j.value("v", cfg.half_period);
    cfg.n = j.value("n", cfg.n);
    if (j.contains("normalization")) {
        cfg.normalization = normalization_from_string(j.at("normalization").get<std::string>());
    }
    cfg.threads = j.value("threads", cfg.threads);
    cfg.theta_a = j.value("theta_a", cfg.theta_a);
    cfg.theta_b = j.value("theta_b", cfg.theta_b);
    if (j.contains("chsh")) {
        const json& c = j.at("chsh");
        cfg.chsh_a = c.value("a", cfg.chsh_a);
        cfg.chsh_a_prime = c.value("a_prime", cfg.chsh_a_prime);
        cfg.chsh_b = c.value("b", cfg.chsh_b);
        cfg.chsh_b_prime = c.value("b_prime", cfg.chsh_b_prime);
    }
    if (j.contains("scan")) {
        const json& s = j.at("scan");
        cfg.scan_points = s.value("points", cfg.scan_points);
        cfg.scan_max_delta = s.value("max_delta", cfg.scan_max_delta);
    }
    if (j.contains("delayed")) {
        const json& d = j.at("delayed");
        cfg.t0 = d.value("t0", cfg.t0);
        cfg.t1 = d.value("t1", cfg.t1);
        cfg.t2 = d.value("t2", cfg.t2);
        cfg.theta_initial = d.value("theta_initial", cfg.theta_initial);
        cfg.theta_final = d.value("theta_final", cfg.theta_final);
        cfg.delayed_theta_b = d.value("theta_b", cfg.delayed_theta_b);
        if (d.contains("knots")) {
            for (const auto& k : d.at("knots")) {
                cfg.knots.push_back(PhiKnot{k.at(0).get<double>(), k.at(1).get<double>()});
            }
        }
    }
    if (j.contains("oracle")) {
        const json& o = j.at("oracle");
        cfg.oracle_grid = o.value("grid", cfg.oracle_grid);
        cfg.oracle_abs_tol = o.value("abs_tol", cfg.oracle_abs_tol);
    }
    return cfg;
}

namespace detail {

inline json counts_to_json(const CountsTable& c) {
    return {{"n_pp", c.n_pp},           {"n_pm", c.n_pm},
            {"n_mp", c.n_mp},           {"n_mm", c.n_mm},
            {"n_single_a", c.n_single_a}, {"n_single_b", c.n_single_b},
            {"n_emitted", c.n_emitted}};
}

// Compare an observed count against an expected probability using the
// standard error at the expected value; expected-zero cells must be empty.
inline json comparison_block(std::uint64_t count, std::uint64_t trials, double expected_p,
                             double z_limit = 4.0) {
    const BinomialEstimate est = binomial_estimate(count, trials);
    json block = {{"count", count},
                  {"fraction", est.p_hat},
                  {"stderr", est.standard_error},
                  {"ci_low", est.ci_low},
                  {"ci_high", est.ci_high},
                  {"expected", expected_p}};
    const double se_expected =
        std::sqrt(expected_p * (1.0 - expected_p) / static_cast<double>(trials));
    if (se_expected > 0.0) {
        const double z = (est.p_hat - expected_p) / se_expected;
        block["z"] = z;
        block["within_tolerance"] = std::abs(z) <= z_limit;
    } else {
        block["z"] = nullptr;
        block["within_tolerance"] = est.p_hat == expected_p;
    }
    return block;
}

inline json correlation_block(const CountsTable& counts, Normalization norm, double analytic_e) {
    const double e = correlation(counts, norm);
    const double se = correlation_stderr(counts, norm);
    json block = {{"e", e}, {"stderr", se}, {"analytic", analytic_e}};
    if (se > 0.0) {
        const double z = (e - analytic_e) / se;
        block["z"] = z;
        block["within_tolerance"] = std::abs(z) <= 4.0;
    } else {
        block["z"] = nullptr;
        block["within_tolerance"] = e == analytic_e;
    }
    return block;
}

// Two-sample proportion z score with pooled variance; 0 when both samples
// agree exactly.
inline double two_sample_z(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2,
                           std::uint64_t n2) {
    const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
    const double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
    const double se = std::sqrt(pooled * (1.0 - pooled) *
                                (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    if (se == 0.0) return 0.0;
    return (p1 - p2) / se;
}

}  // namespace detail

/// One fixed-settings run with oracle comparisons on every reported figure.
inline json run_report(const RunConfig& cfg) {
    const ModelParams params = cfg.model_params();
    const Settings settings(cfg.theta_a, cfg.theta_b);
    const CountsTable counts = run_experiment(params, settings, cfg.n, cfg.threads);
    const std::uint64_t n_coinc = counts.coincidences();

    json report;
    report["config"] = config_to_json(cfg);
    report["counts"] = detail::counts_to_json(counts);

    json cells;
    cells["pp"] = detail::comparison_block(
        counts.n_pp, n_coinc, quantum_probability(JointOutcome::kPP, cfg.theta_a, cfg.theta_b));
    cells["pm"] = detail::comparison_block(
        counts.n_pm, n_coinc, quantum_probability(JointOutcome::kPM, cfg.theta_a, cfg.theta_b));
    cells["mp"] = detail::comparison_block(
        counts.n_mp, n_coinc, quantum_probability(JointOutcome::kMP, cfg.theta_a, cfg.theta_b));
    cells["mm"] = detail::comparison_block(
        counts.n_mm, n_coinc, quantum_probability(JointOutcome::kMM, cfg.theta_a, cfg.theta_b));
    report["cells"] = cells;

    const double expected_fraction = pair_fraction_analytic(cfg.variant, cfg.half_period);
    report["pair_fraction"] =
        detail::comparison_block(n_coinc, counts.n_emitted, expected_fraction);

    const double singles_ratio =
        static_cast<double>(counts.singles()) / static_cast<double>(n_coinc);
    const double expected_ratio = singles_to_pairs_ratio_analytic(cfg.variant, cfg.half_period);
    const double ratio_se = std::sqrt(expected_fraction * (1.0 - expected_fraction) /
                                      static_cast<double>(counts.n_emitted)) /
                            (expected_fraction * expected_fraction);
    const double ratio_z = (singles_ratio - expected_ratio) / ratio_se;
    report["singles"] = {{"count", counts.singles()},
                         {"ratio_to_pairs", singles_ratio},
                         {"expected", expected_ratio},
                         {"z", ratio_z},
                         {"within_tolerance", std::abs(ratio_z) <= 4.0}};

    const double analytic_e = analytic_correlation(cfg.theta_a, cfg.theta_b);
    report["correlation"] = {
        {"coincidence_only",
         detail::correlation_block(counts, Normalization::kCoincidenceOnly, analytic_e)},
        {"all_emissions",
         detail::correlation_block(counts, Normalization::kAllEmissions,
                                   analytic_e * expected_fraction)}};
    return report;
}

inline json chsh_report(const RunConfig& cfg) {
    const ChshSpec spec{cfg.chsh_a, cfg.chsh_a_prime, cfg.chsh_b, cfg.chsh_b_prime,
                        cfg.normalization, cfg.n};
    const ChshResult result = run_chsh(cfg.model_params(), spec, cfg.threads);

    const double dilution = cfg.normalization == Normalization::kAllEmissions
                                ? pair_fraction_analytic(cfg.variant, cfg.half_period)
                                : 1.0;
    const double analytic_s =
        analytic_chsh(spec.a, spec.a_prime, spec.b, spec.b_prime) * dilution;

    const std::array<std::pair<double, double>, 4> angles = {
        std::pair{spec.a, spec.b},
        std::pair{spec.a, spec.b_prime},
        std::pair{spec.a_prime, spec.b},
        std::pair{spec.a_prime, spec.b_prime},
    };
    json settings = json::array();
    for (std::size_t i = 0; i < 4; ++i) {
        settings.push_back(
            {{"theta_a", angles[i].first},
             {"theta_b", angles[i].second},
             {"counts", detail::counts_to_json(result.counts[i])},
             {"e", result.e[i]},
             {"stderr", result.e_stderr[i]},
             {"analytic_e",
              analytic_correlation(angles[i].first, angles[i].second) * dilution}});
    }

    json report;
    report["config"] = config_to_json(cfg);
    report["settings"] = settings;
    report["s"] = result.s;
    report["s_stderr"] = result.s_stderr;
    report["abs_s"] = std::abs(result.s);
    report["analytic_s"] = analytic_s;
    report["classical_bound"] = 2.0;
    report["violates_classical_bound"] = std::abs(result.s) > 2.0;
    return report;
}

/// CSV scan over delta = theta_a with theta_b = 0. First line is the fixed
/// header; the last line is a comment embedding the config.
inline std::string scan_csv(const RunConfig& cfg) {
    if (cfg.scan_points < 1) throw std::invalid_argument("scan: points must be >= 1");
    std::vector<double> deltas;
    deltas.reserve(static_cast<std::size_t>(cfg.scan_points));
    if (cfg.scan_points == 1) {
        deltas.push_back(0.0);
    } else {
        for (int i = 0; i < cfg.scan_points; ++i) {
            deltas.push_back(cfg.scan_max_delta * static_cast<double>(i) /
                             static_cast<double>(cfg.scan_points - 1));
        }
    }
    const std::vector<ScanRow> rows = run_scan(cfg.model_params(), deltas, cfg.n, cfg.threads);

    std::string out = "delta,E_coinc,E_coinc_stderr,E_all,pair_fraction,n\n";
    for (const ScanRow& row : rows) {
        out += format_double(row.delta);
        out += ',';
        out += format_double(row.e_coinc);
        out += ',';
        out += format_double(row.e_coinc_stderr);
        out += ',';
        out += format_double(row.e_all);
        out += ',';
        out += format_double(row.pair_fraction);
        out += ',';
        out += std::to_string(row.n);
        out += '\n';
    }
    out += "# config ";
    out += config_to_json(cfg).dump();
    out += '\n';
    return out;
}

/// Analytic table: closed-form probabilities at the configured angles, the
/// quadrature cross-check over a grid, and the ensemble fractions.
inline json oracle_report(const RunConfig& cfg) {
    json report;
    report["config"] = config_to_json(cfg);

    report["quantum"] = {
        {"theta_a", cfg.theta_a},
        {"theta_b", cfg.theta_b},
        {"p_pp", quantum_probability(JointOutcome::kPP, cfg.theta_a, cfg.theta_b)},
        {"p_pm", quantum_probability(JointOutcome::kPM, cfg.theta_a, cfg.theta_b)},
        {"p_mp", quantum_probability(JointOutcome::kMP, cfg.theta_a, cfg.theta_b)},
        {"p_mm", quantum_probability(JointOutcome::kMM, cfg.theta_a, cfg.theta_b)},
        {"correlation", analytic_correlation(cfg.theta_a, cfg.theta_b)}};

    const int grid = cfg.oracle_grid;
    double max_dev = 0.0;
    for (int ia = 0; ia < grid; ++ia) {
        for (int ib = 0; ib < grid; ++ib) {
            const double ta = kTwoPi * ia / grid;
            const double tb = kTwoPi * ib / grid;
            for (JointOutcome o :
                 {JointOutcome::kPP, JointOutcome::kPM, JointOutcome::kMP, JointOutcome::kMM}) {
                const double exact = quantum_probability(o, ta, tb);
                for (SigmaChoice s : {SigmaChoice::kSigma1, SigmaChoice::kSigma2}) {
                    const double quad =
                        quadrature_probability(o, ta, tb, s, cfg.half_period, 1e-10);
                    max_dev = std::max(max_dev, std::abs(quad - exact));
                }
            }
        }
    }
    report["quadrature_check"] = {{"grid", grid},
                                  {"abs_tol", cfg.oracle_abs_tol},
                                  {"max_abs_deviation", max_dev},
                                  {"within_tolerance", max_dev < cfg.oracle_abs_tol}};

    report["pair_fraction"] = pair_fraction_analytic(cfg.variant, cfg.half_period);
    report["singles_ratio"] = singles_to_pairs_ratio_analytic(cfg.variant, cfg.half_period);

    const double s = analytic_chsh(cfg.chsh_a, cfg.chsh_a_prime, cfg.chsh_b, cfg.chsh_b_prime);
    report["chsh_analytic"] = {{"a", cfg.chsh_a},
                               {"a_prime", cfg.chsh_a_prime},
                               {"b", cfg.chsh_b},
                               {"b_prime", cfg.chsh_b_prime},
                               {"s", s},
                               {"abs_s", std::abs(s)}};
    return report;
}

/// Delayed-choice run compared against the static run at the final setting
/// with the same seed and substreams.
inline json delayed_report(const RunConfig& cfg) {
    const DelayedChoiceSpec spec{cfg.t0,           cfg.t1,          cfg.t2,
                                 cfg.theta_initial, cfg.theta_final, cfg.knots};
    const ModelParams params = cfg.model_params();
    const CountsTable delayed =
        run_delayed_choice(params, spec, cfg.delayed_theta_b, cfg.n, cfg.threads);
    const CountsTable fixed = run_experiment(
        params, Settings(cfg.theta_final, cfg.delayed_theta_b), cfg.n, cfg.threads);

    const std::uint64_t nc_d = delayed.coincidences();
    const std::uint64_t nc_s = fixed.coincidences();
    json cells_z = {
        {"pp", detail::two_sample_z(delayed.n_pp, nc_d, fixed.n_pp, nc_s)},
        {"pm", detail::two_sample_z(delayed.n_pm, nc_d, fixed.n_pm, nc_s)},
        {"mp", detail::two_sample_z(delayed.n_mp, nc_d, fixed.n_mp, nc_s)},
        {"mm", detail::two_sample_z(delayed.n_mm, nc_d, fixed.n_mm, nc_s)},
    };
    const double pair_z =
        detail::two_sample_z(nc_d, delayed.n_emitted, nc_s, fixed.n_emitted);
    double max_abs_z = std::abs(pair_z);
    for (const auto& [key, value] : cells_z.items()) {
        max_abs_z = std::max(max_abs_z, std::abs(value.get<double>()));
    }

    json report;
    report["config"] = config_to_json(cfg);
    report["effective_theta_a"] = spec.phi_at(spec.t2);
    report["delayed_counts"] = detail::counts_to_json(delayed);
    report["static_counts"] = detail::counts_to_json(fixed);
    report["identical"] = delayed == fixed;
    report["cells_z"] = cells_z;
    report["pair_fraction_z"] = pair_z;
    report["max_abs_z"] = max_abs_z;
    report["within_tolerance"] = max_abs_z < 4.0;
    return report;
}

/// Dispatch on config.command.
inline std::string render_report(const RunConfig& cfg) {
    if (cfg.command == "run") return run_report(cfg).dump(2) + "\n";
    if (cfg.command == "chsh") return chsh_report(cfg).dump(2) + "\n";
    if (cfg.command == "scan") return scan_csv(cfg);
    if (cfg.command == "oracle") return oracle_report(cfg).dump(2) + "\n";
    if (cfg.command == "delayed") return delayed_report(cfg).dump(2) + "\n";
    throw std::invalid_argument("unknown command '" + cfg.command + "'");
}

}  // namespace isolato
