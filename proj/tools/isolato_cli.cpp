// Command-line front end: every quantitative claim of the model is
// reproducible with a single deterministic, seeded command.
//
// Exit codes: 0 success, 1 runtime/numeric failure, 2 usage or config error.

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isolato/report.hpp"

namespace {

using isolato::RunConfig;

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::string variant;
    std::string normalization;
};

void add_common_options(CLI::App* cmd, RunConfig& cfg, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file (same schema as the embedded config)");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
    cmd->add_option("--n", cfg.n, "trials (emissions) per run or per setting");
    cmd->add_option("--variant", flags.variant, "model variant: asym or sym");
    cmd->add_option("--normalization", flags.normalization, "correlation denominator: coinc or all");
    cmd->add_option("--v", cfg.half_period, "hidden-coordinate half period V");
    cmd->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
    cmd->add_option("--out", flags.out_path, "write the report to this path instead of stdout");
}

// Load the config file, then re-apply every value that was explicitly
// given on the command line.
void apply_config_file(CLI::App* cmd, RunConfig& cfg, const CommonFlags& flags) {
    if (flags.config_path.empty()) return;
    std::ifstream in(flags.config_path);
    if (!in) throw std::invalid_argument("cannot read config file: " + flags.config_path);
    nlohmann::json j;
    in >> j;
    const std::string command = cfg.command;
    RunConfig from_file = isolato::config_from_json(j);
    if (j.contains("command") && from_file.command != command) {
        throw std::invalid_argument("config file is for command '" + from_file.command +
                                    "', invoked subcommand is '" + command + "'");
    }
    from_file.command = command;
    const RunConfig from_cli = cfg;
    cfg = from_file;

    const auto given = [cmd](const std::string& name) {
        const CLI::Option* opt = cmd->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    if (given("--seed")) cfg.seed = from_cli.seed;
    if (given("--n")) cfg.n = from_cli.n;
    if (given("--v")) cfg.half_period = from_cli.half_period;
    if (given("--threads")) cfg.threads = from_cli.threads;
    if (given("--theta-a")) cfg.theta_a = from_cli.theta_a;
    if (given("--theta-b")) {
        cfg.theta_b = from_cli.theta_b;
        cfg.delayed_theta_b = from_cli.delayed_theta_b;
    }
    if (given("--a")) cfg.chsh_a = from_cli.chsh_a;
    if (given("--a-prime")) cfg.chsh_a_prime = from_cli.chsh_a_prime;
    if (given("--b")) cfg.chsh_b = from_cli.chsh_b;
    if (given("--b-prime")) cfg.chsh_b_prime = from_cli.chsh_b_prime;
    if (given("--points")) cfg.scan_points = from_cli.scan_points;
    if (given("--max-delta")) cfg.scan_max_delta = from_cli.scan_max_delta;
    if (given("--grid")) cfg.oracle_grid = from_cli.oracle_grid;
    if (given("--t0")) cfg.t0 = from_cli.t0;
    if (given("--t1")) cfg.t1 = from_cli.t1;
    if (given("--t2")) cfg.t2 = from_cli.t2;
    if (given("--theta-initial")) cfg.theta_initial = from_cli.theta_initial;
    if (given("--theta-final")) cfg.theta_final = from_cli.theta_final;
}

void parse_knots(const std::vector<std::string>& specs, RunConfig& cfg) {
    for (const std::string& spec : specs) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("knot '" + spec + "' is not of the form t:phi");
        }
        try {
            cfg.knots.push_back(isolato::PhiKnot{std::stod(spec.substr(0, colon)),
                                                 std::stod(spec.substr(colon + 1))});
        } catch (const std::exception&) {
            throw std::invalid_argument("knot '" + spec + "' is not of the form t:phi");
        }
    }
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text;
    if (!out) throw std::runtime_error("failed writing output file: " + out_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EPR-Bohm pair simulator with detection-based data rejection"};
    app.require_subcommand(1);

    RunConfig cfg;
    CommonFlags flags;
    std::vector<std::string> knot_specs;

    CLI::App* cmd_run = app.add_subcommand("run", "fixed-settings experiment, JSON report");
    cmd_run->add_option("--theta-a", cfg.theta_a, "analyzer angle at station A (radians)");
    cmd_run->add_option("--theta-b", cfg.theta_b, "analyzer angle at station B (radians)");

    CLI::App* cmd_chsh = app.add_subcommand("chsh", "four-setting CHSH run, JSON report");
    cmd_chsh->add_option("--a", cfg.chsh_a, "station A angle a");
    cmd_chsh->add_option("--a-prime", cfg.chsh_a_prime, "station A angle a'");
    cmd_chsh->add_option("--b", cfg.chsh_b, "station B angle b");
    cmd_chsh->add_option("--b-prime", cfg.chsh_b_prime, "station B angle b'");

    CLI::App* cmd_scan = app.add_subcommand("scan", "correlation sweep over delta, CSV output");
    cmd_scan->add_option("--points", cfg.scan_points, "grid points over [0, max-delta]");
    cmd_scan->add_option("--max-delta", cfg.scan_max_delta, "largest delta of the grid");

    CLI::App* cmd_oracle = app.add_subcommand("oracle", "analytic values and quadrature cross-check");
    cmd_oracle->add_option("--theta-a", cfg.theta_a, "angle for the probability table");
    cmd_oracle->add_option("--theta-b", cfg.theta_b, "angle for the probability table");
    cmd_oracle->add_option("--grid", cfg.oracle_grid, "angle grid size for the cross-check");

    CLI::App* cmd_delayed = app.add_subcommand("delayed", "time-varying A setting vs static run");
    cmd_delayed->add_option("--t0", cfg.t0, "emission time");
    cmd_delayed->add_option("--t1", cfg.t1, "arrival time at the apparatus");
    cmd_delayed->add_option("--t2", cfg.t2, "time the profile freezes");
    cmd_delayed->add_option("--theta-initial", cfg.theta_initial, "profile value at t0");
    cmd_delayed->add_option("--theta-final", cfg.theta_final, "frozen setting from t2 on");
    cmd_delayed->add_option("--theta-b", cfg.delayed_theta_b, "analyzer angle at station B");
    cmd_delayed->add_option("--knot", knot_specs, "profile knot t:phi (repeatable)")->take_all();

    for (CLI::App* cmd : {cmd_run, cmd_chsh, cmd_scan, cmd_oracle, cmd_delayed}) {
        add_common_options(cmd, cfg, flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* active = app.get_subcommands().front();
    cfg.command = active->get_name();

    try {
        apply_config_file(active, cfg, flags);
        if (!flags.variant.empty()) {
            cfg.variant = isolato::variant_from_string(flags.variant);
        }
        if (!flags.normalization.empty()) {
            cfg.normalization = isolato::normalization_from_string(flags.normalization);
        }
        if (!knot_specs.empty()) {
            cfg.knots.clear();
            parse_knots(knot_specs, cfg);
        }
        cfg.model_params().validate();

        emit(isolato::render_report(cfg), flags.out_path);
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 1;
    }
}
