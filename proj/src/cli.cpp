#include "loopsec/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "loopsec/config.hpp"
#include "loopsec/errors.hpp"
#include "loopsec/experiments.hpp"
#include "loopsec/oracle.hpp"

namespace loopsec {

namespace {

struct Options {
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string input;
    std::string scheme = "proposed";
    std::optional<std::size_t> trials;
    std::size_t grid = 2000;
    double tol = 1e-3;
};

// Writes to --out, else to $LOOPSEC_OUTPUT_DIR/<input stem>.<ext> when
// `use_env_dir` is set and the variable is defined, else to `out`.
void emit(const Options& opt, bool use_env_dir, std::ostream& out, const std::function<void(std::ostream&)>& body) {
    std::filesystem::path target;
    if (!opt.out_path.empty()) {
        target = opt.out_path;
    } else if (const char* dir = std::getenv(kOutputDirEnv); use_env_dir && dir != nullptr && *dir != '\0') {
        target = std::filesystem::path(dir) / std::filesystem::path(opt.input).stem();
        target += opt.format == "json" ? ".json" : ".csv";
    }
    if (target.empty()) {
        body(out);
        return;
    }
    if (target.has_parent_path()) {
        std::filesystem::create_directories(target.parent_path());
    }
    std::ofstream file(target, std::ios::binary);
    if (!file) {
        throw ConfigError(fmt::format("cannot write '{}'", target.string()));
    }
    body(file);
    if (!file) {
        throw ConfigError(fmt::format("write to '{}' failed", target.string()));
    }
}

std::string num(double v) {
    return fmt::format("{:.12g}", v);
}

void print_report(std::ostream& out, const std::string& format, Scheme scheme, const SolveReport& r) {
    const Allocation& a = r.allocation;
    const LoopMetrics& m = r.metrics;
    const std::vector<std::pair<std::string, double>> fields = {
        {"cne_bits", m.cne},           {"leakage_bits", m.leakage_weighted},
        {"d_u_bits", m.d_u},           {"d_d_bits", m.d_d},
        {"d_se_bits", m.d_se},         {"d_ce_bits", m.d_ce},
        {"p_u_w", a.p_u},              {"b_u_hz", a.b_u},
        {"t_u_s", a.t_u},              {"f_hz", a.f},
        {"p_d_w", a.p_d},              {"b_d_hz", a.b_d},
        {"t_d_s", a.t_d},              {"t_c_s", m.t_compute},
        {"objective", r.objective},    {"iterations", static_cast<double>(r.iterations)},
        {"solver_tolerance", r.solver_tolerance},
    };
    if (format == "json") {
        nlohmann::json j;
        j["scheme"] = std::string(to_string(scheme));
        j["case"] = std::string(to_string(r.channel_case.label));
        j["uplink_superior"] = r.channel_case.uplink_superior;
        j["downlink_superior"] = r.channel_case.downlink_superior;
        for (const auto& [k, v] : fields) {
            j[k] = v;
        }
        out << j.dump(2) << '\n';
        return;
    }
    out << "field,value\n";
    out << "scheme," << to_string(scheme) << '\n';
    out << "case," << to_string(r.channel_case.label) << '\n';
    for (const auto& [k, v] : fields) {
        out << k << ',' << num(v) << '\n';
    }
}

int run_solve(const Options& opt, std::ostream& out) {
    const ScenarioConfig cfg = load_scenario(opt.input);
    const Scenario s = cfg.to_scenario();
    const Scheme scheme = parse_scheme(opt.scheme);
    const SolveReport r = run_scheme(scheme, s, cfg.separate);
    emit(opt, false, out, [&](std::ostream& o) { print_report(o, opt.format, scheme, r); });
    return 0;
}

int run_sweep_cmd(const Options& opt, std::ostream& out) {
    const SweepSpec spec = load_sweep_spec(opt.input);
    const auto rows = run_sweep(spec);
    emit(opt, true, out, [&](std::ostream& o) {
        if (opt.format == "json") {
            write_rows_json(o, rows);
        } else {
            write_rows_csv(o, rows);
        }
    });
    return 0;
}

int run_monte_carlo_cmd(const Options& opt, std::ostream& out) {
    MonteCarloSpec spec = load_monte_carlo_spec(opt.input);
    if (opt.seed) {
        spec.seed = *opt.seed;
    }
    if (opt.trials) {
        spec.trials = *opt.trials;
    }
    const auto rows = run_monte_carlo(spec);
    emit(opt, true, out, [&](std::ostream& o) {
        if (opt.format == "json") {
            write_monte_carlo_json(o, spec.kind, rows);
        } else {
            write_monte_carlo_csv(o, spec.kind, rows);
        }
    });
    return 0;
}

int run_verify(const Options& opt, std::ostream& out) {
    const Scenario s = load_scenario(opt.input).to_scenario();
    const SolveReport r = solve(s);
    const auto grid = default_p2_grid(s, opt.grid);
    const OracleResult o = grid_search_p2(s, grid[0], grid[1]);
    const double gap = (o.cne - r.metrics.cne) / o.cne;
    const double time_used = r.allocation.t_u + r.metrics.t_compute + r.allocation.t_d;
    const bool feasible = r.metrics.leakage_weighted <= s.policy.d_th * (1.0 + 1e-6) &&
                          time_used <= s.limits.t_total * (1.0 + 1e-6);
    const bool pass = feasible && gap <= opt.tol;
    emit(opt, false, out, [&](std::ostream& os) {
        if (opt.format == "json") {
            nlohmann::json j{{"case", std::string(to_string(r.channel_case.label))},
                             {"solver_cne_bits", r.metrics.cne},
                             {"oracle_cne_bits", o.cne},
                             {"relative_gap", gap},
                             {"oracle_resolution", o.resolution},
                             {"tolerance", opt.tol},
                             {"solver_feasible", feasible},
                             {"pass", pass}};
            os << j.dump(2) << '\n';
        } else {
            os << "case,solver_cne_bits,oracle_cne_bits,relative_gap,oracle_resolution,tolerance,solver_feasible,"
                  "pass\n";
            os << to_string(r.channel_case.label) << ',' << num(r.metrics.cne) << ',' << num(o.cne) << ','
               << num(gap) << ',' << num(o.resolution) << ',' << num(opt.tol) << ',' << (feasible ? "true" : "false")
               << ',' << (pass ? "true" : "false") << '\n';
        }
    });
    return pass ? 0 : kExitVerify;
}

} // namespace

int cli_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Secure resource allocation for sensing-communication-computing-control loops"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Override the Monte Carlo seed");
    app.add_option("--out", opt.out_path, "Write output to this file");

    auto* solve_cmd = app.add_subcommand("solve", "Solve one scenario file");
    solve_cmd->add_option("scenario", opt.input, "Scenario file")->required();
    solve_cmd->add_option("--scheme", opt.scheme, "proposed, control_oriented or separate_links")
        ->check(CLI::IsMember({"proposed", "control_oriented", "separate_links"}));

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep spec");
    sweep_cmd->add_option("spec", opt.input, "Sweep spec file")->required();

    auto* mc_cmd = app.add_subcommand("montecarlo", "Run a Monte Carlo spec");
    mc_cmd->add_option("spec", opt.input, "Monte Carlo spec file")->required();
    std::size_t trials = 0;
    auto* trials_opt = mc_cmd->add_option("--trials", trials, "Override the trial count")->check(CLI::PositiveNumber);

    auto* verify_cmd = app.add_subcommand("verify", "Compare the solver against the grid oracle");
    verify_cmd->add_option("scenario", opt.input, "Scenario file")->required();
    verify_cmd->add_option("--grid", opt.grid, "Grid points per axis")->check(CLI::Range(2, 20000));
    verify_cmd->add_option("--tol", opt.tol, "Relative CNE tolerance")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code != 0) {
            err << app.help();
            return kExitUsage;
        }
        return 0;
    }
    if (*seed_opt) {
        opt.seed = seed;
    }
    if (*trials_opt) {
        opt.trials = trials;
    }

    try {
        if (*solve_cmd) {
            return run_solve(opt, out);
        }
        if (*sweep_cmd) {
            return run_sweep_cmd(opt, out);
        }
        if (*mc_cmd) {
            return run_monte_carlo_cmd(opt, out);
        }
        return run_verify(opt, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "solver error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace loopsec
