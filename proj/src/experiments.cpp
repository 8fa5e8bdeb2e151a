#include "loopsec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include <fmt/core.h>
#include <json.hpp>

#include "loopsec/baselines.hpp"
#include "loopsec/errors.hpp"

namespace loopsec {

namespace {

constexpr std::uint64_t kPlacementStream = 1;
constexpr std::uint64_t kCsiStream = 2;
constexpr std::uint64_t kFadingStream = 3;

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

std::string num(double v) {
    return fmt::format("{:.12g}", v);
}

// Mean and standard error of the finite entries, in index order.
struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
};

Summary summarize(const std::vector<double>& xs) {
    Summary s;
    double sum = 0.0;
    for (double x : xs) {
        if (!std::isnan(x)) {
            sum += x;
            ++s.count;
        }
    }
    if (s.count == 0) {
        s.mean = std::nan("");
        return s;
    }
    s.mean = sum / static_cast<double>(s.count);
    double ss = 0.0;
    for (double x : xs) {
        if (!std::isnan(x)) {
            ss += (x - s.mean) * (x - s.mean);
        }
    }
    if (s.count > 1) {
        s.stderr_mean = std::sqrt(ss / static_cast<double>(s.count - 1) / static_cast<double>(s.count));
    }
    return s;
}

std::string_view kind_name(MonteCarloKind kind) {
    switch (kind) {
    case MonteCarloKind::EavesdropperPlacement: return "multi_eve";
    case MonteCarloKind::CsiError: return "csi";
    case MonteCarloKind::RayleighFading: return "fading";
    }
    return "?";
}

std::string_view parameter_name(MonteCarloKind kind) {
    switch (kind) {
    case MonteCarloKind::EavesdropperPlacement: return "k";
    case MonteCarloKind::CsiError: return "mu";
    case MonteCarloKind::RayleighFading: return "none";
    }
    return "?";
}

// Realized weighted leakage minus the budget for one fading draw.
double residual(const Allocation& a, const ChannelGains& truth, const Scenario& s, double fading_power) {
    const double up = a.t_u * faded_rate(a.p_u, a.b_u, truth.g_se, truth.n0, fading_power);
    const double down = a.t_d * rate(a.p_d, a.b_d, truth.g_ce, truth.n0);
    return s.compute.rho * up + down - s.policy.d_th;
}

} // namespace

std::string_view to_string(Scheme scheme) noexcept {
    switch (scheme) {
    case Scheme::Proposed: return "proposed";
    case Scheme::ControlOrientedScaled: return "control_oriented";
    case Scheme::SeparateLinks: return "separate_links";
    }
    return "?";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "proposed") {
        return Scheme::Proposed;
    }
    if (name == "control_oriented") {
        return Scheme::ControlOrientedScaled;
    }
    if (name == "separate_links") {
        return Scheme::SeparateLinks;
    }
    throw ConfigError(fmt::format("unknown scheme '{}'", name));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers =
        std::min<std::size_t>(n, std::max(1U, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

SolveReport run_scheme(Scheme scheme, const Scenario& scenario, const SeparateLinksOptions& separate) {
    switch (scheme) {
    case Scheme::Proposed: return solve(scenario);
    case Scheme::ControlOrientedScaled: return control_oriented_scaled(scenario);
    case Scheme::SeparateLinks: return separate_links(scenario, separate);
    }
    throw InvalidArgument("unknown scheme");
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    if (!ScenarioConfig::is_key(spec.parameter)) {
        throw ConfigError(fmt::format("sweep parameter '{}' is not a scenario key", spec.parameter));
    }
    SeparateLinksOptions separate = spec.base.separate;
    const bool needs_separate = std::find(spec.schemes.begin(), spec.schemes.end(), Scheme::SeparateLinks) !=
                                spec.schemes.end();
    if (needs_separate && (!separate.split || !separate.downlink_time)) {
        separate = resolve_separate_options(spec.base.to_scenario(), separate);
    }

    const std::size_t per_point = spec.schemes.size();
    std::vector<ResultRow> rows(spec.values.size() * per_point);
    parallel_for(rows.size(), [&](std::size_t idx) {
        const double value = spec.values[idx / per_point];
        const Scheme scheme = spec.schemes[idx % per_point];
        ResultRow& row = rows[idx];
        row.swept_value = value;
        row.scheme = scheme;
        try {
            ScenarioConfig cfg = spec.base;
            cfg.set(spec.parameter, value);
            row.report = run_scheme(scheme, cfg.to_scenario(), separate);
        } catch (const Error& e) {
            row.error = e.what();
        }
    });
    return rows;
}

std::vector<ResultRow> run_eve_scan(const std::vector<double>& x_values, const ScenarioConfig& base) {
    SweepSpec spec;
    spec.parameter = "eve_x_m";
    spec.values = x_values;
    spec.base = base;
    spec.schemes = {Scheme::Proposed};
    return run_sweep(spec);
}

std::vector<MonteCarloRow> run_multi_eve(const MonteCarloSpec& spec) {
    if (spec.trials < 1 || spec.k_values.empty()) {
        throw InvalidArgument("multi-eavesdropper run needs trials >= 1 and at least one K");
    }
    const int k_max = *std::max_element(spec.k_values.begin(), spec.k_values.end());
    if (*std::min_element(spec.k_values.begin(), spec.k_values.end()) < 1) {
        throw InvalidArgument("K must be >= 1");
    }
    const Scenario nominal = spec.base.to_scenario();
    const Geometry& geo = spec.base.geometry;
    const PathLossModel& pl = spec.base.path_loss;
    const PlacementRegion& reg = spec.region;
    const std::size_t nk = spec.k_values.size();

    std::vector<double> cne(spec.trials * nk, std::nan(""));
    parallel_for(spec.trials, [&](std::size_t trial) {
        auto rng = trial_rng(spec.seed, trial, kPlacementStream);
        std::uniform_real_distribution<double> ux(reg.x_min, reg.x_max);
        std::uniform_real_distribution<double> uy(reg.y_min, reg.y_max);
        std::vector<double> ground(static_cast<std::size_t>(k_max));
        std::vector<double> air(static_cast<std::size_t>(k_max));
        for (int k = 0; k < k_max; ++k) {
            const double x = reg.x_min < reg.x_max ? ux(rng) : reg.x_min;
            const double y = reg.y_min < reg.y_max ? uy(rng) : reg.y_min;
            const Position3 e{x, y, reg.z};
            ground[k] = path_loss_gain(geo.sensor, e, pl.kappa_ground, pl.eta_ground);
            air[k] = path_loss_gain(geo.hub, e, pl.kappa_air, pl.eta_air);
        }
        for (std::size_t ki = 0; ki < nk; ++ki) {
            const auto k = static_cast<std::size_t>(spec.k_values[ki]);
            Scenario s = nominal;
            s.gains.g_se = *std::max_element(ground.begin(), ground.begin() + static_cast<long>(k));
            s.gains.g_ce = *std::max_element(air.begin(), air.begin() + static_cast<long>(k));
            try {
                cne[trial * nk + ki] = solve(s).metrics.cne;
            } catch (const Error&) {
            }
        }
    });

    std::vector<MonteCarloRow> out;
    for (std::size_t ki = 0; ki < nk; ++ki) {
        std::vector<double> xs(spec.trials);
        for (std::size_t t = 0; t < spec.trials; ++t) {
            xs[t] = cne[t * nk + ki];
        }
        const Summary sm = summarize(xs);
        out.push_back({static_cast<double>(spec.k_values[ki]), spec.trials, spec.trials - sm.count, sm.mean,
                       sm.stderr_mean, 0.0});
    }
    return out;
}

std::vector<MonteCarloRow> run_csi_mc(const MonteCarloSpec& spec) {
    if (spec.trials < 1 || spec.mu_values.empty()) {
        throw InvalidArgument("CSI run needs trials >= 1 and at least one mu");
    }
    for (double mu : spec.mu_values) {
        if (!(mu >= 0.0)) {
            throw InvalidArgument("mu must be non-negative");
        }
    }
    const Scenario truth = spec.base.to_scenario();
    const std::size_t nm = spec.mu_values.size();
    std::vector<double> cne(spec.trials * nm, std::nan(""));
    std::vector<double> res(spec.trials * nm, std::nan(""));

    parallel_for(spec.trials, [&](std::size_t trial) {
        auto rng = trial_rng(spec.seed, trial, kCsiStream);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::exponential_distribution<double> fading(1.0);
        std::array<double, 4> z{};
        for (double& v : z) {
            v = normal(rng);
        }
        const double xi2 = fading(rng);
        // The same standard-normal draws are scaled by every mu.
        for (std::size_t mi = 0; mi < nm; ++mi) {
            const double mu = spec.mu_values[mi];
            std::array<double, 4> factor{};
            for (std::size_t i = 0; i < 4; ++i) {
                double zi = z[i];
                while (1.0 + mu * zi <= 1e-6) {
                    zi = normal(rng);
                }
                factor[i] = 1.0 + mu * zi;
            }
            Scenario est = truth;
            est.gains.g_u *= factor[0];
            est.gains.g_d *= factor[1];
            est.gains.g_se *= factor[2];
            est.gains.g_ce *= factor[3];
            try {
                const SolveReport r = solve(est);
                cne[trial * nm + mi] = evaluate(r.allocation, truth.gains, truth.compute).cne;
                res[trial * nm + mi] = residual(r.allocation, truth.gains, truth, xi2);
            } catch (const Error&) {
            }
        }
    });

    std::vector<MonteCarloRow> out;
    for (std::size_t mi = 0; mi < nm; ++mi) {
        std::vector<double> xs(spec.trials);
        std::vector<double> rs(spec.trials);
        for (std::size_t t = 0; t < spec.trials; ++t) {
            xs[t] = cne[t * nm + mi];
            rs[t] = res[t * nm + mi];
        }
        const Summary sm = summarize(xs);
        out.push_back({spec.mu_values[mi], spec.trials, spec.trials - sm.count, sm.mean, sm.stderr_mean,
                       summarize(rs).mean});
    }
    return out;
}

std::vector<MonteCarloRow> run_fading_mc(const MonteCarloSpec& spec) {
    if (spec.trials < 1) {
        throw InvalidArgument("fading run needs trials >= 1");
    }
    const Scenario s = spec.base.to_scenario();
    const SolveReport r = solve(s);
    std::vector<double> res(spec.trials);
    parallel_for(spec.trials, [&](std::size_t trial) {
        auto rng = trial_rng(spec.seed, trial, kFadingStream);
        std::exponential_distribution<double> fading(1.0);
        res[trial] = residual(r.allocation, s.gains, s, fading(rng));
    });
    const Summary sm = summarize(res);
    return {{0.0, spec.trials, 0, r.metrics.cne, 0.0, sm.mean}};
}

std::vector<MonteCarloRow> run_monte_carlo(const MonteCarloSpec& spec) {
    switch (spec.kind) {
    case MonteCarloKind::EavesdropperPlacement: return run_multi_eve(spec);
    case MonteCarloKind::CsiError: return run_csi_mc(spec);
    case MonteCarloKind::RayleighFading: return run_fading_mc(spec);
    }
    throw InvalidArgument("unknown Monte Carlo kind");
}

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "swept_value,scheme,cne_bits,leakage_bits,case,p_u_w,b_u_hz,t_u_s,p_d_w,b_d_hz,t_d_s,t_c_s,objective\n";
    for (const ResultRow& row : rows) {
        out << num(row.swept_value) << ',' << to_string(row.scheme) << ',';
        if (!row.report) {
            out << "nan,nan,error,nan,nan,nan,nan,nan,nan,nan,nan\n";
            continue;
        }
        const SolveReport& r = *row.report;
        const Allocation& a = r.allocation;
        out << num(r.metrics.cne) << ',' << num(r.metrics.leakage_weighted) << ',' << to_string(r.channel_case.label)
            << ',' << num(a.p_u) << ',' << num(a.b_u) << ',' << num(a.t_u) << ',' << num(a.p_d) << ','
            << num(a.b_d) << ',' << num(a.t_d) << ',' << num(r.metrics.t_compute) << ',' << num(r.objective)
            << '\n';
    }
}

void write_rows_json(std::ostream& out, const std::vector<ResultRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ResultRow& row : rows) {
        nlohmann::json j;
        j["swept_value"] = row.swept_value;
        j["scheme"] = std::string(to_string(row.scheme));
        if (!row.report) {
            j["error"] = row.error;
        } else {
            const SolveReport& r = *row.report;
            const Allocation& a = r.allocation;
            j["cne_bits"] = r.metrics.cne;
            j["leakage_bits"] = r.metrics.leakage_weighted;
            j["case"] = std::string(to_string(r.channel_case.label));
            j["p_u_w"] = a.p_u;
            j["b_u_hz"] = a.b_u;
            j["t_u_s"] = a.t_u;
            j["p_d_w"] = a.p_d;
            j["b_d_hz"] = a.b_d;
            j["t_d_s"] = a.t_d;
            j["t_c_s"] = r.metrics.t_compute;
            j["objective"] = r.objective;
            j["iterations"] = r.iterations;
        }
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
}

void write_monte_carlo_csv(std::ostream& out, MonteCarloKind kind, const std::vector<MonteCarloRow>& rows) {
    out << parameter_name(kind) << ",trials,failures,mean_cne_bits,stderr_cne_bits,mean_residual_bits\n";
    for (const MonteCarloRow& r : rows) {
        out << num(r.parameter) << ',' << r.trials << ',' << r.failures << ',' << num(r.mean_cne) << ','
            << num(r.stderr_cne) << ',' << num(r.mean_residual) << '\n';
    }
}

void write_monte_carlo_json(std::ostream& out, MonteCarloKind kind, const std::vector<MonteCarloRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const MonteCarloRow& r : rows) {
        arr.push_back({{"kind", std::string(kind_name(kind))},
                       {std::string(parameter_name(kind)), r.parameter},
                       {"trials", r.trials},
                       {"failures", r.failures},
                       {"mean_cne_bits", r.mean_cne},
                       {"stderr_cne_bits", r.stderr_cne},
                       {"mean_residual_bits", r.mean_residual}});
    }
    out << arr.dump(2) << '\n';
}

namespace {

void reject_unknown(const KeyValues& kv, const std::vector<std::string>& extra, const std::filesystem::path& path) {
    for (const auto& [key, value] : kv) {
        if (!ScenarioConfig::is_key(key) && std::find(extra.begin(), extra.end(), key) == extra.end()) {
            throw ConfigError(fmt::format("{}: unknown key '{}'", path.string(), key));
        }
    }
}

const std::string& required(const KeyValues& kv, const std::string& key, const std::filesystem::path& path) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw ConfigError(fmt::format("{}: missing key '{}'", path.string(), key));
    }
    return it->second;
}

std::vector<std::string> split_names(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    for (char ch : value + ",") {
        if (ch == ',') {
            const auto a = item.find_first_not_of(" \t");
            const auto b = item.find_last_not_of(" \t");
            if (a != std::string::npos) {
                out.push_back(item.substr(a, b - a + 1));
            }
            item.clear();
        } else {
            item += ch;
        }
    }
    return out;
}

} // namespace

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
    const KeyValues kv = read_key_values(path);
    reject_unknown(kv, {"sweep_parameter", "sweep_values", "schemes"}, path);
    SweepSpec spec;
    spec.base = ScenarioConfig::defaults();
    spec.base.apply(kv);
    spec.parameter = required(kv, "sweep_parameter", path);
    if (!ScenarioConfig::is_key(spec.parameter)) {
        throw ConfigError(fmt::format("{}: sweep parameter '{}' is not a scenario key", path.string(), spec.parameter));
    }
    spec.values = parse_number_list("sweep_values", required(kv, "sweep_values", path));
    if (const auto it = kv.find("schemes"); it != kv.end()) {
        spec.schemes.clear();
        for (const std::string& name : split_names(it->second)) {
            spec.schemes.push_back(parse_scheme(name));
        }
        if (spec.schemes.empty()) {
            throw ConfigError(fmt::format("{}: empty scheme list", path.string()));
        }
    }
    return spec;
}

MonteCarloSpec load_monte_carlo_spec(const std::filesystem::path& path) {
    const KeyValues kv = read_key_values(path);
    reject_unknown(kv,
                   {"mc_kind", "trials", "seed", "k_values", "mu_values", "region_x_min_m", "region_x_max_m",
                    "region_y_min_m", "region_y_max_m", "region_z_m"},
                   path);
    MonteCarloSpec spec;
    spec.base = ScenarioConfig::defaults();
    spec.base.apply(kv);
    const std::string& kind = required(kv, "mc_kind", path);
    if (kind == "multi_eve") {
        spec.kind = MonteCarloKind::EavesdropperPlacement;
    } else if (kind == "csi") {
        spec.kind = MonteCarloKind::CsiError;
        spec.trials = 10000;
    } else if (kind == "fading") {
        spec.kind = MonteCarloKind::RayleighFading;
    } else {
        throw ConfigError(fmt::format("{}: unknown mc_kind '{}'", path.string(), kind));
    }
    auto count = [&](const std::string& key, double v) {
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
            throw ConfigError(fmt::format("{}: '{}' must be a non-negative integer", path.string(), key));
        }
        return v;
    };
    if (const auto it = kv.find("trials"); it != kv.end()) {
        spec.trials = static_cast<std::size_t>(count("trials", parse_number("trials", it->second)));
    }
    if (const auto it = kv.find("seed"); it != kv.end()) {
        spec.seed = static_cast<std::uint64_t>(count("seed", parse_number("seed", it->second)));
    }
    if (const auto it = kv.find("k_values"); it != kv.end()) {
        spec.k_values.clear();
        for (double k : parse_number_list("k_values", it->second)) {
            spec.k_values.push_back(static_cast<int>(count("k_values", k)));
        }
    }
    if (const auto it = kv.find("mu_values"); it != kv.end()) {
        spec.mu_values = parse_number_list("mu_values", it->second);
    }
    auto region = [&](const char* key, double& slot) {
        if (const auto it = kv.find(key); it != kv.end()) {
            slot = parse_number(key, it->second);
        }
    };
    region("region_x_min_m", spec.region.x_min);
    region("region_x_max_m", spec.region.x_max);
    region("region_y_min_m", spec.region.y_min);
    region("region_y_max_m", spec.region.y_max);
    region("region_z_m", spec.region.z);
    if (spec.region.x_min > spec.region.x_max || spec.region.y_min > spec.region.y_max) {
        throw ConfigError(fmt::format("{}: placement region bounds out of order", path.string()));
    }
    return spec;
}

} // namespace loopsec
