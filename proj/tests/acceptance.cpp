// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "loopsec/baselines.hpp"
#include "loopsec/cli.hpp"
#include "loopsec/errors.hpp"
#include "loopsec/experiments.hpp"
#include "loopsec/kkt_solver.hpp"
#include "loopsec/mo_solver.hpp"
#include "loopsec/oracle.hpp"
#include "support.hpp"

using namespace loopsec;
using loopsec::testing::random_scenario;

namespace {

const std::string kScenarioDir = LOOPSEC_SCENARIO_DIR;

struct Verdict {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

CaseIProblem case1_problem(const Scenario& s) {
    return {s.gains, s.limits, s.compute, s.policy, 1e-10};
}

std::vector<Scenario> scenarios_for(CaseLabel label, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Scenario> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(random_scenario(rng, label));
    }
    return out;
}

// CNE per scheme per sweep value, in sweep order.
struct SweepTable {
    std::vector<double> values;
    std::vector<std::vector<double>> cne; // [scheme][value]
    std::vector<Scheme> schemes;

    [[nodiscard]] const std::vector<double>& of(Scheme s) const {
        return cne[static_cast<std::size_t>(std::find(schemes.begin(), schemes.end(), s) - schemes.begin())];
    }
};

SweepTable run_table(const SweepSpec& spec) {
    const std::vector<ResultRow> rows = run_sweep(spec);
    SweepTable t{spec.values, std::vector<std::vector<double>>(spec.schemes.size()), spec.schemes};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].report) {
            throw InternalError(fmt::format("sweep point {} failed: {}", rows[i].swept_value, rows[i].error));
        }
        t.cne[i % spec.schemes.size()].push_back(rows[i].report->metrics.cne);
    }
    return t;
}

SweepSpec sweep_file(const std::string& name) {
    return load_sweep_spec(kScenarioDir + "/" + name);
}

double rel(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

Verdict oracle_case1() {
    const std::vector<Scenario> ss = scenarios_for(CaseLabel::I, 100, 1001);
    double solver_time = 0.0;
    double oracle_time = 0.0;
    double worst = 0.0;
    for (const Scenario& s : ss) {
        auto t0 = Clock::now();
        const CaseISolution sol = solve_case1(case1_problem(s));
        solver_time += seconds_since(t0);
        t0 = Clock::now();
        const auto grid = default_p2_grid(s, 2000);
        const OracleResult o = grid_search_p2(s, grid[0], grid[1]);
        oracle_time += seconds_since(t0);
        worst = std::max(worst, rel(sol.objective, o.objective));
    }
    return {worst <= 1e-3 && solver_time < 5.0 && oracle_time < 300.0,
            fmt::format("max relative gap {:.3g} (limit 1e-3), solver {:.3f} s, oracle {:.1f} s", worst,
                        solver_time, oracle_time)};
}

Verdict oracle_mo_cases() {
    double worst_excess = -std::numeric_limits<double>::infinity();
    double slowest = 0.0;
    std::size_t most_iterations = 0;
    int failures = 0;
    std::uint64_t seed = 2001;
    for (CaseLabel label : {CaseLabel::II, CaseLabel::III, CaseLabel::IV}) {
        for (const Scenario& s : scenarios_for(label, 50, seed++)) {
            const MoProblem prob = build_mo_problem(label, s);
            const auto t0 = Clock::now();
            PolyblockResult r;
            try {
                r = polyblock_iterate(prob);
            } catch (const NonConvergence&) {
                ++failures;
                continue;
            }
            slowest = std::max(slowest, seconds_since(t0));
            most_iterations = std::max(most_iterations, r.iterations);
            const auto grid = default_p2_grid(s, 2000);
            const OracleResult o = grid_search_p2(s, grid[0], grid[1]);
            const double excess = std::abs(-r.value - o.objective) - (prob.epsilon + o.resolution);
            worst_excess = std::max(worst_excess, excess);
        }
    }
    return {failures == 0 && worst_excess <= 0.0 && slowest < 10.0 && most_iterations <= 100000,
            fmt::format("worst |gap| - (eps + resolution) = {:.3g}, slowest {:.3f} s, max {} iterations, {} "
                        "non-converged",
                        worst_excess, slowest, most_iterations, failures)};
}

Verdict structure_theorem() {
    const std::size_t n = 40;
    const std::size_t top = n - 1;
    int misses = 0;
    int total = 0;
    std::uint64_t seed = 3001;
    for (CaseLabel label : {CaseLabel::I, CaseLabel::II, CaseLabel::III, CaseLabel::IV}) {
        for (const Scenario& s : scenarios_for(label, 20, seed++)) {
            const OracleResult o = grid_search_full(s, default_full_grid(s, n));
            const auto& k = o.index; // (p_u, b_u, p_d, b_d)
            bool on_face = false;
            switch (label) {
            case CaseLabel::I: on_face = k[1] == top && k[3] == top; break;
            case CaseLabel::II: on_face = k[0] == top && k[2] == top; break;
            case CaseLabel::III: on_face = k[1] == top && k[2] == top; break;
            case CaseLabel::IV: on_face = k[0] == top && k[3] == top; break;
            case CaseLabel::Unconstrained: break;
            }
            misses += on_face ? 0 : 1;
            ++total;
        }
    }
    return {misses == 0, fmt::format("{} of {} full-grid optima on the predicted face ({} points per axis)",
                                     total - misses, total, n)};
}

Verdict tightness() {
    std::vector<Scenario> ss;
    std::uint64_t seed = 4001;
    for (CaseLabel label : {CaseLabel::I, CaseLabel::II, CaseLabel::III, CaseLabel::IV}) {
        for (const Scenario& s : scenarios_for(label, 50, seed++)) {
            ss.push_back(s);
        }
    }
    for (const std::string& file :
         {"sweep_bandwidth.txt", "sweep_uplink_power.txt", "sweep_leakage_budget.txt", "sweep_compute.txt",
          "scan_eavesdropper_x.txt", "superior_eve_bandwidth.txt", "superior_eve_leakage_budget.txt"}) {
        const SweepSpec spec = sweep_file(file);
        for (double v : spec.values) {
            ScenarioConfig cfg = spec.base;
            cfg.set(spec.parameter, v);
            ss.push_back(cfg.to_scenario());
        }
    }
    int constrained = 0;
    double worst_leak = 0.0;
    double worst_time = 0.0;
    for (const Scenario& s : ss) {
        const SolveReport r = solve(s);
        if (r.channel_case.label == CaseLabel::Unconstrained) {
            continue;
        }
        ++constrained;
        const Allocation& a = r.allocation;
        worst_leak = std::max(worst_leak, std::abs(r.metrics.leakage_weighted - s.policy.d_th) / s.policy.d_th);
        worst_time =
            std::max(worst_time, std::abs(a.t_u + r.metrics.t_compute + a.t_d - s.limits.t_total) / s.limits.t_total);
    }
    return {worst_leak <= 1e-6 && worst_time <= 1e-6,
            fmt::format("{} constrained solves, worst leakage residual {:.3g}, worst time residual {:.3g} (limit "
                        "1e-6 relative)",
                        constrained, worst_leak, worst_time)};
}

Verdict bandwidth_crossover() {
    const SweepTable t = run_table(sweep_file("sweep_bandwidth.txt"));
    const auto& prop = t.of(Scheme::Proposed);
    const auto& co = t.of(Scheme::ControlOrientedScaled);
    bool low_agree = true;
    bool high_exceed = true;
    double crossover = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        const double b = t.values[i];
        const double gain = (prop[i] - co[i]) / co[i];
        if (b <= 14000.0 && gain > 1e-3) {
            low_agree = false;
        }
        if (b >= 18000.0 && !(gain > 1e-2)) {
            high_exceed = false;
        }
        if (std::isnan(crossover) && gain > 1e-3) {
            crossover = b;
        }
    }
    const bool located = crossover >= 14000.0 && crossover <= 18000.0;
    return {low_agree && high_exceed && located,
            fmt::format("first bandwidth cap with proposed > control-oriented by 0.1%: {} Hz (required in [14000, "
                        "18000]); agree below 14 kHz: {}; > 1% above 18 kHz: {}",
                        crossover, low_agree, high_exceed)};
}

Verdict leakage_regimes() {
    const SweepTable t = run_table(sweep_file("sweep_leakage_budget.txt"));
    auto at = [&](const std::vector<double>& col, double v) {
        return col[static_cast<std::size_t>(std::find(t.values.begin(), t.values.end(), v) - t.values.begin())];
    };
    double spread = 0.0;
    for (double v : {600.0, 700.0, 800.0}) {
        for (Scheme s : t.schemes) {
            spread = std::max(spread, rel(at(t.of(s), v), at(t.of(Scheme::Proposed), 600.0)));
        }
    }
    std::vector<double> x;
    std::vector<double> y;
    for (double v = 50.0; v <= 300.0; v += 50.0) {
        x.push_back(v);
        y.push_back(at(t.of(Scheme::ControlOrientedScaled), v));
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double cov = sxy - sx * sy / n;
    const double r2 = cov * cov / ((sxx - sx * sx / n) * (syy - sy * sy / n));
    return {spread <= 1e-3 && r2 >= 0.999,
            fmt::format("max spread over schemes and budgets 600-800 bits {:.3g} (limit 1e-3); control-oriented "
                        "linear fit R^2 = {:.9f} (limit 0.999)",
                        spread, r2)};
}

Verdict eavesdropper_scan() {
    const SweepSpec spec = sweep_file("scan_eavesdropper_x.txt");
    const SweepTable t = run_table(spec);
    const auto& cne = t.of(Scheme::Proposed);
    const std::size_t k = static_cast<std::size_t>(std::min_element(cne.begin(), cne.end()) - cne.begin());
    const double x_min = t.values[k];
    return {std::abs(x_min + 500.0) <= 50.0,
            fmt::format("CNE minimum {:.4f} bits at eavesdropper x = {} m (required -500 +/- 50 m); CNE at -500 m "
                        "is {:.4f} bits",
                        cne[k], x_min,
                        cne[static_cast<std::size_t>(std::find(t.values.begin(), t.values.end(), -500.0) -
                                                     t.values.begin())])};
}

Verdict uplink_power_directions() {
    const SweepTable t = run_table(sweep_file("sweep_uplink_power.txt"));
    // Consecutive values may differ only at the solver's relative power tolerance.
    const double slack = 1e-9;
    const auto& prop = t.of(Scheme::Proposed);
    const auto& co = t.of(Scheme::ControlOrientedScaled);
    const auto& sep = t.of(Scheme::SeparateLinks);
    int prop_bad = 0;
    int co_bad = 0;
    for (std::size_t i = 1; i < t.values.size(); ++i) {
        prop_bad += prop[i] < prop[i - 1] * (1.0 - slack) ? 1 : 0;
        co_bad += co[i] > co[i - 1] * (1.0 + slack) ? 1 : 0;
    }
    const auto [lo, hi] = std::minmax_element(sep.begin(), sep.end());
    const double variation = (*hi - *lo) / *hi;
    return {prop_bad == 0 && co_bad == 0 && variation <= 1e-4,
            fmt::format("proposed decreases {} times, control-oriented increases {} times, separate-links "
                        "variation {:.3g} (limit 1e-4)",
                        prop_bad, co_bad, variation)};
}

Verdict monte_carlo_monotonicity() {
    const auto t0 = Clock::now();
    const auto multi = run_monte_carlo(load_monte_carlo_spec(kScenarioDir + "/mc_multi_eve.txt"));
    const auto csi = run_monte_carlo(load_monte_carlo_spec(kScenarioDir + "/mc_csi_error.txt"));
    const double elapsed = seconds_since(t0);
    int k_bad = 0;
    for (std::size_t i = 1; i < multi.size(); ++i) {
        k_bad += multi[i].mean_cne > multi[i - 1].mean_cne ? 1 : 0;
    }
    int mu_bad = 0;
    for (std::size_t i = 1; i < csi.size(); ++i) {
        mu_bad += csi[i].mean_cne > csi[i - 1].mean_cne ? 1 : 0;
    }
    const double residual0 = csi.front().mean_residual;
    std::string means;
    for (const auto& r : multi) {
        means += fmt::format("{}{:.2f}", means.empty() ? "" : "/", r.mean_cne);
    }
    std::string mu_means;
    for (const auto& r : csi) {
        mu_means += fmt::format("{}{:.2f}", mu_means.empty() ? "" : "/", r.mean_cne);
    }
    return {k_bad == 0 && mu_bad == 0 && residual0 <= 0.0 && elapsed < 600.0,
            fmt::format("mean CNE by K {} ({} rises), by mu {} ({} rises), residual at mu=0 {:.4f} bits, {:.1f} s",
                        means, k_bad, mu_means, mu_bad, residual0, elapsed)};
}

Verdict derivative_certification() {
    std::mt19937_64 rng(10001);
    std::uniform_real_distribution<double> lp(-8.0, 0.0);
    const Scenario s = testing::default_scenario();
    const CaseIProblem prob = case1_problem(s);
    int fd_bad = 0;
    const std::pair<AuxFunction, AuxFunction> pairs[] = {{AuxFunction::F1, AuxFunction::DF1},
                                                         {AuxFunction::F2, AuxFunction::DF2},
                                                         {AuxFunction::H1, AuxFunction::DH1},
                                                         {AuxFunction::H2, AuxFunction::DH2}};
    for (const auto& [fn, dfn] : pairs) {
        for (int i = 0; i < 100; ++i) {
            const double p = std::pow(10.0, lp(rng));
            const double h = 1e-5 * p;
            const double fd = (aux_eval(fn, p + h, prob) - aux_eval(fn, p - h, prob)) / (2.0 * h);
            fd_bad += rel(aux_eval(dfn, p, prob), fd) > 1e-6 ? 1 : 0;
        }
    }
    for (int i = 0; i < 100; ++i) {
        const double p = std::pow(10.0, lp(rng));
        const double h = 1e-5 * p;
        const ChannelGains& g = s.gains;
        const double fd = (rate(p + h, 2e4, g.g_u, g.n0) - rate(p - h, 2e4, g.g_u, g.n0)) / (2.0 * h);
        fd_bad += rel(rate_power_derivative(p, 2e4, g.g_u, g.n0), fd) > 1e-6 ? 1 : 0;
    }

    // Leakage ratio R_e / R: rises with power and falls with bandwidth when the
    // legitimate gain is larger, the reverse when the eavesdropper's is.
    int ratio_bad = 0;
    const double n0 = s.gains.n0;
    for (const auto& [g, g_e] : {std::pair{1e-10, 1e-12}, std::pair{1e-12, 1e-10}}) {
        const bool legit = g > g_e;
        double prev_p = rate(1e-6, 2e4, g_e, n0) / rate(1e-6, 2e4, g, n0);
        double prev_b = rate(1.0, 100.0, g_e, n0) / rate(1.0, 100.0, g, n0);
        for (int i = 1; i < 1000; ++i) {
            const double p = 1e-6 * std::pow(1e7, i / 999.0);
            const double b = 100.0 * std::pow(1e4, i / 999.0);
            const double rp = rate(p, 2e4, g_e, n0) / rate(p, 2e4, g, n0);
            const double rb = rate(1.0, b, g_e, n0) / rate(1.0, b, g, n0);
            ratio_bad += (legit ? rp <= prev_p : rp >= prev_p) ? 1 : 0;
            ratio_bad += (legit ? rb >= prev_b : rb <= prev_b) ? 1 : 0;
            prev_p = rp;
            prev_b = rb;
        }
    }

    // Derivative ratio strictly decreasing; stationarity curve rising and
    // tight-constraint curve falling in the uplink power.
    int curve_bad = 0;
    double prev_phi = std::numeric_limits<double>::infinity();
    double prev_c1 = 0.0;
    double prev_c2 = std::numeric_limits<double>::infinity();
    std::size_t iters = 0;
    int c2_points = 0;
    for (int i = 0; i < 1000; ++i) {
        const double p_u = 0.05 * std::pow(400.0, i / 999.0);
        const double phi = aux_eval(AuxFunction::DF1, p_u, prob) / aux_eval(AuxFunction::DH1, p_u, prob);
        curve_bad += phi < prev_phi ? 0 : 1;
        prev_phi = phi;
        double lo = 1e-15;
        double hi = 1e6;
        for (int k = 0; k < 200; ++k) {
            const double mid = std::sqrt(lo * hi);
            (stationarity_gap(p_u, mid, prob) < 0.0 ? lo : hi) = mid;
        }
        curve_bad += hi < prev_c1 * (1.0 - 1e-9) ? 1 : 0;
        prev_c1 = hi;
        if (const auto c2 = tight_downlink_power(p_u, prob, iters)) {
            ++c2_points;
            curve_bad += *c2 > prev_c2 * (1.0 + 1e-9) ? 1 : 0;
            prev_c2 = *c2;
        }
    }
    return {fd_bad == 0 && ratio_bad == 0 && curve_bad == 0 && c2_points > 500,
            fmt::format("{} finite-difference mismatches over 500 points, {} ratio-direction violations over 4 "
                        "scans, {} curve-monotonicity violations over 1000 points",
                        fd_bad, ratio_bad, curve_bad)};
}

Verdict jensen_bound() {
    std::mt19937_64 rng(11001);
    std::uniform_real_distribution<double> lp(-2.0, 0.0);
    std::uniform_real_distribution<double> lb(3.0, std::log10(2e4));
    std::uniform_real_distribution<double> lg(-16.0, -10.0);
    std::exponential_distribution<double> fade(1.0);
    const double n0 = dbm_per_hz_to_watts_per_hz(-174.0);
    int violations = 0;
    double worst_z = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < 20; ++t) {
        const double p = std::pow(10.0, lp(rng));
        const double b = std::pow(10.0, lb(rng));
        const double g = std::pow(10.0, lg(rng));
        double sum = 0.0;
        double sum_sq = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const double r = faded_rate(p, b, g, n0, fade(rng));
            sum += r;
            sum_sq += r * r;
        }
        const double mean = sum / n;
        const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
        const double bound = eavesdrop_rate_upper_bound(p, b, g, n0);
        const double z = (mean - bound) / se;
        worst_z = std::max(worst_z, z);
        violations += z > 3.0 ? 1 : 0;
    }
    return {violations == 0,
            fmt::format("{} of 20 triples exceed the bound by more than 3 standard errors (largest excess {:.2f} "
                        "standard errors)",
                        violations, worst_z)};
}

std::string cli_output(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"loopsec"};
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code != 0) {
        throw InternalError(fmt::format("command failed with exit code {}: {}", code, err.str()));
    }
    return out.str();
}

Verdict determinism() {
    const std::vector<std::vector<std::string>> runs{
        {"sweep", kScenarioDir + "/sweep_bandwidth.txt"},
        {"--seed", "7", "montecarlo", kScenarioDir + "/mc_multi_eve.txt", "--trials", "100"},
        {"--seed", "7", "montecarlo", kScenarioDir + "/mc_csi_error.txt", "--trials", "2000"},
    };
    int differing = 0;
    std::size_t bytes = 0;
    for (const auto& args : runs) {
        const std::string a = cli_output(args);
        const std::string b = cli_output(args);
        differing += a == b ? 0 : 1;
        bytes += a.size();
    }
    return {differing == 0, fmt::format("{} of {} repeated CSV outputs differ ({} bytes compared per run)",
                                        differing, runs.size(), bytes)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"oracle equivalence, both links legitimate-superior", oracle_case1},
        {"oracle equivalence, remaining channel cases", oracle_mo_cases},
        {"full-grid optimum on the predicted box face", structure_theorem},
        {"leakage and time budgets tight", tightness},
        {"bandwidth-cap crossover", bandwidth_crossover},
        {"leakage-budget regimes", leakage_regimes},
        {"eavesdropper-position minimum", eavesdropper_scan},
        {"uplink-power trends", uplink_power_directions},
        {"Monte Carlo monotonicity", monte_carlo_monotonicity},
        {"analytic derivatives and monotonicity", derivative_certification},
        {"faded eavesdropping-rate bound", jensen_bound},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [name, run] = criteria[i];
        Verdict v;
        const auto t0 = Clock::now();
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, fmt::format("threw: {}", e.what())};
        }
        failed += v.pass ? 0 : 1;
        std::cout << fmt::format("{} {:>2} {}: {} [{:.1f} s]", v.pass ? "PASS" : "FAIL", i + 1, name, v.detail,
                                 seconds_since(t0))
                  << std::endl;
    }
    std::cout << fmt::format("{} of {} criteria passed", criteria.size() - static_cast<std::size_t>(failed),
                             criteria.size())
              << std::endl;
    return failed == 0 ? 0 : 1;
}
