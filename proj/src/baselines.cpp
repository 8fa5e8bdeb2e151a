#include "loopsec/baselines.hpp"

#include <algorithm>
#include <functional>

#include <fmt/core.h>

#include "loopsec/bisection.hpp"
#include "loopsec/errors.hpp"

namespace loopsec {

namespace {

SolveReport from_baseline(const Scenario& s, const BaselineResult& base, CaseLabel label) {
    SolveReport r;
    r.allocation = base.allocation;
    r.metrics = base.metrics;
    r.channel_case = classify(s.gains);
    r.channel_case.label = label;
    r.objective = objective_ratio_sum(s.limits.p_umax, s.limits.b_max, s.limits.p_dmax, s.limits.b_max, s.gains);
    return r;
}

struct LinkChoice {
    double p = 0.0;
    double b = 0.0;
    double t = 0.0;
};

// Maximize t R(r) subject to weight * t * R_e(r) <= budget and t <= cap(r), where
// r is the link's free resource (power if the legitimate gain is larger,
// bandwidth otherwise). The time cap binds for small r and the leakage for
// large r; the optimum is where both bind, or r at its cap.
LinkChoice best_link(double g, double g_e, double n0, double p_max, double b_max, double weight, double budget,
                     const std::function<double(double)>& time_cap, std::size_t& iterations) {
    const bool power_free = g > g_e;
    auto resources = [&](double r) { return power_free ? std::pair{r, b_max} : std::pair{p_max, r}; };
    auto leakage_binds = [&](double r) {
        const auto [p, b] = resources(r);
        const double r_legit = rate(p, b, g, n0);
        const double r_eve = rate(p, b, g_e, n0);
        return time_cap(r_legit) >= budget / (weight * r_eve);
    };
    const double r_max = power_free ? p_max : b_max;
    double r = r_max;
    if (leakage_binds(r_max)) {
        double lo = r_max;
        for (int i = 0; i < 2000 && leakage_binds(lo); ++i) {
            lo *= 0.5;
        }
        const Bracket br = bisect_predicate(leakage_binds, lo, r_max, 1e-12);
        iterations += br.iterations;
        r = br.hi;
    }
    const auto [p, b] = resources(r);
    const double r_legit = rate(p, b, g, n0);
    const double r_eve = rate(p, b, g_e, n0);
    return {p, b, std::min(time_cap(r_legit), budget / (weight * r_eve))};
}

} // namespace

SolveReport control_oriented_scaled(const Scenario& s) {
    s.validate();
    BaselineResult base = unconstrained_baseline(s.gains, s.compute, s.limits);
    const double leak = base.metrics.leakage_weighted;
    if (!(leak > s.policy.d_th * (1.0 + 1e-12))) {
        return from_baseline(s, base, CaseLabel::Unconstrained);
    }
    const double scale = s.policy.d_th / leak;
    base.allocation.t_u *= scale;
    base.allocation.t_d *= scale;
    base.metrics = evaluate(base.allocation, s.gains, s.compute);
    return from_baseline(s, base, classify(s.gains).label);
}

SeparateLinksOptions resolve_separate_options(const Scenario& s, const SeparateLinksOptions& options) {
    SeparateLinksOptions out = options;
    if (!out.split || !out.downlink_time) {
        const BaselineResult base = unconstrained_baseline(s.gains, s.compute, s.limits);
        if (!out.split) {
            out.split = s.compute.rho * base.metrics.d_se / base.metrics.leakage_weighted;
        }
        if (!out.downlink_time) {
            out.downlink_time = base.allocation.t_d;
        }
    }
    return out;
}

SolveReport separate_links(const Scenario& s, const SeparateLinksOptions& options) {
    s.validate();
    const BaselineResult base = unconstrained_baseline(s.gains, s.compute, s.limits);
    if (!(base.metrics.leakage_weighted > s.policy.d_th * (1.0 + 1e-12))) {
        return from_baseline(s, base, CaseLabel::Unconstrained);
    }
    const SeparateLinksOptions opt = resolve_separate_options(s, options);
    const double split = *opt.split;
    const double t_d_cap = *opt.downlink_time;
    const double t = s.limits.t_total;
    if (!(split > 0.0 && split < 1.0)) {
        throw InvalidArgument(fmt::format("separate_links: split must lie in (0,1), got {}", split));
    }
    if (!(t_d_cap > 0.0 && t_d_cap < t)) {
        throw InvalidArgument(fmt::format("separate_links: downlink time cap must lie in (0,T), got {}", t_d_cap));
    }
    const ChannelGains& g = s.gains;
    const ComputeModel& c = s.compute;
    const double f = s.limits.f_max;
    std::size_t iterations = 0;

    // Uplink time plus the compute time of its payload shares T - t_d_cap.
    const LinkChoice up = best_link(
        g.g_u, g.g_se, g.n0, s.limits.p_umax, s.limits.b_max, c.rho, split * s.policy.d_th,
        [&](double r_u) { return (t - t_d_cap) / (1.0 + c.alpha * r_u / f); }, iterations);
    const LinkChoice down = best_link(
        g.g_d, g.g_ce, g.n0, s.limits.p_dmax, s.limits.b_max, 1.0, (1.0 - split) * s.policy.d_th,
        [&](double) { return t_d_cap; }, iterations);

    SolveReport r;
    Allocation& a = r.allocation;
    a.p_u = up.p;
    a.b_u = up.b;
    a.t_u = up.t;
    a.p_d = down.p;
    a.b_d = down.b;
    a.t_d = down.t;
    a.f = f;
    r.metrics = evaluate(a, g, c);
    r.channel_case = classify(g);
    r.objective = objective_ratio_sum(a.p_u, a.b_u, a.p_d, a.b_d, g);
    r.iterations = iterations;
    r.solver_tolerance = 1e-12;
    return r;
}

} // namespace loopsec
