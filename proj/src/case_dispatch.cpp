#include "loopsec/case_dispatch.hpp"

#include "loopsec/errors.hpp"
#include "loopsec/kkt_solver.hpp"
#include "loopsec/mo_solver.hpp"

namespace loopsec {

std::string_view to_string(CaseLabel label) noexcept {
    switch (label) {
    case CaseLabel::I: return "I";
    case CaseLabel::II: return "II";
    case CaseLabel::III: return "III";
    case CaseLabel::IV: return "IV";
    case CaseLabel::Unconstrained: return "Unconstrained";
    }
    return "?";
}

ChannelCase classify(const ChannelGains& gains) {
    gains.validate();
    if (gains.g_u == gains.g_se || gains.g_d == gains.g_ce) {
        throw DegenerateChannel("legitimate and eavesdropping gains coincide on a link");
    }
    ChannelCase c;
    c.uplink_superior = gains.g_u > gains.g_se;
    c.downlink_superior = gains.g_d > gains.g_ce;
    if (c.uplink_superior && c.downlink_superior) {
        c.label = CaseLabel::I;
    } else if (!c.uplink_superior && !c.downlink_superior) {
        c.label = CaseLabel::II;
    } else if (c.uplink_superior) {
        c.label = CaseLabel::III;
    } else {
        c.label = CaseLabel::IV;
    }
    return c;
}

double objective_ratio_sum(double p_u, double b_u, double p_d, double b_d, const ChannelGains& g) {
    const double r_u = rate(p_u, b_u, g.g_u, g.n0);
    const double r_d = rate(p_d, b_d, g.g_d, g.n0);
    if (!(r_u > 0.0) || !(r_d > 0.0)) {
        throw InvalidArgument("objective_ratio_sum: legitimate rates must be positive");
    }
    return rate(p_u, b_u, g.g_se, g.n0) / r_u + rate(p_d, b_d, g.g_ce, g.n0) / r_d;
}

bool constraint_active(const Scenario& s) {
    const BaselineResult base = unconstrained_baseline(s.gains, s.compute, s.limits);
    return base.metrics.leakage_weighted > s.policy.d_th * (1.0 + 1e-12);
}

SolveReport report_for_resources(const Scenario& s, double p_u, double b_u, double p_d, double b_d) {
    SolveReport r;
    const auto [t_u, t_d] = optimal_times(p_u, b_u, p_d, b_d, s.gains, s.compute, s.policy);
    Allocation& a = r.allocation;
    a.p_u = p_u;
    a.b_u = b_u;
    a.p_d = p_d;
    a.b_d = b_d;
    a.t_u = t_u;
    a.t_d = t_d;
    a.f = s.limits.f_max;
    r.metrics = evaluate(a, s.gains, s.compute);
    r.channel_case = classify(s.gains);
    r.objective = objective_ratio_sum(p_u, b_u, p_d, b_d, s.gains);
    return r;
}

SolveReport solve(const Scenario& s, const SolveOptions& options) {
    s.validate();
    const BaselineResult base = unconstrained_baseline(s.gains, s.compute, s.limits);
    ChannelCase cc = classify(s.gains);
    if (!(base.metrics.leakage_weighted > s.policy.d_th * (1.0 + 1e-12))) {
        SolveReport r;
        r.allocation = base.allocation;
        r.metrics = base.metrics;
        cc.label = CaseLabel::Unconstrained;
        r.channel_case = cc;
        r.objective = objective_ratio_sum(s.limits.p_umax, s.limits.b_max, s.limits.p_dmax, s.limits.b_max, s.gains);
        return r;
    }

    if (cc.label == CaseLabel::I) {
        CaseIProblem prob{s.gains, s.limits, s.compute, s.policy, options.power_tol};
        const CaseISolution sol = solve_case1(prob);
        SolveReport r = report_for_resources(s, sol.p_u, s.limits.b_max, sol.p_d, s.limits.b_max);
        r.iterations = sol.iterations;
        r.solver_tolerance = options.power_tol;
        return r;
    }

    MoProblem prob = build_mo_problem(cc.label, s);
    prob.epsilon = options.mo_epsilon;
    prob.max_iterations = options.mo_max_iterations;
    const PolyblockResult pb = polyblock_iterate(prob);
    const Allocation a = prob.resources_at(pb.z);
    SolveReport r = report_for_resources(s, a.p_u, a.b_u, a.p_d, a.b_d);
    r.iterations = pb.iterations;
    r.solver_tolerance = options.mo_epsilon;
    return r;
}

} // namespace loopsec
