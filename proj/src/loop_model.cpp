#include "loopsec/loop_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "loopsec/errors.hpp"

namespace loopsec {

void ResourceLimits::validate() const {
    if (!(p_umax > 0.0) || !(p_dmax > 0.0) || !(b_max > 0.0) || !(t_total > 0.0) || !(f_max > 0.0)) {
        throw InvalidArgument("resource limits must be strictly positive");
    }
}

void ComputeModel::validate() const {
    if (!(alpha > 0.0)) {
        throw InvalidArgument("alpha must be positive");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw InvalidArgument(fmt::format("rho must lie in (0,1), got {}", rho));
    }
}

void SecurityPolicy::validate() const {
    if (!(d_th > 0.0)) {
        throw InvalidArgument("d_th must be positive");
    }
}

void Scenario::validate() const {
    gains.validate();
    limits.validate();
    compute.validate();
    policy.validate();
}

LoopMetrics evaluate(const Allocation& a, const ChannelGains& g, const ComputeModel& c) {
    if (a.p_u < 0.0 || a.p_d < 0.0 || a.t_u < 0.0 || a.t_d < 0.0 || a.b_u < 0.0 || a.b_d < 0.0 || a.f < 0.0) {
        throw InvalidArgument("evaluate: allocation fields must be non-negative");
    }
    LoopMetrics m;
    if (a.t_u > 0.0) {
        m.d_u = a.t_u * rate(a.p_u, a.b_u, g.g_u, g.n0);
        m.d_se = a.t_u * eavesdrop_rate_upper_bound(a.p_u, a.b_u, g.g_se, g.n0);
    }
    if (a.t_d > 0.0) {
        m.d_d = a.t_d * rate(a.p_d, a.b_d, g.g_d, g.n0);
        m.d_ce = a.t_d * rate(a.p_d, a.b_d, g.g_ce, g.n0);
    }
    m.cne = std::min(c.rho * m.d_u, m.d_d);
    m.leakage_weighted = c.rho * m.d_se + m.d_ce;
    if (m.d_u > 0.0) {
        if (!(a.f > 0.0)) {
            throw InvalidArgument("evaluate: zero compute frequency with non-zero uplink data");
        }
        m.t_compute = c.alpha * m.d_u / a.f;
    }
    return m;
}

FeasibilityResult is_feasible(const Allocation& a, const ChannelGains& g, const ComputeModel& c,
                              const ResourceLimits& l, const SecurityPolicy& pol, double tol) {
    FeasibilityResult r;
    auto over = [&](double value, double cap, const char* name) {
        if (value > cap * (1.0 + tol)) {
            r.feasible = false;
            r.violations.push_back(fmt::format("{}: {} exceeds {}", name, value, cap));
        }
    };
    over(a.p_u, l.p_umax, "uplink power");
    over(a.p_d, l.p_dmax, "downlink power");
    over(a.b_u, l.b_max, "uplink bandwidth");
    over(a.b_d, l.b_max, "downlink bandwidth");
    over(a.f, l.f_max, "compute frequency");
    const LoopMetrics m = evaluate(a, g, c);
    over(a.t_u + m.t_compute + a.t_d, l.t_total, "time budget");
    over(m.leakage_weighted, pol.d_th, "leakage");
    return r;
}

std::pair<double, double> optimal_times(double p_u, double b_u, double p_d, double b_d, const ChannelGains& g,
                                        const ComputeModel& c, const SecurityPolicy& pol) {
    const double r_u = rate(p_u, b_u, g.g_u, g.n0);
    const double r_d = rate(p_d, b_d, g.g_d, g.n0);
    const double r_se = rate(p_u, b_u, g.g_se, g.n0);
    const double r_ce = rate(p_d, b_d, g.g_ce, g.n0);
    if (!(r_u > 0.0) || !(r_d > 0.0) || !(r_se > 0.0) || !(r_ce > 0.0)) {
        throw InvalidArgument("optimal_times: all rates must be positive");
    }
    const double ratio_sum = r_se / r_u + r_ce / r_d;
    return {pol.d_th / (c.rho * r_u * ratio_sum), pol.d_th / (r_d * ratio_sum)};
}

BaselineResult unconstrained_baseline(const ChannelGains& g, const ComputeModel& c, const ResourceLimits& l) {
    g.validate();
    c.validate();
    l.validate();
    const double r_u = rate(l.p_umax, l.b_max, g.g_u, g.n0);
    const double r_d = rate(l.p_dmax, l.b_max, g.g_d, g.n0);
    const double den = 1.0 / (c.rho * r_u) + 1.0 / r_d + c.alpha / (c.rho * l.f_max);
    BaselineResult out;
    Allocation& a = out.allocation;
    a.p_u = l.p_umax;
    a.p_d = l.p_dmax;
    a.b_u = l.b_max;
    a.b_d = l.b_max;
    a.f = l.f_max;
    a.t_u = l.t_total / (c.rho * r_u * den);
    a.t_d = l.t_total / (r_d * den);
    out.metrics = evaluate(a, g, c);
    return out;
}

double lqr_lower_bound(double cne, const LqrParams& p) {
    if (p.n < 1) {
        throw InvalidArgument("lqr_lower_bound: state dimension must be >= 1");
    }
    const double den = std::exp2((2.0 / p.n) * (cne - p.log2_det_a)) - 1.0;
    if (!(den > 0.0)) {
        throw InvalidArgument("lqr_lower_bound: CNE below the stabilization threshold");
    }
    return p.nv_detm_term / den + p.trace_term;
}

} // namespace loopsec
