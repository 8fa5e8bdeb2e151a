#include "loopsec/kkt_solver.hpp"

#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "loopsec/bisection.hpp"
#include "loopsec/errors.hpp"

namespace loopsec {

namespace {

constexpr double kExpansionCap = 1e6;
constexpr int kMaxHalvings = 2000;

struct LinkTerms {
    double a = 0.0;      // eavesdropper SNR per watt
    double b = 0.0;      // legitimate SNR per watt
    double h_scale = 0.0; // D_th ln2 / (w T B)
};

LinkTerms uplink(const CaseIProblem& p) {
    const double bn0 = p.limits.b_max * p.gains.n0;
    return {p.gains.g_se / bn0, p.gains.g_u / bn0,
            p.policy.d_th * std::numbers::ln2 / (p.compute.rho * p.limits.t_total * p.limits.b_max)};
}

LinkTerms downlink(const CaseIProblem& p) {
    const double bn0 = p.limits.b_max * p.gains.n0;
    return {p.gains.g_ce / bn0, p.gains.g_d / bn0,
            p.policy.d_th * std::numbers::ln2 / (p.limits.t_total * p.limits.b_max)};
}

double ratio(const LinkTerms& t, double p) {
    return std::log1p(t.a * p) / std::log1p(t.b * p);
}

double ratio_derivative(const LinkTerms& t, double p) {
    const double la = std::log1p(t.a * p);
    const double lb = std::log1p(t.b * p);
    return (t.a / (1.0 + t.a * p) * lb - t.b / (1.0 + t.b * p) * la) / (lb * lb);
}

double inverse_rate(const LinkTerms& t, double p) {
    return t.h_scale / std::log1p(t.b * p);
}

double inverse_rate_derivative(const LinkTerms& t, double p) {
    const double lb = std::log1p(t.b * p);
    return -t.h_scale * (t.b / (1.0 + t.b * p)) / (lb * lb);
}

// f'/h' rearranged to avoid dividing two small numbers.
double derivative_ratio(const LinkTerms& t, double p) {
    const double la = std::log1p(t.a * p);
    const double lb = std::log1p(t.b * p);
    const double k = std::numbers::ln2 / t.h_scale;
    return k * (la - t.a * (1.0 + t.b * p) / (t.b * (1.0 + t.a * p)) * lb);
}

double compute_term(const CaseIProblem& p) {
    return p.compute.alpha * p.policy.d_th / (p.compute.rho * p.limits.t_total * p.limits.f_max);
}

void require_positive(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw InvalidArgument(fmt::format("power must be positive and finite, got {}", p));
    }
}

// Smallest-magnitude bracket [lo, hi] with pred(lo) false and pred(hi) true,
// found by halving downward from `hi`.
template <typename Pred>
std::optional<double> halve_until_false(Pred&& pred, double hi) {
    double lo = hi;
    for (int i = 0; i < kMaxHalvings; ++i) {
        lo *= 0.5;
        if (!pred(lo)) {
            return lo;
        }
    }
    return std::nullopt;
}

} // namespace

void CaseIProblem::validate() const {
    gains.validate();
    limits.validate();
    compute.validate();
    policy.validate();
    if (!(tol > 0.0)) {
        throw InvalidArgument("tolerance must be positive");
    }
    if (!(gains.g_u > gains.g_se) || !(gains.g_d > gains.g_ce)) {
        throw InvalidArgument("Case I requires both legitimate links to beat the eavesdropper");
    }
}

double aux_eval(AuxFunction which, double p, const CaseIProblem& prob) {
    require_positive(p);
    switch (which) {
    case AuxFunction::F1: return ratio(uplink(prob), p);
    case AuxFunction::F2: return ratio(downlink(prob), p);
    case AuxFunction::H1: return inverse_rate(uplink(prob), p);
    case AuxFunction::H2: return inverse_rate(downlink(prob), p);
    case AuxFunction::DF1: return ratio_derivative(uplink(prob), p);
    case AuxFunction::DF2: return ratio_derivative(downlink(prob), p);
    case AuxFunction::DH1: return inverse_rate_derivative(uplink(prob), p);
    case AuxFunction::DH2: return inverse_rate_derivative(downlink(prob), p);
    }
    throw InvalidArgument("unknown auxiliary function");
}

double stationarity_gap(double p_u, double p_d, const CaseIProblem& prob) {
    require_positive(p_u);
    require_positive(p_d);
    return derivative_ratio(uplink(prob), p_u) - derivative_ratio(downlink(prob), p_d);
}

double constraint_gap(double p_u, double p_d, const CaseIProblem& prob) {
    require_positive(p_u);
    require_positive(p_d);
    const LinkTerms up = uplink(prob);
    const LinkTerms down = downlink(prob);
    return ratio(up, p_u) + ratio(down, p_d) - inverse_rate(up, p_u) - inverse_rate(down, p_d) - compute_term(prob);
}

std::optional<double> tight_downlink_power(double p_u, const CaseIProblem& prob, std::size_t& iterations) {
    auto feasible = [&](double p_d) { return constraint_gap(p_u, p_d, prob) >= 0.0; };
    const double cap = kExpansionCap * prob.limits.p_dmax;
    double hi = prob.limits.p_dmax;
    while (!feasible(hi)) {
        if (hi >= cap) {
            return std::nullopt;
        }
        hi = std::min(2.0 * hi, cap);
    }
    const auto lo = halve_until_false(feasible, hi);
    if (!lo) {
        return hi;
    }
    const Bracket br = bisect_predicate(feasible, *lo, hi, prob.tol);
    iterations += br.iterations;
    return br.hi;
}

CaseISolution solve_case1(const CaseIProblem& prob) {
    prob.validate();
    CaseISolution sol;
    std::size_t& iters = sol.iterations;

    // Along the tight-constraint curve the stationarity gap decreases in p_u;
    // "settled" marks the side at or beyond the intersection.
    auto settled = [&](double p_u) {
        const auto p_d = tight_downlink_power(p_u, prob, iters);
        return p_d.has_value() && stationarity_gap(p_u, *p_d, prob) <= 0.0;
    };

    const double cap_u = kExpansionCap * prob.limits.p_umax;
    std::optional<double> hi_u;
    for (double p = prob.limits.p_umax;; p = std::min(2.0 * p, cap_u)) {
        if (settled(p)) {
            hi_u = p;
            break;
        }
        if (p >= cap_u) {
            break;
        }
    }
    if (hi_u) {
        double p_hat = *hi_u;
        if (const auto lo_u = halve_until_false(settled, *hi_u)) {
            const Bracket br = bisect_predicate(settled, *lo_u, *hi_u, prob.tol);
            iters += br.iterations;
            p_hat = br.hi;
        }
        const auto p_d_hat = tight_downlink_power(p_hat, prob, iters);
        if (p_d_hat) {
            sol.p_u_intersection = p_hat;
            sol.p_d_intersection = *p_d_hat;
            if (p_hat <= prob.limits.p_umax && *p_d_hat <= prob.limits.p_dmax) {
                sol.p_u = p_hat;
                sol.p_d = *p_d_hat;
                sol.objective = aux_eval(AuxFunction::F1, sol.p_u, prob) + aux_eval(AuxFunction::F2, sol.p_d, prob);
                sol.where = CaseIPoint::Interior;
                return sol;
            }
        }
    }

    // Boundary candidates: p_u pinned at its cap, then p_d pinned at its cap.
    std::optional<CaseISolution> best;
    auto consider = [&](double p_u, double p_d, CaseIPoint where) {
        const double obj = aux_eval(AuxFunction::F1, p_u, prob) + aux_eval(AuxFunction::F2, p_d, prob);
        if (!best || obj < best->objective) {
            CaseISolution c;
            c.p_u = p_u;
            c.p_d = p_d;
            c.objective = obj;
            c.where = where;
            best = c;
        }
    };

    if (constraint_gap(prob.limits.p_umax, prob.limits.p_dmax, prob) >= 0.0) {
        auto on_u_edge = [&](double p_d) { return constraint_gap(prob.limits.p_umax, p_d, prob) >= 0.0; };
        if (const auto lo = halve_until_false(on_u_edge, prob.limits.p_dmax)) {
            const Bracket br = bisect_predicate(on_u_edge, *lo, prob.limits.p_dmax, prob.tol);
            iters += br.iterations;
            consider(prob.limits.p_umax, br.hi, CaseIPoint::UplinkAtMax);
        }
        auto on_d_edge = [&](double p_u) { return constraint_gap(p_u, prob.limits.p_dmax, prob) >= 0.0; };
        if (const auto lo = halve_until_false(on_d_edge, prob.limits.p_umax)) {
            const Bracket br = bisect_predicate(on_d_edge, *lo, prob.limits.p_umax, prob.tol);
            iters += br.iterations;
            consider(br.hi, prob.limits.p_dmax, CaseIPoint::DownlinkAtMax);
        }
    }
    if (!best) {
        throw Infeasible("no power pair on the box boundary meets the time budget with tight leakage");
    }
    best->iterations = iters;
    best->p_u_intersection = sol.p_u_intersection;
    best->p_d_intersection = sol.p_d_intersection;
    return *best;
}

} // namespace loopsec
