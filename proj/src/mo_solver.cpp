#include "loopsec/mo_solver.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <set>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/core.h>

#include "loopsec/bisection.hpp"
#include "loopsec/case_dispatch.hpp"
#include "loopsec/errors.hpp"

namespace loopsec {

namespace {

constexpr int kMaxDoublings = 2000;

struct LinkRates {
    double r_u, r_d, r_se, r_ce;
};

LinkRates rates_at(const MoProblem& prob, const Point2& z) {
    const Allocation a = prob.resources_at(z);
    const ChannelGains& g = prob.scenario.gains;
    return {rate(a.p_u, a.b_u, g.g_u, g.n0), rate(a.p_d, a.b_d, g.g_d, g.n0), rate(a.p_u, a.b_u, g.g_se, g.n0),
            rate(a.p_d, a.b_d, g.g_ce, g.n0)};
}

void check_monotone(const MoProblem& prob, const Point2& lo, const Point2& hi) {
    const Point2 mixed_u{hi[0], lo[1]};
    const Point2 mixed_d{lo[0], hi[1]};
    auto ordered = [](double a, double b, double c) {
        const double slack = 1e-12 * std::max({std::abs(a), std::abs(b), std::abs(c)});
        return a <= b + slack && b <= c + slack;
    };
    using Member = double (MoProblem::*)(const Point2&) const;
    for (const Member fn : {&MoProblem::objective, &MoProblem::constraint}) {
        const double at_lo = (prob.*fn)(lo);
        const double at_hi = (prob.*fn)(hi);
        if (!ordered(at_lo, (prob.*fn)(mixed_u), at_hi) || !ordered(at_lo, (prob.*fn)(mixed_d), at_hi)) {
            throw InternalError("monotonic reformulation is not increasing on the box corners");
        }
    }
}

struct Vertex {
    Point2 z;
    double value;
};

Vertex make_vertex(const MoProblem& prob, const Point2& z) {
    return {z, prob.objective(z)};
}

// Staircase order: first coordinate descending, then second descending.
struct ByPosition {
    bool operator()(const Vertex& a, const Vertex& b) const {
        return a.z[0] != b.z[0] ? a.z[0] > b.z[0] : a.z[1] > b.z[1];
    }
};

struct ByValue {
    bool operator()(const Vertex& a, const Vertex& b) const {
        return a.value != b.value ? a.value > b.value : ByPosition{}(a, b);
    }
};

// Non-dominated vertex set. Along the position order the second coordinate
// strictly increases, so dominance only needs checking against neighbours.
class Staircase {
public:
    void insert(const Vertex& w) {
        auto it = steps_.lower_bound(w);
        if (it != steps_.begin()) {
            const Vertex& p = *std::prev(it);
            if (p.z[0] >= w.z[0] && p.z[1] >= w.z[1]) {
                return;
            }
        }
        if (it != steps_.end() && it->z[0] == w.z[0] && it->z[1] == w.z[1]) {
            return;
        }
        while (it != steps_.end() && it->z[0] <= w.z[0] && it->z[1] <= w.z[1]) {
            by_value_.erase(*it);
            it = steps_.erase(it);
        }
        steps_.insert(it, w);
        by_value_.insert(w);
    }

    void erase(const Vertex& w) {
        steps_.erase(w);
        by_value_.erase(w);
    }

    [[nodiscard]] const Vertex& top() const { return *by_value_.begin(); }
    [[nodiscard]] std::size_t size() const { return steps_.size(); }

    // Vertices strictly above x in both coordinates, in position order.
    [[nodiscard]] std::vector<Vertex> strictly_above(const Point2& x) const {
        auto end = steps_.lower_bound(Vertex{{x[0], std::numeric_limits<double>::infinity()}, 0.0});
        std::vector<Vertex> out;
        while (end != steps_.begin()) {
            --end;
            if (!(end->z[1] > x[1])) {
                break;
            }
            out.push_back(*end);
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

    [[nodiscard]] std::vector<Point2> points() const {
        std::vector<Point2> out;
        out.reserve(steps_.size());
        for (const Vertex& v : steps_) {
            out.push_back(v.z);
        }
        return out;
    }

private:
    std::set<Vertex, ByPosition> steps_;
    std::set<Vertex, ByValue> by_value_;
};

} // namespace

Allocation MoProblem::resources_at(const Point2& z) const {
    const ResourceLimits& l = scenario.limits;
    Allocation a;
    a.p_u = free[0] == Resource::Power ? 1.0 / z[0] : l.p_umax;
    a.b_u = free[0] == Resource::Bandwidth ? 1.0 / z[0] : l.b_max;
    a.p_d = free[1] == Resource::Power ? 1.0 / z[1] : l.p_dmax;
    a.b_d = free[1] == Resource::Bandwidth ? 1.0 / z[1] : l.b_max;
    a.f = l.f_max;
    return a;
}

double MoProblem::objective(const Point2& z) const {
    const LinkRates r = rates_at(*this, z);
    return -(r.r_se / r.r_u + r.r_ce / r.r_d);
}

double MoProblem::constraint(const Point2& z) const {
    const LinkRates r = rates_at(*this, z);
    const ComputeModel& c = scenario.compute;
    const double den = 1.0 / (c.rho * r.r_u) + 1.0 / r.r_d + c.alpha / (c.rho * scenario.limits.f_max);
    return scenario.policy.d_th * den - scenario.limits.t_total * (r.r_se / r.r_u + r.r_ce / r.r_d);
}

MoProblem build_mo_problem(std::array<Resource, 2> free, const Scenario& scenario) {
    scenario.validate();
    MoProblem prob;
    prob.scenario = scenario;
    prob.free = free;
    const ResourceLimits& l = scenario.limits;
    prob.lower = {1.0 / (free[0] == Resource::Power ? l.p_umax : l.b_max),
                  1.0 / (free[1] == Resource::Power ? l.p_dmax : l.b_max)};
    Point2 hi{2.0 * prob.lower[0], 2.0 * prob.lower[1]};
    if (prob.constraint(prob.lower) <= 0.0) {
        hi = initial_corner(prob);
    }
    check_monotone(prob, prob.lower, hi);
    return prob;
}

MoProblem build_mo_problem(CaseLabel label, const Scenario& scenario) {
    switch (label) {
    case CaseLabel::I: return build_mo_problem({Resource::Power, Resource::Power}, scenario);
    case CaseLabel::II: return build_mo_problem({Resource::Bandwidth, Resource::Bandwidth}, scenario);
    case CaseLabel::III: return build_mo_problem({Resource::Power, Resource::Bandwidth}, scenario);
    case CaseLabel::IV: return build_mo_problem({Resource::Bandwidth, Resource::Power}, scenario);
    case CaseLabel::Unconstrained: break;
    }
    throw InvalidArgument("no monotonic program for an unconstrained instance");
}

Point2 initial_corner(const MoProblem& prob) {
    if (prob.constraint(prob.lower) > 0.0) {
        throw Infeasible("leakage budget exceeds what the full-resource allocation leaks");
    }
    Point2 corner{};
    for (int d = 0; d < 2; ++d) {
        auto infeasible = [&](double zd) {
            Point2 z = prob.lower;
            z[d] = zd;
            return prob.constraint(z) > 0.0;
        };
        double hi = 2.0 * prob.lower[d];
        int n = 0;
        while (!infeasible(hi)) {
            if (++n > kMaxDoublings) {
                throw Infeasible("constraint never becomes tight along a box axis");
            }
            hi *= 2.0;
        }
        corner[d] = bisect_predicate(infeasible, prob.lower[d], hi, prob.projection_tol).hi;
    }
    return corner;
}

std::optional<Point2> project_to_feasible(const Point2& v, const MoProblem& prob) {
    const double at_lower = prob.constraint(prob.lower);
    if (at_lower > 0.0) {
        return std::nullopt;
    }
    const double at_v = prob.constraint(v);
    if (at_v <= 0.0) {
        return v;
    }
    auto along = [&](double lambda) {
        return Point2{prob.lower[0] + lambda * (v[0] - prob.lower[0]), prob.lower[1] + lambda * (v[1] - prob.lower[1])};
    };
    const double tol = prob.projection_tol;
    auto close_enough = [tol](double a, double b) { return b - a <= tol * std::abs(b); };
    std::uintmax_t max_iter = 400;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        [&](double lambda) { return prob.constraint(along(lambda)); }, 0.0, 1.0, at_lower, at_v, close_enough,
        max_iter);
    // The solver keeps a sign-changing bracket, so the lower end is on the feasible side.
    const Point2 x = along(lo);
    if (prob.constraint(x) > 0.0) {
        throw InternalError(fmt::format("projection bracket [{}, {}] lost the feasible side", lo, hi));
    }
    return x;
}

PolyblockResult polyblock_iterate(const MoProblem& prob) {
    if (!(prob.epsilon > 0.0)) {
        throw InvalidArgument("epsilon must be positive");
    }
    PolyblockResult res;
    Staircase vertices;
    vertices.insert(make_vertex(prob, initial_corner(prob)));
    double lower_bound = -std::numeric_limits<double>::infinity();
    std::optional<Point2> incumbent;

    for (std::size_t it = 0; it < prob.max_iterations; ++it) {
        const Vertex top = vertices.top();
        const double upper_bound = top.value;

        const auto x = project_to_feasible(top.z, prob);
        if (!x) {
            throw Infeasible("projection found no feasible point");
        }
        const double fx = prob.objective(*x);
        if (fx > lower_bound) {
            lower_bound = fx;
            incumbent = *x;
        }
        res.upper_trace.push_back(upper_bound);
        res.lower_trace.push_back(lower_bound);
        res.vertex_count_trace.push_back(vertices.size());
        res.iterations = it + 1;

        if (upper_bound - lower_bound <= prob.epsilon) {
            res.z = *incumbent;
            res.value = lower_bound;
            res.vertices = vertices.points();
            return res;
        }

        const std::vector<Vertex> above = vertices.strictly_above(*x);
        const bool top_above = std::any_of(above.begin(), above.end(), [&](const Vertex& u) { return u.z == top.z; });
        for (const Vertex& u : above) {
            vertices.erase(u);
        }
        if (!above.empty()) {
            vertices.insert(make_vertex(prob, {(*x)[0], above.back().z[1]}));
            vertices.insert(make_vertex(prob, {above.front().z[0], (*x)[1]}));
        }
        if (!top_above) {
            // Projection landed on a face shared with the top vertex; shrink it to the boundary point.
            vertices.erase(top);
            vertices.insert({*x, fx});
        }
    }
    throw NonConvergence(fmt::format("polyblock iteration cap {} reached", prob.max_iterations),
                         res.upper_trace.empty() ? 0.0 : res.upper_trace.back() - res.lower_trace.back());
}

} // namespace loopsec
