#include "loopsec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <fmt/core.h>

#include "loopsec/bisection.hpp"
#include "loopsec/errors.hpp"
#include "loopsec/mo_solver.hpp"

namespace loopsec {

void GridSpec::validate() const {
    if (count < 2) {
        throw InvalidArgument("grid needs at least two points");
    }
    if (!(lower < upper)) {
        throw InvalidArgument(fmt::format("grid bounds out of order: [{}, {}]", lower, upper));
    }
    if (scale == GridScale::Logarithmic && !(lower > 0.0)) {
        throw InvalidArgument("logarithmic grid needs a positive lower bound");
    }
}

double GridSpec::at(std::size_t i) const {
    if (i + 1 == count) {
        return upper;
    }
    const double s = static_cast<double>(i) / static_cast<double>(count - 1);
    if (scale == GridScale::Logarithmic) {
        return std::exp(std::log(lower) + s * (std::log(upper) - std::log(lower)));
    }
    return lower + s * (upper - lower);
}

double exact_cne(const Scenario& s, double p_u, double b_u, double p_d, double b_d) {
    const ChannelGains& g = s.gains;
    const double r_u = rate(p_u, b_u, g.g_u, g.n0);
    const double r_d = rate(p_d, b_d, g.g_d, g.n0);
    const double ratio = rate(p_u, b_u, g.g_se, g.n0) / r_u + rate(p_d, b_d, g.g_ce, g.n0) / r_d;
    const double den = 1.0 / (s.compute.rho * r_u) + 1.0 / r_d + s.compute.alpha / (s.compute.rho * s.limits.f_max);
    return std::min(s.limits.t_total / den, s.policy.d_th / ratio);
}

namespace {

// Per-link terms: leakage ratio R_e/R and inverse weighted rate 1/(w R).
struct LinkTable {
    std::vector<double> ratio;
    std::vector<double> inv;
    std::vector<double> p;
    std::vector<double> b;
};

void push_link(LinkTable& t, double p, double b, double g, double g_e, double n0, double w) {
    const double r = rate(p, b, g, n0);
    t.ratio.push_back(rate(p, b, g_e, n0) / r);
    t.inv.push_back(1.0 / (w * r));
    t.p.push_back(p);
    t.b.push_back(b);
}

struct Best {
    std::size_t i = 0;
    std::size_t j = 0;
    double cne = -1.0;
};

struct Pairing {
    double t_total, d_th, compute;

    [[nodiscard]] double cne(const LinkTable& u, std::size_t i, const LinkTable& d, std::size_t j) const {
        return std::min(t_total / (u.inv[i] + d.inv[j] + compute), d_th / (u.ratio[i] + d.ratio[j]));
    }
};

Pairing pairing(const Scenario& s) {
    return {s.limits.t_total, s.policy.d_th, s.compute.alpha / (s.compute.rho * s.limits.f_max)};
}

Best search(const Pairing& pr, const LinkTable& u, const LinkTable& d) {
    Best best;
    for (std::size_t i = 0; i < u.ratio.size(); ++i) {
        for (std::size_t j = 0; j < d.ratio.size(); ++j) {
            const double c = pr.cne(u, i, d, j);
            if (c > best.cne) {
                best = {i, j, c};
            }
        }
    }
    if (!(best.cne > 0.0)) {
        throw Infeasible("grid contains no point with positive CNE");
    }
    return best;
}

// Link-level feasibility margin T R_e/R - D_th/(w R); the tight-leakage times
// fit in the period iff the uplink and downlink margins sum to at least
// alpha D_th / (rho f_max).
double margin(const Scenario& s, double p, double b, double g, double g_e, double w) {
    const double r = rate(p, b, g, s.gains.n0);
    return s.limits.t_total * rate(p, b, g_e, s.gains.n0) / r - s.policy.d_th / (w * r);
}

// Smallest r in (0, r_max] with fn(r) >= 0 found by halving then bisection.
template <typename Fn>
std::optional<double> threshold(Fn&& fn, double r_max) {
    auto ok = [&](double r) { return fn(r) >= 0.0; };
    if (!ok(r_max)) {
        return std::nullopt;
    }
    double lo = r_max;
    for (int i = 0; i < 2000 && ok(lo); ++i) {
        lo *= 0.5;
    }
    return bisect_predicate(ok, lo, r_max, 1e-13).hi;
}

struct LinkSpec {
    double g, g_e, w, p_max;
};

LinkSpec uplink_spec(const Scenario& s) {
    return {s.gains.g_u, s.gains.g_se, s.compute.rho, s.limits.p_umax};
}

LinkSpec downlink_spec(const Scenario& s) {
    return {s.gains.g_d, s.gains.g_ce, 1.0, s.limits.p_dmax};
}

// Grid for one resource of one link, the other link at full resources.
GridSpec axis_grid(const Scenario& s, const LinkSpec& self, const LinkSpec& other, Resource which,
                   std::size_t count) {
    const double b_max = s.limits.b_max;
    const double other_margin = margin(s, other.p_max, b_max, other.g, other.g_e, other.w);
    const double need = s.policy.d_th * s.compute.alpha / (s.compute.rho * s.limits.f_max);
    const bool power = which == Resource::Power;
    const double r_max = power ? self.p_max : b_max;
    auto fn = [&](double r) {
        const double p = power ? r : self.p_max;
        const double b = power ? b_max : r;
        return margin(s, p, b, self.g, self.g_e, self.w) + other_margin - need;
    };
    const auto th = threshold(fn, r_max);
    GridSpec spec;
    spec.count = count;
    spec.upper = r_max;
    spec.scale = power ? GridScale::Logarithmic : GridScale::Linear;
    spec.lower = th ? *th * (1.0 + 1e-9) : r_max * 1e-3;
    if (!(spec.lower < spec.upper)) {
        spec.lower = spec.upper * (1.0 - 1e-9);
    }
    return spec;
}

Resource free_resource(bool legit_superior) {
    return legit_superior ? Resource::Power : Resource::Bandwidth;
}

double axis_resolution(const std::vector<double>& obj, std::size_t k) {
    double r = 0.0;
    if (k > 0) {
        r = std::max(r, std::abs(obj[k - 1] - obj[k]));
    }
    if (k + 1 < obj.size()) {
        r = std::max(r, std::abs(obj[k + 1] - obj[k]));
    }
    return r;
}

} // namespace

std::array<GridSpec, 2> default_p2_grid(const Scenario& s, std::size_t count) {
    s.validate();
    const ChannelCase cc = classify(s.gains);
    return {axis_grid(s, uplink_spec(s), downlink_spec(s), free_resource(cc.uplink_superior), count),
            axis_grid(s, downlink_spec(s), uplink_spec(s), free_resource(cc.downlink_superior), count)};
}

std::array<GridSpec, 4> default_full_grid(const Scenario& s, std::size_t count) {
    s.validate();
    const LinkSpec up = uplink_spec(s);
    const LinkSpec down = downlink_spec(s);
    return {axis_grid(s, up, down, Resource::Power, count), axis_grid(s, up, down, Resource::Bandwidth, count),
            axis_grid(s, down, up, Resource::Power, count), axis_grid(s, down, up, Resource::Bandwidth, count)};
}

OracleResult grid_search_p2(const Scenario& s, const GridSpec& grid_u, const GridSpec& grid_d) {
    s.validate();
    grid_u.validate();
    grid_d.validate();
    const ChannelCase cc = classify(s.gains);
    const ChannelGains& g = s.gains;
    const ResourceLimits& l = s.limits;

    LinkTable u;
    LinkTable d;
    for (std::size_t i = 0; i < grid_u.count; ++i) {
        const double r = grid_u.at(i);
        push_link(u, cc.uplink_superior ? r : l.p_umax, cc.uplink_superior ? l.b_max : r, g.g_u, g.g_se, g.n0,
                  s.compute.rho);
    }
    for (std::size_t j = 0; j < grid_d.count; ++j) {
        const double r = grid_d.at(j);
        push_link(d, cc.downlink_superior ? r : l.p_dmax, cc.downlink_superior ? l.b_max : r, g.g_d, g.g_ce, g.n0,
                  1.0);
    }
    const Pairing pr = pairing(s);
    const Best best = search(pr, u, d);

    OracleResult out;
    out.p_u = u.p[best.i];
    out.b_u = u.b[best.i];
    out.p_d = d.p[best.j];
    out.b_d = d.b[best.j];
    out.index = {cc.uplink_superior ? best.i : 0, cc.uplink_superior ? 0 : best.i,
                 cc.downlink_superior ? best.j : 0, cc.downlink_superior ? 0 : best.j};
    out.cne = best.cne;
    out.objective = s.policy.d_th / best.cne;

    std::vector<double> along_u(u.ratio.size());
    for (std::size_t i = 0; i < along_u.size(); ++i) {
        along_u[i] = u.ratio[i] + d.ratio[best.j];
    }
    std::vector<double> along_d(d.ratio.size());
    for (std::size_t j = 0; j < along_d.size(); ++j) {
        along_d[j] = u.ratio[best.i] + d.ratio[j];
    }
    out.resolution = axis_resolution(along_u, best.i) + axis_resolution(along_d, best.j);
    return out;
}

OracleResult grid_search_full(const Scenario& s, const std::array<GridSpec, 4>& grids) {
    s.validate();
    for (const GridSpec& gs : grids) {
        gs.validate();
        if (gs.count > 60) {
            throw InvalidArgument("full grid is limited to 60 points per axis");
        }
    }
    const ChannelGains& g = s.gains;
    LinkTable u;
    for (std::size_t ip = 0; ip < grids[0].count; ++ip) {
        for (std::size_t ib = 0; ib < grids[1].count; ++ib) {
            push_link(u, grids[0].at(ip), grids[1].at(ib), g.g_u, g.g_se, g.n0, s.compute.rho);
        }
    }
    LinkTable d;
    for (std::size_t ip = 0; ip < grids[2].count; ++ip) {
        for (std::size_t ib = 0; ib < grids[3].count; ++ib) {
            push_link(d, grids[2].at(ip), grids[3].at(ib), g.g_d, g.g_ce, g.n0, 1.0);
        }
    }
    const Pairing pr = pairing(s);
    const Best best = search(pr, u, d);

    OracleResult out;
    out.p_u = u.p[best.i];
    out.b_u = u.b[best.i];
    out.p_d = d.p[best.j];
    out.b_d = d.b[best.j];
    out.index = {best.i / grids[1].count, best.i % grids[1].count, best.j / grids[3].count,
                 best.j % grids[3].count};
    out.cne = best.cne;
    out.objective = s.policy.d_th / best.cne;
    return out;
}

} // namespace loopsec
