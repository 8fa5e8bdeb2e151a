#include "loopsec/channel_model.hpp"

#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "loopsec/errors.hpp"

namespace loopsec {

double distance(const Position3& a, const Position3& b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

void PathLossModel::validate() const {
    if (!(kappa_air > 0.0) || !(eta_air > 0.0) || !(kappa_ground > 0.0) || !(eta_ground > 0.0)) {
        throw InvalidArgument("path-loss parameters must be strictly positive");
    }
}

void ChannelGains::validate() const {
    if (!(g_u > 0.0) || !(g_d > 0.0) || !(g_se > 0.0) || !(g_ce > 0.0)) {
        throw InvalidArgument(
            fmt::format("channel gains must be positive (g_u={}, g_d={}, g_se={}, g_ce={})", g_u, g_d, g_se, g_ce));
    }
    if (!(n0 > 0.0)) {
        throw InvalidArgument("noise density must be positive");
    }
}

double dbm_per_hz_to_watts_per_hz(double dbm_per_hz) noexcept {
    return std::pow(10.0, (dbm_per_hz - 30.0) / 10.0);
}

double path_loss_gain(const Position3& tx, const Position3& rx, double kappa, double eta) {
    if (!(kappa > 0.0) || !(eta > 0.0)) {
        throw InvalidArgument("path_loss_gain: kappa and eta must be positive");
    }
    const double d = distance(tx, rx);
    if (!(d > 0.0)) {
        throw InvalidArgument("path_loss_gain: transmitter and receiver coincide");
    }
    return kappa * std::pow(d, -eta);
}

ChannelGains gains_from_geometry(const Geometry& geometry, const PathLossModel& model, double n0_watts_per_hz) {
    model.validate();
    ChannelGains g;
    g.g_u = path_loss_gain(geometry.sensor, geometry.hub, model.kappa_air, model.eta_air);
    g.g_d = path_loss_gain(geometry.hub, geometry.robot, model.kappa_air, model.eta_air);
    g.g_se = path_loss_gain(geometry.sensor, geometry.eavesdropper, model.kappa_ground, model.eta_ground);
    g.g_ce = path_loss_gain(geometry.hub, geometry.eavesdropper, model.kappa_air, model.eta_air);
    g.n0 = n0_watts_per_hz;
    g.validate();
    return g;
}

namespace {

void check_rate_args(double p, double b, double g, double n0) {
    if (!(b > 0.0)) {
        throw InvalidArgument(fmt::format("rate: bandwidth must be positive (got {})", b));
    }
    if (!(n0 > 0.0)) {
        throw InvalidArgument("rate: noise density must be positive");
    }
    if (p < 0.0 || g < 0.0 || std::isnan(p) || std::isnan(g)) {
        throw InvalidArgument(fmt::format("rate: power and gain must be non-negative (p={}, g={})", p, g));
    }
}

} // namespace

double rate(double p, double b, double g, double n0) {
    check_rate_args(p, b, g, n0);
    // log1p keeps the low-SNR tail accurate.
    return b * std::log1p(p * g / (b * n0)) / std::numbers::ln2;
}

double rate_power_derivative(double p, double b, double g, double n0) {
    check_rate_args(p, b, g, n0);
    return b * g / ((b * n0 + p * g) * std::numbers::ln2);
}

double eavesdrop_rate_upper_bound(double p, double b, double g_e, double n0) {
    return rate(p, b, g_e, n0);
}

double faded_rate(double p, double b, double g_e, double n0, double fading_power) {
    if (fading_power < 0.0) {
        throw InvalidArgument("faded_rate: fading power must be non-negative");
    }
    return rate(p, b, g_e * fading_power, n0);
}

} // namespace loopsec
