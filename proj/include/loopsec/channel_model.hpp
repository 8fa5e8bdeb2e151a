#pragma once

// Large-scale channel gains from node geometry and Shannon-rate evaluation for
// the legitimate and eavesdropping links of the sensing/control loop.

namespace loopsec {

struct Position3 {
    double x = 0.0; // m
    double y = 0.0; // m
    double z = 0.0; // m
};

[[nodiscard]] double distance(const Position3& a, const Position3& b) noexcept;

/// g = kappa * d^-eta. Air links (anything touching the hub) and the
/// ground-to-ground sensor->eavesdropper link use separate parameters.
struct PathLossModel {
    double kappa_air = 1.42e-4;
    double eta_air = 2.0;
    double kappa_ground = 1.42e-4;
    double eta_ground = 3.5;

    void validate() const;
};

struct ChannelGains {
    double g_u = 0.0;  // sensor -> hub
    double g_d = 0.0;  // hub -> robot
    double g_se = 0.0; // sensor -> eavesdropper (large-scale part only)
    double g_ce = 0.0; // hub -> eavesdropper
    double n0 = 0.0;   // noise PSD, W/Hz

    void validate() const;
};

struct Geometry {
    Position3 sensor{-500.0, 0.0, 0.0};
    Position3 hub{500.0, 0.0, 100.0};
    Position3 robot{-500.0, 0.0, 0.0};
    Position3 eavesdropper{-500.0, 1000.0, 0.0};
};

[[nodiscard]] double dbm_per_hz_to_watts_per_hz(double dbm_per_hz) noexcept;

/// Throws InvalidArgument on coincident positions or non-positive kappa/eta.
[[nodiscard]] double path_loss_gain(const Position3& tx, const Position3& rx, double kappa, double eta);

[[nodiscard]] ChannelGains gains_from_geometry(const Geometry& geometry, const PathLossModel& model,
                                               double n0_watts_per_hz);

/// b * log2(1 + p g / (b n0)) in bit/s. Zero when p == 0 or g == 0.
/// Throws InvalidArgument when b <= 0, n0 <= 0 or p, g negative.
[[nodiscard]] double rate(double p, double b, double g, double n0);

/// d rate / d p = b g / ((b n0 + p g) ln 2).
[[nodiscard]] double rate_power_derivative(double p, double b, double g, double n0);

/// Worst-case bound on the expected eavesdropping rate over Rayleigh fading
/// with E|xi|^2 = 1 (Jensen). Same closed form as rate() with the eavesdropper gain.
[[nodiscard]] double eavesdrop_rate_upper_bound(double p, double b, double g_e, double n0);

/// Instantaneous eavesdropping rate for one fading power draw |xi|^2.
[[nodiscard]] double faded_rate(double p, double b, double g_e, double n0, double fading_power);

} // namespace loopsec
