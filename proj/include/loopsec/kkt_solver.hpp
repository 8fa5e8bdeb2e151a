#pragma once

#include <cstddef>
#include <optional>

#include "loopsec/loop_model.hpp"

namespace loopsec {

/// Power allocation when both legitimate links beat the eavesdropper
/// (bandwidths pinned at b_max, times from the leakage-tight formulas).
struct CaseIProblem {
    ChannelGains gains;
    ResourceLimits limits;
    ComputeModel compute;
    SecurityPolicy policy;
    double tol = 1e-10; // relative, on powers

    void validate() const;
};

/// f1/f2: leakage-to-throughput rate ratios of uplink/downlink.
/// h1/h2: scaled inverse rates, D_th/(w T R) with w = rho on the uplink.
/// The D-prefixed entries are first derivatives in power.
enum class AuxFunction { F1, F2, H1, H2, DF1, DF2, DH1, DH2 };

[[nodiscard]] double aux_eval(AuxFunction which, double p, const CaseIProblem& prob);

/// f1'/h1' at p_u minus f2'/h2' at p_d. Zero on the stationarity curve.
[[nodiscard]] double stationarity_gap(double p_u, double p_d, const CaseIProblem& prob);

/// f1 + f2 - h1 - h2 - alpha D_th / (rho T f_max).
/// Non-negative exactly when the leakage-tight times fit in the control period.
[[nodiscard]] double constraint_gap(double p_u, double p_d, const CaseIProblem& prob);

/// Downlink power placing (p_u, p_d) on the tight-constraint curve, searched
/// up to 1e6 * p_dmax. Empty if the curve is not reached. Adds bisection steps to `iterations`.
[[nodiscard]] std::optional<double> tight_downlink_power(double p_u, const CaseIProblem& prob,
                                                         std::size_t& iterations);

enum class CaseIPoint { Interior, UplinkAtMax, DownlinkAtMax };

struct CaseISolution {
    double p_u = 0.0;
    double p_d = 0.0;
    double objective = 0.0; // f1 + f2
    std::size_t iterations = 0;
    CaseIPoint where = CaseIPoint::Interior;
    /// Intersection of the two curves, when found (may lie outside the box).
    std::optional<double> p_u_intersection;
    std::optional<double> p_d_intersection;
};

/// Throws Infeasible when neither box boundary reaches the tight-constraint curve.
[[nodiscard]] CaseISolution solve_case1(const CaseIProblem& prob);

} // namespace loopsec
