#pragma once

#include <string>
#include <utility>
#include <vector>

#include "loopsec/channel_model.hpp"

namespace loopsec {

struct ResourceLimits {
    double p_umax = 1.0;   // W
    double p_dmax = 1.0;   // W
    double b_max = 20e3;   // Hz
    double t_total = 0.1;  // s
    double f_max = 1e9;    // cycles/s

    void validate() const;
};

struct ComputeModel {
    double alpha = 200.0; // cycles/bit
    double rho = 0.01;    // task-relevant fraction of uplink bits

    void validate() const;
};

struct SecurityPolicy {
    double d_th = 300.0; // bits

    void validate() const;
};

struct Allocation {
    double p_u = 0.0;
    double t_u = 0.0;
    double b_u = 0.0;
    double f = 0.0;
    double p_d = 0.0;
    double t_d = 0.0;
    double b_d = 0.0;
};

struct LoopMetrics {
    double d_u = 0.0;
    double d_d = 0.0;
    double cne = 0.0;
    double d_se = 0.0;
    double d_ce = 0.0;
    double leakage_weighted = 0.0; // rho * d_se + d_ce
    double t_compute = 0.0;
};

/// Pre-aggregated scalars of the LQR cost lower bound.
struct LqrParams {
    int n = 1;
    double log2_det_a = 0.0;
    double nv_detm_term = 0.0; // n * N(v) * |det M|^(1/n)
    double trace_term = 0.0;   // tr(Sigma_V S)
};

/// Everything defining one problem instance once gains are known.
struct Scenario {
    ChannelGains gains;
    ResourceLimits limits;
    ComputeModel compute;
    SecurityPolicy policy;

    void validate() const;
};

[[nodiscard]] LoopMetrics evaluate(const Allocation& alloc, const ChannelGains& gains, const ComputeModel& compute);

struct FeasibilityResult {
    bool feasible = true;
    std::vector<std::string> violations;
};

/// Checks time budget, box limits and leakage budget, each to a relative tolerance.
[[nodiscard]] FeasibilityResult is_feasible(const Allocation& alloc, const ChannelGains& gains,
                                            const ComputeModel& compute, const ResourceLimits& limits,
                                            const SecurityPolicy& policy, double tol = 1e-9);

/// Leakage-tight transmission times for fixed powers and bandwidths.
/// Returns (t_u, t_d). Throws InvalidArgument if any rate is zero.
[[nodiscard]] std::pair<double, double> optimal_times(double p_u, double b_u, double p_d, double b_d,
                                                      const ChannelGains& gains, const ComputeModel& compute,
                                                      const SecurityPolicy& policy);

struct BaselineResult {
    Allocation allocation;
    LoopMetrics metrics;
};

/// Full-resource allocation that exhausts the control period, ignoring the leakage budget.
[[nodiscard]] BaselineResult unconstrained_baseline(const ChannelGains& gains, const ComputeModel& compute,
                                                    const ResourceLimits& limits);

[[nodiscard]] double lqr_lower_bound(double cne, const LqrParams& params);

} // namespace loopsec
