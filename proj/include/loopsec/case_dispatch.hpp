#pragma once

#include <cstddef>
#include <string_view>

#include "loopsec/loop_model.hpp"

namespace loopsec {

enum class CaseLabel { I, II, III, IV, Unconstrained };

[[nodiscard]] std::string_view to_string(CaseLabel label) noexcept;

struct ChannelCase {
    CaseLabel label = CaseLabel::I;
    bool uplink_superior = true;   // g_u > g_se
    bool downlink_superior = true; // g_d > g_ce
};

/// Throws DegenerateChannel when g_u == g_se or g_d == g_ce.
[[nodiscard]] ChannelCase classify(const ChannelGains& gains);

/// R_SE/R_u + R_CE/R_d. Throws InvalidArgument on a zero rate.
[[nodiscard]] double objective_ratio_sum(double p_u, double b_u, double p_d, double b_d, const ChannelGains& gains);

struct SolveReport {
    Allocation allocation;
    LoopMetrics metrics;
    ChannelCase channel_case;
    double objective = 0.0;
    std::size_t iterations = 0;
    double solver_tolerance = 0.0;
};

struct SolveOptions {
    double power_tol = 1e-10;
    double mo_epsilon = 1e-6;
    std::size_t mo_max_iterations = 100000;
};

/// Baseline when the full-resource allocation already respects the leakage
/// budget; otherwise the Case I power solver or the polyblock solver,
/// followed by the leakage-tight time split.
[[nodiscard]] SolveReport solve(const Scenario& scenario, const SolveOptions& options = {});

/// True when the full-resource allocation leaks more than the budget.
[[nodiscard]] bool constraint_active(const Scenario& scenario);

/// Builds a report for fixed powers/bandwidths with leakage-tight times and f = f_max.
[[nodiscard]] SolveReport report_for_resources(const Scenario& scenario, double p_u, double b_u, double p_d,
                                               double b_d);

} // namespace loopsec
