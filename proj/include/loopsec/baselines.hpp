#pragma once

#include <optional>

#include "loopsec/case_dispatch.hpp"

namespace loopsec {

enum class BaselineKind { ControlOrientedScaled, SeparateLinks };

/// Full-resource allocation with both transmission times shrunk by the same
/// factor until the leakage budget is met.
[[nodiscard]] SolveReport control_oriented_scaled(const Scenario& scenario);

struct SeparateLinksOptions {
    /// Fraction of d_th granted to the uplink (weighted by rho). Unset: the
    /// uplink's share of the full-resource leakage.
    std::optional<double> split;
    /// Downlink transmission-time cap; the uplink and compute share the rest.
    /// Unset: the full-resource downlink time.
    std::optional<double> downlink_time;
};

/// Resolved knobs for a scenario, filling unset ones from its full-resource allocation.
[[nodiscard]] SeparateLinksOptions resolve_separate_options(const Scenario& scenario,
                                                            const SeparateLinksOptions& options);

/// Each link maximizes its own throughput under its own leakage budget and time cap.
/// Throws InvalidArgument unless the split lies in (0, 1) and the downlink cap in (0, T).
[[nodiscard]] SolveReport separate_links(const Scenario& scenario, const SeparateLinksOptions& options = {});

} // namespace loopsec
