#pragma once

#include <cmath>
#include <random>

#include "loopsec/case_dispatch.hpp"
#include "loopsec/config.hpp"

namespace loopsec::testing {

inline Scenario default_scenario() {
    return ScenarioConfig::defaults().to_scenario();
}

inline Scenario superior_eve_scenario() {
    return ScenarioConfig::superior_eavesdropper().to_scenario();
}

/// Random gains in the requested channel case with the default limits and a
/// leakage budget the full-resource allocation exceeds by at least 5%.
inline Scenario random_scenario(std::mt19937_64& rng, CaseLabel label) {
    std::uniform_real_distribution<double> legit(-11.0, -9.5);
    std::uniform_real_distribution<double> spread(-1.5, -0.05);
    Scenario s = default_scenario();
    const bool up = label == CaseLabel::I || label == CaseLabel::III;
    const bool down = label == CaseLabel::I || label == CaseLabel::IV;
    for (;;) {
        s.gains.g_u = std::pow(10.0, legit(rng));
        s.gains.g_d = std::pow(10.0, legit(rng));
        const double fu = std::pow(10.0, spread(rng));
        const double fd = std::pow(10.0, spread(rng));
        s.gains.g_se = up ? s.gains.g_u * fu : s.gains.g_u / fu;
        s.gains.g_ce = down ? s.gains.g_d * fd : s.gains.g_d / fd;
        const BaselineResult base = unconstrained_baseline(s.gains, s.compute, s.limits);
        if (base.metrics.leakage_weighted > 1.05 * s.policy.d_th) {
            return s;
        }
    }
}

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

} // namespace loopsec::testing
