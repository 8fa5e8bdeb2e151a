#pragma once

#include <array>
#include <cstddef>

#include "loopsec/case_dispatch.hpp"

namespace loopsec {

enum class GridScale { Linear, Logarithmic };

struct GridSpec {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 2;
    GridScale scale = GridScale::Linear;

    void validate() const;
    [[nodiscard]] double at(std::size_t i) const;
};

/// Best CNE over transmission times for fixed powers and bandwidths:
/// min(T / (1/(rho R_u) + 1/R_d + alpha/(rho f_max)), D_th / (R_SE/R_u + R_CE/R_d)).
[[nodiscard]] double exact_cne(const Scenario& scenario, double p_u, double b_u, double p_d, double b_d);

struct OracleResult {
    double p_u = 0.0;
    double b_u = 0.0;
    double p_d = 0.0;
    double b_d = 0.0;
    std::array<std::size_t, 4> index{}; // grid indices (p_u, b_u, p_d, b_d); fixed axes report 0
    double cne = 0.0;
    /// D_th / cne: equals the ratio sum on leakage-limited points.
    double objective = 0.0;
    /// Largest one-step change of the ratio sum along each grid axis at the best point, summed.
    double resolution = 0.0;
};

/// Search over the free resource of each link (power on a legitimate-superior
/// link, bandwidth otherwise), the others at their caps.
/// Ties go to the lexicographically smallest index pair.
[[nodiscard]] OracleResult grid_search_p2(const Scenario& scenario, const GridSpec& grid_u, const GridSpec& grid_d);

/// Log grid for powers, linear for bandwidths, from just above the feasibility
/// threshold of each free resource (other link at full resources) to its cap.
[[nodiscard]] std::array<GridSpec, 2> default_p2_grid(const Scenario& scenario, std::size_t count);

/// Exhaustive search over (p_u, b_u, p_d, b_d) with no structure imposed.
[[nodiscard]] OracleResult grid_search_full(const Scenario& scenario, const std::array<GridSpec, 4>& grids);

[[nodiscard]] std::array<GridSpec, 4> default_full_grid(const Scenario& scenario, std::size_t count);

} // namespace loopsec
