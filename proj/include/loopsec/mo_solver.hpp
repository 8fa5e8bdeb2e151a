#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "loopsec/case_dispatch.hpp"
#include "loopsec/loop_model.hpp"

namespace loopsec {

/// Which resource of a link is optimized; the other one sits at its cap.
enum class Resource { Power, Bandwidth };

using Point2 = std::array<double, 2>;

/// Two-variable monotonic program in z = (1/r_u, 1/r_d), where r is the free
/// resource of each link. Maximize an increasing objective subject to an
/// increasing constraint <= 0 over z >= lower.
struct MoProblem {
    Scenario scenario;
    std::array<Resource, 2> free{Resource::Bandwidth, Resource::Bandwidth};
    Point2 lower{};        // reciprocal of the resource caps
    double epsilon = 1e-6; // on the objective
    double projection_tol = 1e-10;
    std::size_t max_iterations = 100000;

    /// Resource values (p_u, b_u, p_d, b_d) for a point z.
    [[nodiscard]] Allocation resources_at(const Point2& z) const;
    /// -(R_SE/R_u + R_CE/R_d); increasing in z.
    [[nodiscard]] double objective(const Point2& z) const;
    /// D_th (1/(rho R_u) + 1/R_d + alpha/(rho f_max)) - T (R_SE/R_u + R_CE/R_d); increasing in z.
    [[nodiscard]] double constraint(const Point2& z) const;
};

/// Per-case layout: Case II frees both bandwidths, III frees uplink power and
/// downlink bandwidth, IV the mirror. Case I frees both powers. Checks
/// monotonicity on the box corners and throws InternalError on failure.
[[nodiscard]] MoProblem build_mo_problem(CaseLabel label, const Scenario& scenario);
[[nodiscard]] MoProblem build_mo_problem(std::array<Resource, 2> free, const Scenario& scenario);

/// Points on each axis (other coordinate at its lower bound) where the constraint is tight.
/// Throws Infeasible if the lower corner already violates the constraint.
[[nodiscard]] Point2 initial_corner(const MoProblem& prob);

/// Farthest point on the segment from prob.lower to v satisfying the constraint.
/// Empty if even the lower corner is infeasible.
[[nodiscard]] std::optional<Point2> project_to_feasible(const Point2& v, const MoProblem& prob);

struct PolyblockResult {
    Point2 z{};
    double value = 0.0; // objective at z
    std::size_t iterations = 0;
    std::vector<double> upper_trace;
    std::vector<double> lower_trace;
    std::vector<std::size_t> vertex_count_trace; // size of the vertex set each iteration started from
    std::vector<Point2> vertices; // final vertex set
};

/// Throws NonConvergence if max_iterations is reached.
[[nodiscard]] PolyblockResult polyblock_iterate(const MoProblem& prob);

} // namespace loopsec
