#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "loopsec/case_dispatch.hpp"
#include "loopsec/config.hpp"

namespace loopsec {

enum class Scheme { Proposed, ControlOrientedScaled, SeparateLinks };

[[nodiscard]] std::string_view to_string(Scheme scheme) noexcept;
/// Accepts `proposed`, `control_oriented`, `separate_links`.
[[nodiscard]] Scheme parse_scheme(const std::string& name);

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
    ScenarioConfig base;
    std::vector<Scheme> schemes{Scheme::Proposed, Scheme::ControlOrientedScaled, Scheme::SeparateLinks};
};

/// One scheme at one sweep point. `error` is set (and `report` empty) when the solve failed.
struct ResultRow {
    double swept_value = 0.0;
    Scheme scheme = Scheme::Proposed;
    std::optional<SolveReport> report;
    std::string error;
};

/// Runs one scheme on one scenario. The separate-links knobs come from `separate`.
[[nodiscard]] SolveReport run_scheme(Scheme scheme, const Scenario& scenario, const SeparateLinksOptions& separate);

/// Rows ordered by sweep value, then by scheme order in the spec. The
/// separate-links knobs left unset in the template are resolved once from
/// the template and held fixed over the sweep.
[[nodiscard]] std::vector<ResultRow> run_sweep(const SweepSpec& spec);

/// Proposed-scheme sweep over the eavesdropper x coordinate.
[[nodiscard]] std::vector<ResultRow> run_eve_scan(const std::vector<double>& x_values, const ScenarioConfig& base);

/// Uniform ground region for random eavesdropper placement.
struct PlacementRegion {
    double x_min = -1000.0;
    double x_max = 1000.0;
    double y_min = -1000.0;
    double y_max = 1000.0;
    double z = 0.0;
};

enum class MonteCarloKind { EavesdropperPlacement, CsiError, RayleighFading };

struct MonteCarloSpec {
    MonteCarloKind kind = MonteCarloKind::EavesdropperPlacement;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::vector<int> k_values{1, 2, 3, 4, 5};
    PlacementRegion region;
    std::vector<double> mu_values{0.0, 0.05, 0.1, 0.2};
    ScenarioConfig base;
};

struct MonteCarloRow {
    double parameter = 0.0; // K or mu; 0 for the fading run
    std::size_t trials = 0;
    std::size_t failures = 0;
    double mean_cne = 0.0;
    double stderr_cne = 0.0;
    /// Mean of realized weighted leakage minus D_th (CSI and fading runs).
    double mean_residual = 0.0;
};

/// Per trial, draws max(K) eavesdroppers and for each K uses the first K,
/// keeping the strongest ground and air eavesdropping gains.
[[nodiscard]] std::vector<MonteCarloRow> run_multi_eve(const MonteCarloSpec& spec);

/// Per trial, perturbs each gain by (1 + e), e ~ N(0, mu^2), solves on the
/// estimate and evaluates CNE and realized leakage on the true gains with a
/// Rayleigh draw on the sensor-eavesdropper link.
[[nodiscard]] std::vector<MonteCarloRow> run_csi_mc(const MonteCarloSpec& spec);

/// Realized leakage of the nominal solution under Rayleigh fading of the ground link.
[[nodiscard]] std::vector<MonteCarloRow> run_fading_mc(const MonteCarloSpec& spec);

[[nodiscard]] std::vector<MonteCarloRow> run_monte_carlo(const MonteCarloSpec& spec);

/// Runs fn(i) for i in [0, n) on worker threads; each index is handled exactly once.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Fixed column order: swept_value, scheme, cne_bits, leakage_bits, case, p_u_w, b_u_hz,
/// t_u_s, p_d_w, b_d_hz, t_d_s, t_c_s, objective.
void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_rows_json(std::ostream& out, const std::vector<ResultRow>& rows);
void write_monte_carlo_csv(std::ostream& out, MonteCarloKind kind, const std::vector<MonteCarloRow>& rows);
void write_monte_carlo_json(std::ostream& out, MonteCarloKind kind, const std::vector<MonteCarloRow>& rows);

/// Sweep file: scenario keys plus `sweep_parameter`, `sweep_values` and optional `schemes`.
[[nodiscard]] SweepSpec load_sweep_spec(const std::filesystem::path& path);
/// Monte Carlo file: scenario keys plus `mc_kind` (multi_eve, csi, fading), `trials`,
/// `seed`, `k_values`, `mu_values`, `region_{x,y}_{min,max}_m`.
[[nodiscard]] MonteCarloSpec load_monte_carlo_spec(const std::filesystem::path& path);

} // namespace loopsec
