#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loopsec/baselines.hpp"
#include "loopsec/channel_model.hpp"
#include "loopsec/loop_model.hpp"

namespace loopsec {

/// `key = value` pairs, one per line; `#` starts a comment.
using KeyValues = std::map<std::string, std::string>;

[[nodiscard]] KeyValues parse_key_values(const std::string& text);
[[nodiscard]] KeyValues read_key_values(const std::filesystem::path& path);

[[nodiscard]] double parse_number(const std::string& key, const std::string& value);
/// Comma-separated numbers, or `start:step:stop` (inclusive).
[[nodiscard]] std::vector<double> parse_number_list(const std::string& key, const std::string& value);

/// One problem instance in user units (positions in m, noise in dBm/Hz).
struct ScenarioConfig {
    Geometry geometry;
    PathLossModel path_loss;
    double n0_dbm_per_hz = -174.0;
    ResourceLimits limits;
    ComputeModel compute;
    SecurityPolicy policy;
    /// Direct gain values; each replaces the geometry-derived one when set.
    std::optional<double> g_u, g_d, g_se, g_ce;
    SeparateLinksOptions separate;

    /// Case-I layout with the default resource limits.
    [[nodiscard]] static ScenarioConfig defaults();
    /// Layout where the eavesdropper beats both legitimate links.
    [[nodiscard]] static ScenarioConfig superior_eavesdropper();

    [[nodiscard]] static bool is_key(const std::string& key);
    [[nodiscard]] static const std::vector<std::string>& keys();
    /// Throws ConfigError on unknown keys or malformed numbers.
    void set(const std::string& key, double value);
    void set(const std::string& key, const std::string& value);
    [[nodiscard]] double get(const std::string& key) const;

    /// Applies the scenario keys of `kv`; other keys are left to the caller.
    void apply(const KeyValues& kv);

    [[nodiscard]] ChannelGains gains() const;
    [[nodiscard]] Scenario to_scenario() const;
    [[nodiscard]] std::string to_text() const;
};

/// Scenario file: every key must be a scenario key.
[[nodiscard]] ScenarioConfig load_scenario(const std::filesystem::path& path);

} // namespace loopsec
