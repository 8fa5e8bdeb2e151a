#include "loopsec/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <fmt/core.h>

#include "loopsec/errors.hpp"

namespace loopsec {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Field {
    const char* name;
    std::function<double(const ScenarioConfig&)> get;
    std::function<void(ScenarioConfig&, double)> set;
};

template <typename Access>
Field value_field(const char* name, Access access) {
    return {name, [access](const ScenarioConfig& c) { return access(c); },
            [access](ScenarioConfig& c, double v) { access(c) = v; }};
}

template <typename Access>
Field optional_field(const char* name, Access access) {
    return {name,
            [access](const ScenarioConfig& c) {
                return access(c).value_or(std::numeric_limits<double>::quiet_NaN());
            },
            [access](ScenarioConfig& c, double v) { access(c) = v; }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        value_field("sensor_x_m", [](auto& c) -> auto& { return c.geometry.sensor.x; }),
        value_field("sensor_y_m", [](auto& c) -> auto& { return c.geometry.sensor.y; }),
        value_field("sensor_z_m", [](auto& c) -> auto& { return c.geometry.sensor.z; }),
        value_field("eih_x_m", [](auto& c) -> auto& { return c.geometry.hub.x; }),
        value_field("eih_y_m", [](auto& c) -> auto& { return c.geometry.hub.y; }),
        value_field("eih_z_m", [](auto& c) -> auto& { return c.geometry.hub.z; }),
        value_field("robot_x_m", [](auto& c) -> auto& { return c.geometry.robot.x; }),
        value_field("robot_y_m", [](auto& c) -> auto& { return c.geometry.robot.y; }),
        value_field("robot_z_m", [](auto& c) -> auto& { return c.geometry.robot.z; }),
        value_field("eve_x_m", [](auto& c) -> auto& { return c.geometry.eavesdropper.x; }),
        value_field("eve_y_m", [](auto& c) -> auto& { return c.geometry.eavesdropper.y; }),
        value_field("eve_z_m", [](auto& c) -> auto& { return c.geometry.eavesdropper.z; }),
        value_field("kappa_air", [](auto& c) -> auto& { return c.path_loss.kappa_air; }),
        value_field("eta_air", [](auto& c) -> auto& { return c.path_loss.eta_air; }),
        value_field("kappa_ground", [](auto& c) -> auto& { return c.path_loss.kappa_ground; }),
        value_field("eta_ground", [](auto& c) -> auto& { return c.path_loss.eta_ground; }),
        value_field("n0_dbm_per_hz", [](auto& c) -> auto& { return c.n0_dbm_per_hz; }),
        value_field("p_umax_watts", [](auto& c) -> auto& { return c.limits.p_umax; }),
        value_field("p_dmax_watts", [](auto& c) -> auto& { return c.limits.p_dmax; }),
        value_field("b_max_hz", [](auto& c) -> auto& { return c.limits.b_max; }),
        value_field("t_total_s", [](auto& c) -> auto& { return c.limits.t_total; }),
        value_field("f_max_hz", [](auto& c) -> auto& { return c.limits.f_max; }),
        value_field("alpha_cycles_per_bit", [](auto& c) -> auto& { return c.compute.alpha; }),
        value_field("rho", [](auto& c) -> auto& { return c.compute.rho; }),
        value_field("d_th_bits", [](auto& c) -> auto& { return c.policy.d_th; }),
        optional_field("g_u", [](auto& c) -> auto& { return c.g_u; }),
        optional_field("g_d", [](auto& c) -> auto& { return c.g_d; }),
        optional_field("g_se", [](auto& c) -> auto& { return c.g_se; }),
        optional_field("g_ce", [](auto& c) -> auto& { return c.g_ce; }),
        optional_field("separate_split", [](auto& c) -> auto& { return c.separate.split; }),
        optional_field("separate_downlink_time_s", [](auto& c) -> auto& { return c.separate.downlink_time; }),
    };
    return table;
}

const Field& field(const std::string& key) {
    for (const Field& f : fields()) {
        if (key == f.name) {
            return f;
        }
    }
    throw ConfigError(fmt::format("unknown scenario key '{}'", key));
}

} // namespace

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(fmt::format("line {}: empty key or value", lineno));
        }
        if (!kv.emplace(key, value).second) {
            throw ConfigError(fmt::format("line {}: duplicate key '{}'", lineno, key));
        }
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

double parse_number(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError(fmt::format("key '{}': '{}' is not a finite number", key, value));
    }
    return out;
}

std::vector<double> parse_number_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    if (value.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::istringstream in(value);
        std::string item;
        while (std::getline(in, item, ':')) {
            parts.push_back(parse_number(key, item));
        }
        if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
            throw ConfigError(fmt::format("key '{}': range must be start:step:stop with step > 0", key));
        }
        const auto n = static_cast<long>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
        for (long i = 0; i <= n; ++i) {
            out.push_back(parts[0] + static_cast<double>(i) * parts[1]);
        }
        return out;
    }
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(parse_number(key, item));
    }
    if (out.empty()) {
        throw ConfigError(fmt::format("key '{}': empty list", key));
    }
    return out;
}

ScenarioConfig ScenarioConfig::defaults() {
    return ScenarioConfig{};
}

ScenarioConfig ScenarioConfig::superior_eavesdropper() {
    ScenarioConfig c;
    c.geometry.robot = {-800.0, 0.0, 0.0};
    c.geometry.eavesdropper = {-460.0, 0.0, 0.0};
    return c;
}

bool ScenarioConfig::is_key(const std::string& key) {
    for (const Field& f : fields()) {
        if (key == f.name) {
            return true;
        }
    }
    return false;
}

const std::vector<std::string>& ScenarioConfig::keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const Field& f : fields()) {
            v.emplace_back(f.name);
        }
        return v;
    }();
    return names;
}

void ScenarioConfig::set(const std::string& key, double value) {
    field(key).set(*this, value);
}

void ScenarioConfig::set(const std::string& key, const std::string& value) {
    set(key, parse_number(key, value));
}

double ScenarioConfig::get(const std::string& key) const {
    return field(key).get(*this);
}

void ScenarioConfig::apply(const KeyValues& kv) {
    for (const auto& [key, value] : kv) {
        if (is_key(key)) {
            set(key, value);
        }
    }
}

ChannelGains ScenarioConfig::gains() const {
    const double n0 = dbm_per_hz_to_watts_per_hz(n0_dbm_per_hz);
    ChannelGains g;
    path_loss.validate();
    // Each gain falls back to geometry only when it is not given directly.
    g.g_u = g_u ? *g_u : path_loss_gain(geometry.sensor, geometry.hub, path_loss.kappa_air, path_loss.eta_air);
    g.g_d = g_d ? *g_d : path_loss_gain(geometry.hub, geometry.robot, path_loss.kappa_air, path_loss.eta_air);
    g.g_se = g_se ? *g_se
                  : path_loss_gain(geometry.sensor, geometry.eavesdropper, path_loss.kappa_ground,
                                   path_loss.eta_ground);
    g.g_ce = g_ce ? *g_ce
                  : path_loss_gain(geometry.hub, geometry.eavesdropper, path_loss.kappa_air, path_loss.eta_air);
    g.n0 = n0;
    g.validate();
    return g;
}

Scenario ScenarioConfig::to_scenario() const {
    Scenario s{gains(), limits, compute, policy};
    s.validate();
    return s;
}

std::string ScenarioConfig::to_text() const {
    std::string out;
    for (const Field& f : fields()) {
        const double v = f.get(*this);
        if (!std::isnan(v)) {
            out += fmt::format("{} = {:.17g}\n", f.name, v);
        }
    }
    return out;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    const KeyValues kv = read_key_values(path);
    for (const auto& [key, value] : kv) {
        if (!ScenarioConfig::is_key(key)) {
            throw ConfigError(fmt::format("{}: unknown scenario key '{}'", path.string(), key));
        }
    }
    ScenarioConfig c = ScenarioConfig::defaults();
    c.apply(kv);
    return c;
}

} // namespace loopsec
