#pragma once

// Run configuration and its JSON schema.
//
// {
//   "geometry":  { "outer_half_extents": [3], "cavity_half_extents": [3], "cavity_offset": [3],
//                  "rho_B": x, "nu": x },
//   "grid":      [n1, n2, n3],
//   "initial":   { "velocity": { "kind": "zero" | "random_solenoidal" | "vortex",
//                                "amplitude": x, "axis": [3] },
//                  "omega_bar0": [3]  or  "A0": [3],
//                  "L0": [3] },
//   "time":      { "T": x, "dt": x (optional), "dt_safety": x, "sample_interval": x },
//   "tolerances": { ... optional overrides, see Tolerances },
//   "mode":      "coupled" | "dry_run",
//   "seed":      n,
//   "output_dir": "path"
// }
//
// Unknown keys are rejected everywhere.

#include "cavitydyn/geometry.hpp"

#include <cstdint>
#include <fstream>
#include <set>

namespace cavitydyn {

struct VelocityInit {
    std::string kind = "zero";
    double amplitude = 0.0;
    Vec3 axis = Vec3::UnitZ();
};

struct Tolerances {
    double picard_rel_tol = 1e-10;
    int max_picard = 50;
    double angle_deg = 5.0;
    double residual = 1e-2;
    double u_rel = 1e-2;
    double budget_r_tol = 0.02;
    double monotonic_slack = 1e-6;
};

struct RunConfig {
    GeometrySpec geometry;
    std::array<int, 3> grid{16, 16, 16};
    VelocityInit velocity;
    std::optional<Vec3> omega_bar0;
    std::optional<Vec3> A0;
    Vec3 L0 = Vec3::Zero();
    double T = 1.0;
    std::optional<double> dt;
    double dt_safety = 0.5;
    double sample_interval = 0.01;
    Tolerances tol;
    bool dry_run = false;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    void validate() const {
        geometry.validate();
        for (int a = 0; a < 3; ++a) {
            if (grid[a] < 4) {
                throw ConfigError("config key 'grid': at least 4 cells per axis are required");
            }
        }
        if (omega_bar0.has_value() == A0.has_value()) {
            throw ConfigError("config key 'initial': exactly one of 'omega_bar0' and 'A0' must be given");
        }
        if (velocity.kind != "zero" && velocity.kind != "random_solenoidal" && velocity.kind != "vortex") {
            throw ConfigError("config key 'initial.velocity.kind': unknown kind '" + velocity.kind + "'");
        }
        if (velocity.kind != "zero" && !(velocity.amplitude > 0.0)) {
            throw ConfigError("config key 'initial.velocity.amplitude': must be positive");
        }
        if (velocity.kind == "vortex" && !(velocity.axis.norm() > 0.0)) {
            throw ConfigError("config key 'initial.velocity.axis': must be nonzero");
        }
        if (!(T > 0.0)) {
            throw ConfigError("config key 'time.T': must be positive");
        }
        if (dt && !(*dt > 0.0)) {
            throw ConfigError("config key 'time.dt': must be positive");
        }
        if (!(dt_safety > 0.0 && dt_safety <= 1.0)) {
            throw ConfigError("config key 'time.dt_safety': must lie in (0, 1]");
        }
        if (!(sample_interval > 0.0)) {
            throw ConfigError("config key 'time.sample_interval': must be positive");
        }
        if (dt && sample_interval < *dt * (1.0 - 1e-12)) {
            throw ConfigError("config key 'time.sample_interval': must be at least dt");
        }
        const std::pair<const char*, double> positive[] = {
            {"picard_rel_tol", tol.picard_rel_tol}, {"angle_deg", tol.angle_deg},
            {"residual", tol.residual},             {"u_rel", tol.u_rel},
            {"budget_r_tol", tol.budget_r_tol},     {"monotonic_slack", tol.monotonic_slack}};
        for (const auto& [key, value] : positive) {
            if (!(value > 0.0)) {
                throw ConfigError(std::string("config key 'tolerances.") + key + "': must be positive");
            }
        }
        if (tol.max_picard < 1) {
            throw ConfigError("config key 'tolerances.max_picard': must be positive");
        }
    }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) {
        throw ConfigError("config key '" + where + "': expected an object");
    }
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("config key '" + (where.empty() ? key : where + "." + key) + "': unknown key");
        }
    }
}

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) {
        throw ConfigError("config key '" + (where.empty() ? std::string(key) : where + "." + key) + "': missing");
    }
    return j.at(key);
}

inline std::string join_key(const std::string& where, const char* key) {
    return where.empty() ? std::string(key) : where + "." + key;
}

} // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
    using namespace detail;
    reject_unknown(j, "", {"geometry", "grid", "initial", "time", "tolerances", "mode", "seed", "output_dir"});
    RunConfig c;
    c.geometry = geometry_from_json(require(j, "", "geometry"));
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (!g.is_array() || g.size() != 3) {
            throw ConfigError("config key 'grid': expected three integers");
        }
        for (int a = 0; a < 3; ++a) {
            if (!g[a].is_number_integer()) {
                throw ConfigError("config key 'grid': expected three integers");
            }
            c.grid[a] = g[a].get<int>();
        }
    }
    const auto& ini = require(j, "", "initial");
    reject_unknown(ini, "initial", {"velocity", "omega_bar0", "A0", "L0"});
    if (ini.contains("velocity")) {
        const auto& v = ini.at("velocity");
        reject_unknown(v, "initial.velocity", {"kind", "amplitude", "axis"});
        const auto& kind = require(v, "initial.velocity", "kind");
        if (!kind.is_string()) {
            throw ConfigError("config key 'initial.velocity.kind': expected a string");
        }
        c.velocity.kind = kind.get<std::string>();
        if (v.contains("amplitude")) {
            c.velocity.amplitude = number_from_json(v.at("amplitude"), "initial.velocity.amplitude");
        }
        if (v.contains("axis")) {
            c.velocity.axis = vec3_from_json(v.at("axis"), "initial.velocity.axis");
        }
    }
    if (ini.contains("omega_bar0")) {
        c.omega_bar0 = vec3_from_json(ini.at("omega_bar0"), "initial.omega_bar0");
    }
    if (ini.contains("A0")) {
        c.A0 = vec3_from_json(ini.at("A0"), "initial.A0");
    }
    if (ini.contains("L0")) {
        c.L0 = vec3_from_json(ini.at("L0"), "initial.L0");
    }
    const auto& tm = require(j, "", "time");
    reject_unknown(tm, "time", {"T", "dt", "dt_safety", "sample_interval"});
    c.T = number_from_json(require(tm, "time", "T"), "time.T");
    if (tm.contains("dt")) {
        c.dt = number_from_json(tm.at("dt"), "time.dt");
    }
    if (tm.contains("dt_safety")) {
        c.dt_safety = number_from_json(tm.at("dt_safety"), "time.dt_safety");
    }
    if (tm.contains("sample_interval")) {
        c.sample_interval = number_from_json(tm.at("sample_interval"), "time.sample_interval");
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        reject_unknown(t, "tolerances",
                       {"picard_rel_tol", "max_picard", "angle_deg", "residual", "u_rel", "budget_r_tol",
                        "monotonic_slack"});
        auto num = [&](const char* key, double& dst) {
            if (t.contains(key)) {
                dst = number_from_json(t.at(key), join_key("tolerances", key));
            }
        };
        num("picard_rel_tol", c.tol.picard_rel_tol);
        num("angle_deg", c.tol.angle_deg);
        num("residual", c.tol.residual);
        num("u_rel", c.tol.u_rel);
        num("budget_r_tol", c.tol.budget_r_tol);
        num("monotonic_slack", c.tol.monotonic_slack);
        if (t.contains("max_picard")) {
            if (!t.at("max_picard").is_number_integer()) {
                throw ConfigError("config key 'tolerances.max_picard': expected an integer");
            }
            c.tol.max_picard = t.at("max_picard").get<int>();
        }
    }
    if (j.contains("mode")) {
        const auto& m = j.at("mode");
        if (!m.is_string() || (m != "coupled" && m != "dry_run")) {
            throw ConfigError("config key 'mode': expected \"coupled\" or \"dry_run\"");
        }
        c.dry_run = m == "dry_run";
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) {
            throw ConfigError("config key 'seed': expected a non-negative integer");
        }
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) {
            throw ConfigError("config key 'output_dir': expected a string");
        }
        c.output_dir = j.at("output_dir").get<std::string>();
    }
    c.validate();
    return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
    using detail::vec3_to_json;
    nlohmann::json j;
    j["geometry"] = geometry_to_json(c.geometry);
    j["grid"] = c.grid;
    nlohmann::json v{{"kind", c.velocity.kind}};
    if (c.velocity.kind != "zero") {
        v["amplitude"] = c.velocity.amplitude;
    }
    if (c.velocity.kind == "vortex") {
        v["axis"] = vec3_to_json(c.velocity.axis);
    }
    j["initial"]["velocity"] = v;
    if (c.omega_bar0) {
        j["initial"]["omega_bar0"] = vec3_to_json(*c.omega_bar0);
    }
    if (c.A0) {
        j["initial"]["A0"] = vec3_to_json(*c.A0);
    }
    j["initial"]["L0"] = vec3_to_json(c.L0);
    j["time"] = {{"T", c.T}, {"dt_safety", c.dt_safety}, {"sample_interval", c.sample_interval}};
    if (c.dt) {
        j["time"]["dt"] = *c.dt;
    }
    j["tolerances"] = {{"picard_rel_tol", c.tol.picard_rel_tol}, {"max_picard", c.tol.max_picard},
                       {"angle_deg", c.tol.angle_deg},           {"residual", c.tol.residual},
                       {"u_rel", c.tol.u_rel},                   {"budget_r_tol", c.tol.budget_r_tol},
                       {"monotonic_slack", c.tol.monotonic_slack}};
    j["mode"] = c.dry_run ? "dry_run" : "coupled";
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    return j;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot open config file " + path);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

/// FNV-1a of the canonical JSON dump (output directory excluded); identifies
/// the config in checkpoints.
inline std::string config_hash(const RunConfig& c) {
    nlohmann::json j = config_to_json(c);
    j.erase("output_dir");
    const std::string s = j.dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace cavitydyn
