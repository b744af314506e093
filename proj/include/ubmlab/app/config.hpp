#pragma once

// Suite configuration: a JSON document with explicit keys. Unknown keys are
// rejected, and serialization round-trips losslessly.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ubmlab/errors.hpp"
#include "ubmlab/mc.hpp"

namespace ubmlab::app {

using Json = nlohmann::ordered_json;

struct FixtureConfig {
    std::size_t r_plus = 4;
    std::size_t s_plus = 4;
    bool rotate = false;
    std::uint64_t rotation_seed = 0;

    bool operator==(const FixtureConfig&) const = default;
};

/// One verification to run. Optional fields override the suite defaults.
struct CheckSpec {
    /// f1_closed_form | biane_mc | heat_kernel_mc | theorem1 | binom | theorem2 |
    /// h_identity | trzero_covariance | tensor_ode | scheme_agreement
    std::string kind;
    std::size_t n = 2;
    std::size_t k = 1;
    double t = 0.5;
    double h_fd = 0.02;
    std::size_t nodes = 11;
    /// none | swapped (negative control for theorem1)
    std::string parity_hook = "none";
    std::optional<std::size_t> N;
    std::optional<std::size_t> M;
    std::optional<double> h;
    std::optional<std::string> scheme;
    std::optional<FixtureConfig> fixture;

    bool operator==(const CheckSpec&) const = default;
};

struct SimulateRequest {
    /// Any of F, nu, mu.
    std::vector<std::string> quantities{"F", "nu", "mu"};
    std::vector<std::size_t> n;
    std::vector<double> t;

    bool operator==(const SimulateRequest&) const = default;
};

struct TableRequest {
    /// Moment CSVs to merge; empty means <output_dir>/moments.csv.
    std::vector<std::string> inputs;
    std::size_t dense_points = 101;

    bool operator==(const TableRequest&) const = default;
};

struct SuiteConfig {
    std::size_t N = 4;
    std::size_t M = 20000;
    /// Simulation step; each run's horizon is the latest time it needs.
    double h = 1e-3;
    std::string scheme = "geometric";
    std::uint64_t master_seed = 1;
    /// Worker threads, 0 for all hardware threads. Never affects results.
    unsigned threads = 1;
    FixtureConfig fixture;
    std::string output_dir = "out";
    SimulateRequest simulate;
    TableRequest table;
    std::vector<CheckSpec> checks;

    bool operator==(const SuiteConfig&) const = default;
};

inline const std::vector<std::string>& check_kinds() {
    static const std::vector<std::string> kinds{"f1_closed_form", "biane_mc", "heat_kernel_mc", "theorem1", "binom",
                                                "theorem2", "h_identity", "trzero_covariance", "tensor_ode",
                                                "scheme_agreement"};
    return kinds;
}

namespace detail {

inline void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <class T>
void read_opt(const Json& j, const char* key, std::optional<T>& out, const std::string& where) {
    if (!j.contains(key)) return;
    T value{};
    read(j, key, value, where);
    out = value;
}

}  // namespace detail

inline Json to_json(const FixtureConfig& f) {
    return Json{{"r_plus", f.r_plus}, {"s_plus", f.s_plus}, {"rotate", f.rotate}, {"rotation_seed", f.rotation_seed}};
}

inline FixtureConfig fixture_from_json(const Json& j, const std::string& where) {
    detail::require_keys(j, {"r_plus", "s_plus", "rotate", "rotation_seed"}, where);
    FixtureConfig f;
    detail::read(j, "r_plus", f.r_plus, where);
    detail::read(j, "s_plus", f.s_plus, where);
    detail::read(j, "rotate", f.rotate, where);
    detail::read(j, "rotation_seed", f.rotation_seed, where);
    return f;
}

inline Json to_json(const CheckSpec& c) {
    Json j{{"kind", c.kind}, {"n", c.n}, {"k", c.k}, {"t", c.t}, {"h_fd", c.h_fd}, {"nodes", c.nodes}, {"parity_hook", c.parity_hook}};
    if (c.N) j["N"] = *c.N;
    if (c.M) j["M"] = *c.M;
    if (c.h) j["h"] = *c.h;
    if (c.scheme) j["scheme"] = *c.scheme;
    if (c.fixture) j["fixture"] = to_json(*c.fixture);
    return j;
}

inline CheckSpec check_from_json(const Json& j, const std::string& where) {
    detail::require_keys(j, {"kind", "n", "k", "t", "h_fd", "nodes", "parity_hook", "N", "M", "h", "scheme", "fixture"}, where);
    CheckSpec c;
    if (!j.contains("kind")) throw ConfigError(where + ": missing 'kind'");
    detail::read(j, "kind", c.kind, where);
    detail::read(j, "n", c.n, where);
    detail::read(j, "k", c.k, where);
    detail::read(j, "t", c.t, where);
    detail::read(j, "h_fd", c.h_fd, where);
    detail::read(j, "nodes", c.nodes, where);
    detail::read(j, "parity_hook", c.parity_hook, where);
    detail::read_opt(j, "N", c.N, where);
    detail::read_opt(j, "M", c.M, where);
    detail::read_opt(j, "h", c.h, where);
    detail::read_opt(j, "scheme", c.scheme, where);
    if (j.contains("fixture")) c.fixture = fixture_from_json(j.at("fixture"), where + ".fixture");
    return c;
}

inline Json to_json(const SuiteConfig& c) {
    Json checks = Json::array();
    for (const auto& spec : c.checks) checks.push_back(to_json(spec));
    return Json{{"N", c.N},
                {"M", c.M},
                {"h", c.h},
                {"scheme", c.scheme},
                {"master_seed", c.master_seed},
                {"threads", c.threads},
                {"fixture", to_json(c.fixture)},
                {"output_dir", c.output_dir},
                {"simulate", Json{{"quantities", c.simulate.quantities}, {"n", c.simulate.n}, {"t", c.simulate.t}}},
                {"table", Json{{"inputs", c.table.inputs}, {"dense_points", c.table.dense_points}}},
                {"checks", checks}};
}

/// Throws ConfigError on bad values that parsing alone cannot catch.
inline void validate(const SuiteConfig& c) {
    auto check_fixture = [](const FixtureConfig& f, std::size_t dim, const std::string& where) {
        if (f.r_plus > dim || f.s_plus > dim) throw ConfigError(where + ": plus counts must not exceed N");
    };
    auto check_scheme = [](const std::string& s, const std::string& where) {
        if (s != "geometric" && s != "euler") throw ConfigError(where + ": scheme must be 'geometric' or 'euler'");
    };
    if (c.N == 0) throw ConfigError("N must be positive");
    if (c.M < 2) throw ConfigError("M must be at least 2");
    if (!(c.h > 0.0)) throw ConfigError("h must be positive");
    check_scheme(c.scheme, "scheme");
    check_fixture(c.fixture, c.N, "fixture");
    for (const auto& q : c.simulate.quantities) {
        if (q != "F" && q != "nu" && q != "mu") throw ConfigError("simulate.quantities: unknown quantity '" + q + "'");
    }
    for (auto n : c.simulate.n) {
        if (n == 0) throw ConfigError("simulate.n: orders must be positive");
    }
    for (double t : c.simulate.t) {
        if (!(t >= 0.0)) throw ConfigError("simulate.t: times must be non-negative");
    }
    if (c.table.dense_points < 2) throw ConfigError("table.dense_points must be at least 2");
    for (std::size_t i = 0; i < c.checks.size(); ++i) {
        const auto& s = c.checks[i];
        const std::string where = "checks[" + std::to_string(i) + "]";
        const auto& kinds = check_kinds();
        if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end()) throw ConfigError(where + ": unknown kind '" + s.kind + "'");
        if (s.parity_hook != "none" && s.parity_hook != "swapped") throw ConfigError(where + ": parity_hook must be 'none' or 'swapped'");
        const std::size_t dim = s.N.value_or(c.N);
        if (dim == 0) throw ConfigError(where + ": N must be positive");
        if (s.M && *s.M < 2) throw ConfigError(where + ": M must be at least 2");
        if (s.h && !(*s.h > 0.0)) throw ConfigError(where + ": h must be positive");
        if (s.scheme) check_scheme(*s.scheme, where + ".scheme");
        check_fixture(s.fixture.value_or(c.fixture), dim, where + ".fixture");
        if (!(s.t >= 0.0)) throw ConfigError(where + ": t must be non-negative");
    }
}

inline SuiteConfig config_from_json(const Json& j) {
    detail::require_keys(j, {"N", "M", "h", "scheme", "master_seed", "threads", "fixture", "output_dir", "simulate", "table", "checks"},
                         "config");
    SuiteConfig c;
    detail::read(j, "N", c.N, "config");
    detail::read(j, "M", c.M, "config");
    detail::read(j, "h", c.h, "config");
    detail::read(j, "scheme", c.scheme, "config");
    detail::read(j, "master_seed", c.master_seed, "config");
    detail::read(j, "threads", c.threads, "config");
    if (j.contains("fixture")) c.fixture = fixture_from_json(j.at("fixture"), "config.fixture");
    detail::read(j, "output_dir", c.output_dir, "config");
    if (j.contains("simulate")) {
        const auto& s = j.at("simulate");
        detail::require_keys(s, {"quantities", "n", "t"}, "config.simulate");
        detail::read(s, "quantities", c.simulate.quantities, "config.simulate");
        detail::read(s, "n", c.simulate.n, "config.simulate");
        detail::read(s, "t", c.simulate.t, "config.simulate");
    }
    if (j.contains("table")) {
        const auto& s = j.at("table");
        detail::require_keys(s, {"inputs", "dense_points"}, "config.table");
        detail::read(s, "inputs", c.table.inputs, "config.table");
        detail::read(s, "dense_points", c.table.dense_points, "config.table");
    }
    if (j.contains("checks")) {
        const auto& arr = j.at("checks");
        if (!arr.is_array()) throw ConfigError("config.checks: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) c.checks.push_back(check_from_json(arr[i], "config.checks[" + std::to_string(i) + "]"));
    }
    validate(c);
    return c;
}

inline SuiteConfig parse_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline SuiteConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

inline std::string dump_config(const SuiteConfig& c) { return to_json(c).dump(2) + "\n"; }

/// Suite defaults merged with the overrides of one check.
inline McConfig mc_config_for(const SuiteConfig& suite, const CheckSpec* spec, double horizon) {
    McConfig cfg;
    const FixtureConfig fx = spec && spec->fixture ? *spec->fixture : suite.fixture;
    cfg.fixture = FixtureSpec{spec && spec->N ? *spec->N : suite.N, fx.r_plus, fx.s_plus, fx.rotate, fx.rotation_seed};
    cfg.paths = spec && spec->M ? *spec->M : suite.M;
    cfg.grid = TimeGrid::with_step(spec && spec->h ? *spec->h : suite.h, horizon);
    cfg.scheme = scheme_from_string(spec && spec->scheme ? *spec->scheme : suite.scheme);
    cfg.master_seed = suite.master_seed;
    cfg.threads = suite.threads;
    return cfg;
}

}  // namespace ubmlab::app
