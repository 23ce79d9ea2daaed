#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfpls/beamformer.hpp"

namespace nfpls {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// "theta:value" with value in fractions of the Rayleigh distance, or
/// "theta:<meters>m" for absolute ranges.
struct PositionSpec {
    double theta = 0;
    double value = 0;
    bool meters = false;

    double resolve_range(const ArrayGeometry& geom) const {
        return meters ? value : value * geom.rayleigh_distance();
    }
    PolarPosition resolve(const ArrayGeometry& geom) const {
        return PolarPosition(theta, resolve_range(geom));
    }
};

/// One experiment: scenario parameters, sweep axis, scheme list, output.
/// All dB/dBm fields are converted to linear only when scenarios are built.
struct ExperimentConfig {
    int schema_version = 1;
    std::string experiment = "custom";

    int num_antennas = 256;      // closed-form-only runs
    int num_antennas_sca = 16;   // runs containing any SCA-based scheme
    double carrier_ghz = 100.0;
    double spacing_over_lambda = 0.5;

    double power_dbm = 30.0;
    double noise_dbm = -80.0;
    double phi_db = 3.0;
    double kappa_db = -15.0;
    int num_paths = 2;

    std::vector<PositionSpec> users;
    PositionSpec eve{0.0, 0.05, false};

    std::vector<std::string> schemes;
    std::vector<std::uint64_t> seeds{1};

    // power_dbm | user_theta | user_range_frac | num_users | an_power_frac | none
    std::string sweep = "none";
    int sweep_user = 1;  // 1-based index of the user a position sweep moves
    std::vector<double> sweep_values;

    std::string out = "results.csv";
    std::string format = "csv";
    int threads = 1;

    std::vector<int> bench_users{2, 3, 4};
    int bench_reps = 5;

    SCAConfig sca;

    bool has_sca_scheme() const {
        for (const auto& s : schemes)
            if (s == "conventional" || s == "proposed" || s == "baseline2" || s == "baseline3")
                return true;
        return false;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_num(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::runtime_error("config: bad number '" + s + "' for key '" + key + "'");
    }
}

inline PositionSpec parse_position(const std::string& s, const std::string& key) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw std::runtime_error("config: position '" + s + "' for '" + key +
                                 "' must be theta:range");
    PositionSpec p;
    p.theta = parse_num(trim(s.substr(0, colon)), key);
    std::string rest = trim(s.substr(colon + 1));
    if (!rest.empty() && (rest.back() == 'm' || rest.back() == 'M')) {
        p.meters = true;
        rest = trim(rest.substr(0, rest.size() - 1));
    }
    p.value = parse_num(rest, key);
    return p;
}

}  // namespace detail

/// Named defaults for the packaged experiments. `custom` starts from the
/// plain struct defaults and expects the file to fill in the rest.
inline ExperimentConfig experiment_defaults(const std::string& id) {
    ExperimentConfig c;
    c.experiment = id;
    if (id == "fig2") {
        // single-link power-split curves; per-case geometry is built in
        c.schemes = {"case1", "case2", "case3"};
        c.num_paths = 0;
        c.sweep = "an_power_frac";
        for (int i = 0; i <= 100; ++i) c.sweep_values.push_back(i / 100.0);
    } else if (id == "fig4") {
        c.schemes = {"an_optimal", "no_an"};
        c.num_paths = 0;
        c.users = {{0.0, 0.05, false}};
        c.eve = {0.0, 0.05, false};
        c.sweep = "user_theta";
        for (int i = -25; i <= 25; ++i) c.sweep_values.push_back(i * 0.02);
    } else if (id == "fig6") {
        c.schemes = {"baseline1", "baseline3", "baseline2", "proposed", "conventional"};
        c.users = {{0.0, 0.06, false}, {0.0, 0.1, false}, {0.0, 0.3, false}};
        c.eve = {0.0, 0.05, false};
        c.num_paths = 2;
        c.seeds = {1, 2, 3};
        c.sweep = "power_dbm";
        c.sweep_values = {20, 25, 30, 35, 40};
    } else if (id == "fig7") {
        c.schemes = {"baseline1", "baseline3", "proposed", "conventional"};
        c.eve = {0.0, 0.05, false};
        c.num_paths = 2;
        c.seeds = {1, 2, 3};
        c.sweep = "num_users";
        c.sweep_values = {1, 2, 3, 4};
    } else if (id == "fig8") {
        c.schemes = {"baseline1", "baseline3", "baseline2", "proposed", "conventional"};
        c.users = {{0.0, 0.3, false}, {0.0, 0.3, false}};
        c.eve = {0.0, 0.05, false};
        c.num_paths = 0;  // keeps the mirror geometry exact
        c.sweep = "user_theta";
        c.sweep_user = 2;
        for (int i = -8; i <= 8; ++i) c.sweep_values.push_back(i * 0.025);
    } else if (id == "fig9") {
        c.schemes = {"baseline1", "proposed", "conventional"};
        c.users = {{0.0, 0.3, false}, {0.0, 0.3, false}};
        c.eve = {0.0, 0.05, false};
        c.num_paths = 0;
        c.sweep = "user_range_frac";
        c.sweep_user = 2;
        c.sweep_values = {0.125, 0.15, 0.175, 0.2, 0.225, 0.25, 0.275,
                          0.35,  0.4,  0.45,  0.5, 0.55,  0.6};
    } else if (id == "table1") {
        c.schemes = {"proposed", "conventional"};
        c.eve = {0.0, 0.05, false};
        c.num_paths = 0;
        c.bench_users = {2, 3, 4};
        c.bench_reps = 5;
    } else if (id == "custom") {
        // caller supplies everything
    } else {
        throw std::runtime_error("config: unknown experiment '" + id + "'");
    }
    return c;
}

/// Flat key = value file; '#' starts a comment; keys may appear in any order.
/// `experiment` selects the defaults, every other key overrides them.
inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " is not key = value");
        kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }

    if (kv.count("schema_version") && detail::parse_num(kv["schema_version"], "schema_version") != 1)
        throw std::runtime_error("config: unsupported schema_version (expected 1)");

    ExperimentConfig c = experiment_defaults(kv.count("experiment") ? kv["experiment"] : "custom");

    auto num = [&](const char* key, double& field) {
        if (kv.count(key)) field = detail::parse_num(kv[key], key);
    };
    auto integer = [&](const char* key, int& field) {
        if (kv.count(key)) field = (int)detail::parse_num(kv[key], key);
    };
    num("carrier_ghz", c.carrier_ghz);
    num("spacing_over_lambda", c.spacing_over_lambda);
    num("power_dbm", c.power_dbm);
    num("noise_dbm", c.noise_dbm);
    num("phi_db", c.phi_db);
    num("kappa_db", c.kappa_db);
    integer("num_antennas", c.num_antennas);
    integer("num_antennas_sca", c.num_antennas_sca);
    integer("num_paths", c.num_paths);
    integer("sweep_user", c.sweep_user);
    integer("threads", c.threads);
    integer("bench_reps", c.bench_reps);
    num("sca_objective_tolerance", c.sca.objective_tolerance);
    num("sca_subproblem_tolerance", c.sca.subproblem_tolerance);
    integer("sca_max_iters", c.sca.max_iters);

    if (kv.count("users")) {
        c.users.clear();
        for (const auto& s : detail::split_list(kv["users"]))
            c.users.push_back(detail::parse_position(s, "users"));
    }
    if (kv.count("eve")) c.eve = detail::parse_position(kv["eve"], "eve");
    if (kv.count("schemes")) c.schemes = detail::split_list(kv["schemes"]);
    if (kv.count("seeds")) {
        c.seeds.clear();
        for (const auto& s : detail::split_list(kv["seeds"]))
            c.seeds.push_back((std::uint64_t)detail::parse_num(s, "seeds"));
    }
    if (kv.count("sweep")) c.sweep = kv["sweep"];
    if (kv.count("sweep_values")) {
        c.sweep_values.clear();
        for (const auto& s : detail::split_list(kv["sweep_values"]))
            c.sweep_values.push_back(detail::parse_num(s, "sweep_values"));
    }
    if (kv.count("bench_users")) {
        c.bench_users.clear();
        for (const auto& s : detail::split_list(kv["bench_users"]))
            c.bench_users.push_back((int)detail::parse_num(s, "bench_users"));
    }
    if (kv.count("out")) c.out = kv["out"];
    if (kv.count("format")) c.format = kv["format"];

    if (c.sweep != "none" && c.sweep_values.empty())
        throw std::runtime_error("config: sweep grid must be non-empty");
    if (c.format != "csv" && c.format != "json")
        throw std::runtime_error("config: format must be csv or json");
    if (c.experiment == "custom" && c.schemes.empty())
        throw std::runtime_error("config: custom experiment needs a scheme list");
    return c;
}

}  // namespace nfpls
