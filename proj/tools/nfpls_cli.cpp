// Command-line front end: experiment sweeps, the runtime benchmark, and the
// single-link / interference-set inspectors.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "nfpls/nfpls.hpp"

namespace {

struct CommonFlags {
    std::string out;
    std::string format;
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void apply_flags(nfpls::ExperimentConfig& cfg, const CommonFlags& f) {
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.format.empty()) cfg.format = f.format;
    if (f.threads > 0) cfg.threads = f.threads;
    if (f.seed_set) cfg.seeds = {f.seed};
    if (const char* dir = std::getenv("NFPLS_OUT_DIR")) {
        if (!cfg.out.empty() && cfg.out.front() != '/') cfg.out = std::string(dir) + "/" + cfg.out;
    }
}

std::string sibling_path(const std::string& path, const std::string& tag) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return path + "_" + tag;
    return path.substr(0, dot) + "_" + tag + path.substr(dot);
}

int classify_error(const std::exception& e) {
    const std::string msg = e.what();
    if (msg.rfind("config:", 0) == 0) return 2;
    if (msg.find("cannot write") != std::string::npos ||
        msg.find("cannot open") != std::string::npos ||
        msg.find("write failed") != std::string::npos)
        return 4;
    return 3;
}

int cmd_run(const std::string& config_path, const CommonFlags& flags) {
    nfpls::ExperimentConfig cfg = nfpls::load_config(config_path);
    apply_flags(cfg, flags);
    const auto out = nfpls::run_experiment(cfg);
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    if (cfg.format == "json")
        nfpls::emit_json(out.rows, cfg.out);
    else
        nfpls::emit_csv(out.rows, cfg.out);
    if (cfg.experiment == "fig2") {
        for (const char* tag : {"case1", "case2", "case3"}) {
            std::vector<nfpls::ResultRow> subset;
            for (const auto& r : out.rows)
                if (r.scheme == tag) subset.push_back(r);
            const std::string p = sibling_path(cfg.out, tag);
            if (cfg.format == "json")
                nfpls::emit_json(subset, p);
            else
                nfpls::emit_csv(subset, p);
        }
    }
    std::cout << out.summary;
    std::cout << "wrote " << out.rows.size() << " rows to " << cfg.out << "\n";
    bool any_error = false;
    for (const auto& r : out.rows) any_error |= !r.error.empty();
    return any_error ? 3 : 0;
}

int cmd_bench(const std::string& config_path, const CommonFlags& flags) {
    nfpls::ExperimentConfig cfg = nfpls::load_config(config_path);
    apply_flags(cfg, flags);
    const auto out = nfpls::bench_runtime(cfg);
    nfpls::emit_bench_csv(out.rows, cfg.out);
    std::cout << out.summary;
    std::cout << "wrote " << out.rows.size() << " rows to " << cfg.out << "\n";
    return 0;
}

int cmd_diagnose(const std::string& config_path, const CommonFlags& flags) {
    nfpls::ExperimentConfig cfg = nfpls::load_config(config_path);
    apply_flags(cfg, flags);
    if (cfg.users.empty()) throw std::runtime_error("config: diagnose needs at least one user");
    const double freq = cfg.carrier_ghz * 1e9;
    const auto geom = nfpls::ArrayGeometry::make(
        cfg.num_antennas, freq, cfg.spacing_over_lambda * nfpls::kSpeedOfLight / freq);
    for (size_t i = 0; i < cfg.users.size(); ++i) {
        const auto user = cfg.users[i].resolve(geom);
        const auto eve = cfg.eve.resolve(geom);
        const auto link = nfpls::make_link(geom, user, eve, nfpls::dbm_to_watts(cfg.power_dbm),
                                           nfpls::dbm_to_watts(cfg.noise_dbm));
        const auto d = nfpls::diagnose(link);
        std::cout << "user " << (i + 1) << " (theta=" << user.theta << ", r=" << user.range
                  << " m):\n"
                  << "  g_b=" << link.g_b << " g_e=" << link.g_e << " rho=" << link.rho << "\n"
                  << "  secure_without_an=" << (d.secure_without_an ? "yes" : "no")
                  << " recoverable_with_an=" << (d.recoverable_with_an ? "yes" : "no") << "\n"
                  << "  p_e_min=";
        if (d.p_e_min)
            std::cout << *d.p_e_min << " W";
        else
            std::cout << "none";
        std::cout << "\n  case=" << nfpls::to_string(d.case_label)
                  << "\n  optimal_split: p_b=" << d.optimal_split.p_b
                  << " W, p_e=" << d.optimal_split.p_e << " W"
                  << "\n  max_secrecy_rate=" << d.max_secrecy_rate << " bits/s/Hz\n";
    }
    return 0;
}

int cmd_sets(const std::string& config_path, const CommonFlags& flags) {
    nfpls::ExperimentConfig cfg = nfpls::load_config(config_path);
    apply_flags(cfg, flags);
    if (cfg.users.empty()) throw std::runtime_error("config: sets needs at least one user");
    const double freq = cfg.carrier_ghz * 1e9;
    const auto geom = nfpls::ArrayGeometry::make(
        cfg.num_antennas, freq, cfg.spacing_over_lambda * nfpls::kSpeedOfLight / freq);
    std::vector<nfpls::PolarPosition> users;
    for (const auto& u : cfg.users) users.push_back(u.resolve(geom));
    bool linear = true;
    for (const auto& u : users)
        if (std::abs(u.theta - users.front().theta) > 1e-12) linear = false;
    const auto spec = nfpls::BeamSpec::solve(cfg.phi_db);
    const auto sets = nfpls::build_interference_sets(
        geom, spec, users,
        linear ? nfpls::UserDistribution::Linear : nfpls::UserDistribution::Uniform);
    std::cout << "distribution=" << (linear ? "linear" : "uniform")
              << " r_DT=" << sets.threshold << " m\n";
    auto print_set = [](const std::vector<int>& s) {
        std::cout << "{";
        for (size_t i = 0; i < s.size(); ++i) std::cout << (i ? "," : "") << (s[i] + 1);
        std::cout << "}";
    };
    for (size_t i = 0; i < users.size(); ++i) {
        std::cout << "user " << (i + 1) << " (theta=" << users[i].theta << ", r=" << users[i].range
                  << " m): raw=";
        print_set(sets.raw[i]);
        std::cout << " symmetric=";
        print_set(sets.symmetric[i]);
        std::cout << "\n";
    }
    std::cout << "far set (r >= r_DT): ";
    print_set(sets.merged_far_set);
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"near-field physical-layer security simulator"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string config_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "key = value config file")->required();
        cmd->add_option("--out", flags.out, "output path override");
        cmd->add_option("--format", flags.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--threads", flags.threads, "parallel seed lanes");
        cmd->add_option("--seed", flags.seed, "replace the seed list with one seed")
            ->each([&](const std::string&) { flags.seed_set = true; });
    };

    auto* run = app.add_subcommand("run", "execute an experiment sweep");
    add_common(run);
    auto* bench = app.add_subcommand("bench", "runtime comparison, proposed vs conventional");
    add_common(bench);
    auto* diag = app.add_subcommand("diagnose", "closed-form secrecy diagnosis per user");
    add_common(diag);
    auto* sets = app.add_subcommand("sets", "interference sets for the configured users");
    add_common(sets);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, flags);
        if (bench->parsed()) return cmd_bench(config_path, flags);
        if (diag->parsed()) return cmd_diagnose(config_path, flags);
        if (sets->parsed()) return cmd_sets(config_path, flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify_error(e);
    }
    return 1;
}
