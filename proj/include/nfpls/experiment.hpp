#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nfpls/config.hpp"

namespace nfpls {

/// One (sweep value, scheme, seed) measurement. rate/runtime are stored
/// already canonicalized to 9 significant digits so that emit/parse round-trips
/// are exact.
struct ResultRow {
    double sweep = 0;
    std::string scheme;
    double rate_bps_hz = 0;
    double runtime_s = 0;
    int opt_count = 0;
    std::uint64_t seed = 0;

    // diagnostics kept in memory, not serialized
    double power_used = 0;
    double power_budget = 0;
    double max_objective_jump = 0;  // worst relative increase along the SCA history
    std::string error;

    bool operator==(const ResultRow& o) const {
        return sweep == o.sweep && scheme == o.scheme && rate_bps_hz == o.rate_bps_hz &&
               runtime_s == o.runtime_s && opt_count == o.opt_count && seed == o.seed;
    }
};

inline double round_sig9(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot write '" + path + "'");
    out << "sweep,scheme,rate_bps_hz,runtime_s,opt_count,seed\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.9g", r.sweep);
        out << buf << ',' << r.scheme << ',';
        std::snprintf(buf, sizeof buf, "%.9g", r.rate_bps_hz);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.9g", r.runtime_s);
        out << buf << ',' << r.opt_count << ',' << r.seed << '\n';
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

inline void emit_json(const std::vector<ResultRow>& rows, const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"sweep", round_sig9(r.sweep)},
                       {"scheme", r.scheme},
                       {"rate_bps_hz", round_sig9(r.rate_bps_hz)},
                       {"runtime_s", round_sig9(r.runtime_s)},
                       {"opt_count", r.opt_count},
                       {"seed", r.seed}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_json: cannot write '" + path + "'");
    out << arr.dump(2) << '\n';
    if (!out) throw std::runtime_error("emit_json: write failed for '" + path + "'");
}

inline std::vector<ResultRow> parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_csv: cannot open '" + path + "'");
    std::vector<ResultRow> rows;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("parse_csv: empty file");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f[6];
        for (int i = 0; i < 6; ++i)
            if (!std::getline(ss, f[i], ',')) throw std::runtime_error("parse_csv: short row");
        ResultRow r;
        r.sweep = std::strtod(f[0].c_str(), nullptr);
        r.scheme = f[1];
        r.rate_bps_hz = std::strtod(f[2].c_str(), nullptr);
        r.runtime_s = std::strtod(f[3].c_str(), nullptr);
        r.opt_count = std::atoi(f[4].c_str());
        r.seed = std::strtoull(f[5].c_str(), nullptr, 10);
        rows.push_back(r);
    }
    return rows;
}

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t idx) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (idx + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// sweep applied to a copy of the config's scenario inputs
struct ResolvedInputs {
    double power_dbm;
    std::vector<PositionSpec> users;
};

inline ResolvedInputs apply_sweep(const ExperimentConfig& c, double v) {
    ResolvedInputs in{c.power_dbm, c.users};
    if (c.sweep == "power_dbm") {
        in.power_dbm = v;
    } else if (c.sweep == "user_theta" || c.sweep == "user_range_frac") {
        const int idx = c.sweep_user - 1;
        if (idx < 0 || idx >= (int)in.users.size())
            throw std::runtime_error("sweep_user outside the user list");
        if (c.sweep == "user_theta")
            in.users[idx].theta = v;
        else {
            in.users[idx].value = v;
            in.users[idx].meters = false;
        }
    } else if (c.sweep == "num_users") {
        const int k = (int)v;
        if (k < 1) throw std::runtime_error("num_users sweep needs positive values");
        in.users.clear();
        for (int i = 0; i < k; ++i) {
            const double frac = k == 1 ? 0.35 : 0.35 - 0.1 * i / (k - 1);  // descending
            in.users.push_back({0.0, frac, false});
        }
    } else if (c.sweep == "an_power_frac" || c.sweep == "none") {
        // handled by the closed-form schemes / no sweep
    } else {
        throw std::runtime_error("unknown sweep axis '" + c.sweep + "'");
    }
    return in;
}

inline Scenario build_scenario(const ExperimentConfig& c, const ResolvedInputs& in,
                               std::uint64_t seed, int n_antennas,
                               std::vector<std::string>* warnings) {
    const double freq = c.carrier_ghz * 1e9;
    const double lambda = kSpeedOfLight / freq;
    ArrayGeometry geom = ArrayGeometry::make(n_antennas, freq, c.spacing_over_lambda * lambda);
    Scenario sc;
    sc.geom = geom;
    sc.total_power = dbm_to_watts(in.power_dbm);
    sc.noise_e = dbm_to_watts(c.noise_dbm);
    sc.phi_db = c.phi_db;
    auto make_channel = [&](const PositionSpec& spec, std::uint64_t idx) {
        const PolarPosition pos = spec.resolve(geom);
        if (warnings && (pos.range < geom.fresnel_distance() || pos.range > geom.rayleigh_distance())) {
            std::ostringstream os;
            os << "position (theta=" << pos.theta << ", r=" << pos.range
               << " m) outside the near-field region [" << geom.fresnel_distance() << ", "
               << geom.rayleigh_distance() << "] m";
            warnings->push_back(os.str());
        }
        return c.num_paths > 0
                   ? multipath_channel(geom, pos, c.num_paths, c.kappa_db, mix_seed(seed, idx))
                   : los_channel(geom, pos);
    };
    for (size_t i = 0; i < in.users.size(); ++i) sc.users.push_back(make_channel(in.users[i], i));
    sc.eve = make_channel(c.eve, in.users.size());
    sc.noise_b.assign(sc.users.size(), dbm_to_watts(c.noise_dbm));
    return sc;
}

// fixed-direction baseline: MRT towards each user, AN towards the
// eavesdropper, powers found by coordinate descent on a P/200 simplex grid
inline BeamformingSolution baseline1_solve(const Scenario& sc,
                                           const std::vector<double>* warm_powers) {
    const int k = sc.num_users();
    const double P = sc.total_power;
    std::vector<VectorXcd> dirs(k);
    for (int i = 0; i < k; ++i) dirs[i] = mrt_beamformer(sc.users[i], 1.0);
    const VectorXcd zdir = an_aligned_beamformer(sc, 1.0);

    // cross gains for O(K^2) rate evaluation
    std::vector<std::vector<double>> a(k, std::vector<double>(k));
    std::vector<double> bz(k), ev(k);
    for (int u = 0; u < k; ++u) {
        for (int i = 0; i < k; ++i) a[u][i] = std::norm(sc.users[u].vector.dot(dirs[i]));
        bz[u] = std::norm(sc.users[u].vector.dot(zdir));
        ev[u] = std::norm(sc.eve.vector.dot(dirs[u]));
    }
    const double ez = std::norm(sc.eve.vector.dot(zdir));

    auto sum_rate = [&](const std::vector<double>& p) {
        // p[0..k-1] user powers, p[k] AN power
        double total = 0;
        for (int u = 0; u < k; ++u) {
            double interf = p[k] * bz[u] + sc.noise_b[u];
            for (int i = 0; i < k; ++i)
                if (i != u) interf += p[i] * a[u][i];
            const double rb = std::log2(1.0 + p[u] * a[u][u] / interf);
            const double ce = std::log2(1.0 + p[u] * ev[u] / (p[k] * ez + sc.noise_e));
            total += std::max(0.0, rb - ce);
        }
        return total;
    };

    std::vector<double> p(k + 1, P / (k + 1));
    if (warm_powers && (int)warm_powers->size() == k + 1) p = *warm_powers;
    double best = sum_rate(p);
    const double step = P / 200.0;
    for (int pass = 0; pass < 30; ++pass) {
        bool improved = false;
        for (int c = 0; c <= k; ++c) {
            double others = 0;
            for (int i = 0; i <= k; ++i)
                if (i != c) others += p[i];
            const double cap = P - others;
            double best_val = p[c];
            for (int m = 0; m * step <= cap + 1e-15; ++m) {
                const double cand = std::min(m * step, cap);
                const double keep = p[c];
                p[c] = cand;
                const double val = sum_rate(p);
                if (val > best + 1e-12) {
                    best = val;
                    best_val = cand;
                    improved = true;
                }
                p[c] = keep;
            }
            p[c] = best_val;
        }
        if (!improved) break;
    }
    std::vector<VectorXcd> w(k);
    for (int i = 0; i < k; ++i) w[i] = std::sqrt(p[i]) * dirs[i];
    BeamformingSolution sol = evaluate(sc, w, std::sqrt(p[k]) * zdir);
    sol.plan.an_tag = AnTag::EveAligned;
    return sol;
}

inline BeamformingSolution baseline2_solve(const Scenario& sc, const SCAConfig& cfg) {
    const int k = sc.num_users();
    const double p0 = sc.total_power / (k + 1);
    std::vector<VectorXcd> w0(k);
    for (int i = 0; i < k; ++i) w0[i] = mrt_beamformer(sc.users[i], p0);
    BeamPlan plan;
    plan.user_tags.assign(k, BeamTag::Optimized);
    plan.an_tag = AnTag::EveAligned;
    return detail::sca_run(sc, cfg, std::vector<bool>(k, true), w0, detail::ZMode::Ray,
                           an_aligned_beamformer(sc, p0), plan);
}

inline BeamformingSolution baseline3_solve(const Scenario& sc, const SCAConfig& cfg) {
    const int k = sc.num_users();
    const double p0 = sc.total_power / (k + 1);
    std::vector<VectorXcd> w0(k);
    for (int i = 0; i < k; ++i) w0[i] = mrt_beamformer(sc.users[i], p0);
    BeamPlan plan;
    plan.user_tags.assign(k, BeamTag::Mrt);
    plan.an_tag = AnTag::Optimized;
    return detail::sca_run(sc, cfg, std::vector<bool>(k, false), w0, detail::ZMode::Free,
                           an_aligned_beamformer(sc, p0), plan);
}

// pinned single-link geometries for the power-split taxonomy curves
inline LinkPair fig2_link(const ArrayGeometry& geom, const std::string& scheme, double power_w,
                          double noise_w) {
    if (scheme == "case1") return make_link(geom, {0.0, 3.2}, {0.0, 3.0}, power_w, noise_w);
    if (scheme == "case2") return make_link(geom, {0.0, 6.0}, {0.0, 3.0}, power_w, noise_w);
    const double rr = geom.rayleigh_distance();
    return make_link(geom, {0.0, 0.05 * rr}, {0.0, 0.3 * rr}, power_w, noise_w);
}

inline double objective_jump(const std::vector<double>& hist) {
    double worst = 0;
    for (size_t i = 1; i < hist.size(); ++i) {
        const double jump = (hist[i] - hist[i - 1]) / std::max(1.0, std::abs(hist[i - 1]));
        worst = std::max(worst, jump);
    }
    return worst;
}

}  // namespace detail

struct RunOutput {
    std::vector<ResultRow> rows;
    std::vector<std::string> warnings;
    std::string summary;
    int n_antennas_used = 0;
};

/// Executes the configured sweep. Every (seed, sweep point, scheme) yields one
/// row; NLoS realizations are controlled by the seed column. Rows are ordered
/// by sweep index, then scheme order, then seed. On power sweeps the
/// optimizing schemes are warm-started from the previous point's solution (a
/// feasible solution is never discarded for a worse fresh one), which keeps
/// the reported curves monotone where the feasible sets nest.
inline RunOutput run_experiment(const ExperimentConfig& cfg) {
    RunOutput out;
    const bool sca_present = cfg.has_sca_scheme();
    out.n_antennas_used = sca_present ? cfg.num_antennas_sca : cfg.num_antennas;
    const std::vector<double> sweep_values =
        cfg.sweep == "none" ? std::vector<double>{0.0} : cfg.sweep_values;
    const bool warm = cfg.sweep == "power_dbm";

    std::mutex mu;
    std::set<std::string> warn_set;
    auto warn = [&](const std::vector<std::string>& ws) {
        std::lock_guard<std::mutex> lk(mu);
        for (const auto& w : ws) warn_set.insert(w);
    };

    const int n_lanes = (int)cfg.seeds.size();
    std::vector<std::vector<ResultRow>> lane_rows(n_lanes);

    auto run_lane = [&](int lane) {
        const std::uint64_t seed = cfg.seeds[lane];
        std::vector<std::optional<BeamformingSolution>> prev(cfg.schemes.size());
        std::optional<std::vector<double>> prev_b1_powers;
        for (size_t si = 0; si < sweep_values.size(); ++si) {
            const double v = sweep_values[si];
            std::vector<std::string> ws;
            const auto inputs = detail::apply_sweep(cfg, v);
            Scenario sc = detail::build_scenario(cfg, inputs, seed, out.n_antennas_used, &ws);
            warn(ws);

            std::optional<BeamformingSolution> best_so_far;  // init candidate for conventional
            for (size_t ci = 0; ci < cfg.schemes.size(); ++ci) {
                const std::string& name = cfg.schemes[ci];
                ResultRow row;
                row.sweep = round_sig9(v);
                row.scheme = name;
                row.seed = seed;
                row.power_budget = sc.total_power;
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    std::optional<BeamformingSolution> sol;
                    double rate = 0;
                    if (name == "case1" || name == "case2" || name == "case3") {
                        const LinkPair link = detail::fig2_link(sc.geom, name, sc.total_power,
                                                                sc.noise_e);
                        const double pe = v * sc.total_power;
                        rate = std::max(0.0, secrecy_rate_mrt(link, {sc.total_power - pe, pe}));
                    } else if (name == "an_optimal" || name == "no_an") {
                        const LinkPair link =
                            make_link(sc.geom, sc.users.at(0).position, sc.eve.position,
                                      sc.total_power, sc.noise_e);
                        rate = name == "no_an"
                                   ? std::max(0.0, secrecy_rate_no_an(link, link.total_power))
                                   : diagnose(link).max_secrecy_rate;
                    } else if (name == "baseline1") {
                        std::vector<double> powers;
                        if (warm && prev[ci]) {
                            powers.reserve(sc.num_users() + 1);
                            for (const auto& wv : prev[ci]->w) powers.push_back(wv.squaredNorm());
                            powers.push_back(prev[ci]->z.squaredNorm());
                        }
                        sol = detail::baseline1_solve(sc, powers.empty() ? nullptr : &powers);
                        row.opt_count = 0;
                    } else if (name == "baseline2") {
                        sol = detail::baseline2_solve(sc, cfg.sca);
                        row.opt_count = sc.num_users();
                    } else if (name == "baseline3") {
                        sol = detail::baseline3_solve(sc, cfg.sca);
                        row.opt_count = 1;
                    } else if (name == "proposed") {
                        sol = low_complexity_solve(sc, cfg.sca);
                        row.opt_count = sol->plan.optimized_count();
                    } else if (name == "conventional") {
                        std::optional<BeamformingSolution> init;
                        auto consider = [&](const std::optional<BeamformingSolution>& cand) {
                            if (!cand) return;
                            BeamformingSolution ev = evaluate(sc, cand->w, cand->z);
                            if (!init || ev.sum_secrecy > init->sum_secrecy) init = std::move(ev);
                        };
                        consider(best_so_far);
                        if (warm) consider(prev[ci]);
                        sol = sca_optimize(sc, cfg.sca, init);
                        row.opt_count = sc.num_users() + 1;
                    } else {
                        throw std::runtime_error("unknown scheme '" + name + "'");
                    }
                    if (sol) {
                        // a previously found feasible solution is kept if better
                        if (warm && prev[ci]) {
                            BeamformingSolution re = evaluate(sc, prev[ci]->w, prev[ci]->z);
                            if (re.sum_secrecy > sol->sum_secrecy) {
                                re.plan = sol->plan;
                                re.iterations = sol->iterations;
                                re.objective_history = sol->objective_history;
                                sol = std::move(re);
                            }
                        }
                        rate = sol->sum_secrecy;
                        row.max_objective_jump = detail::objective_jump(sol->objective_history);
                        row.power_used = sol->z.squaredNorm();
                        for (const auto& wv : sol->w) row.power_used += wv.squaredNorm();
                        if (!best_so_far || sol->sum_secrecy > best_so_far->sum_secrecy)
                            best_so_far = sol;
                        prev[ci] = sol;
                    }
                    row.rate_bps_hz = round_sig9(rate);
                } catch (const std::exception& e) {
                    row.error = e.what();
                    row.rate_bps_hz = std::numeric_limits<double>::quiet_NaN();
                    warn({"scheme " + name + " failed at sweep=" + std::to_string(v) + ": " +
                          e.what()});
                }
                const auto t1 = std::chrono::steady_clock::now();
                row.runtime_s = round_sig9(
                    std::chrono::duration_cast<std::chrono::duration<double>>(t1 - t0).count());
                lane_rows[lane].push_back(std::move(row));
            }
        }
    };

    if (cfg.threads > 1 && n_lanes > 1) {
        std::vector<std::thread> pool;
        for (int lane = 0; lane < n_lanes; ++lane) pool.emplace_back(run_lane, lane);
        for (auto& t : pool) t.join();
    } else {
        for (int lane = 0; lane < n_lanes; ++lane) run_lane(lane);
    }

    // order: sweep index, scheme order, seed order
    const size_t per_point = cfg.schemes.size();
    for (size_t si = 0; si < sweep_values.size(); ++si)
        for (size_t ci = 0; ci < per_point; ++ci)
            for (int lane = 0; lane < n_lanes; ++lane)
                out.rows.push_back(lane_rows[lane][si * per_point + ci]);

    out.warnings.assign(warn_set.begin(), warn_set.end());

    std::ostringstream sum;
    sum << "experiment " << cfg.experiment << " (N=" << out.n_antennas_used
        << ", seeds=" << n_lanes << ")\n";
    for (const auto& name : cfg.schemes) {
        sum << "  " << name << ":";
        for (double v : sweep_values) {
            double acc = 0;
            int cnt = 0;
            for (const auto& r : out.rows) {
                if (r.scheme == name && r.sweep == round_sig9(v) && r.error.empty()) {
                    acc += r.rate_bps_hz;
                    ++cnt;
                }
            }
            sum << ' ' << (cnt ? acc / cnt : std::numeric_limits<double>::quiet_NaN());
        }
        sum << '\n';
    }
    out.summary = sum.str();
    return out;
}

struct BenchRow {
    int k_users = 0;
    double conventional_s = 0;
    double proposed_s = 0;
    double ratio = 0;
    int conv_opt = 0;
    int prop_opt = 0;
    double conv_rate = 0;
    double prop_rate = 0;
};

struct BenchOutput {
    std::vector<BenchRow> rows;
    std::string summary;
};

/// Wall-clock comparison of the conventional solver against the
/// low-complexity pipeline, median over bench_reps repetitions per K.
inline BenchOutput bench_runtime(const ExperimentConfig& cfg) {
    BenchOutput out;
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    const int reps = std::max(cfg.bench_reps, 5);
    for (int k : cfg.bench_users) {
        detail::ResolvedInputs in = detail::apply_sweep([&] {
            ExperimentConfig c = cfg;
            c.sweep = "num_users";
            return c;
        }(), k);
        in.power_dbm = cfg.power_dbm;
        Scenario sc = detail::build_scenario(cfg, in, cfg.seeds.front(), cfg.num_antennas_sca,
                                             nullptr);
        BenchRow row;
        row.k_users = k;
        std::vector<double> tc, tp;
        for (int rep = 0; rep < reps; ++rep) {
            auto t0 = std::chrono::steady_clock::now();
            const auto conv = sca_optimize(sc, cfg.sca);
            auto t1 = std::chrono::steady_clock::now();
            const auto prop = low_complexity_solve(sc, cfg.sca);
            auto t2 = std::chrono::steady_clock::now();
            tc.push_back(std::chrono::duration_cast<std::chrono::duration<double>>(t1 - t0).count());
            tp.push_back(std::chrono::duration_cast<std::chrono::duration<double>>(t2 - t1).count());
            row.conv_opt = k + 1;
            row.prop_opt = prop.plan.optimized_count();
            row.conv_rate = conv.sum_secrecy;
            row.prop_rate = prop.sum_secrecy;
        }
        row.conventional_s = median(tc);
        row.proposed_s = median(tp);
        row.ratio = row.proposed_s / row.conventional_s;
        out.rows.push_back(row);
    }
    std::ostringstream sum;
    sum << "runtime (median of " << reps << " reps, N=" << cfg.num_antennas_sca << ")\n";
    sum << "  K   conventional[s]  proposed[s]  ratio  opt(conv/prop)\n";
    for (const auto& r : out.rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-3d %-16.6f %-12.6f %-6.3f %d/%d\n", r.k_users,
                      r.conventional_s, r.proposed_s, r.ratio, r.conv_opt, r.prop_opt);
        sum << buf;
    }
    out.summary = sum.str();
    return out;
}

inline void emit_bench_csv(const std::vector<BenchRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_bench_csv: cannot write '" + path + "'");
    out << "k_users,conventional_s,proposed_s,ratio,conv_opt,prop_opt\n";
    for (const auto& r : rows) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%d,%d\n", r.k_users, r.conventional_s,
                      r.proposed_s, r.ratio, r.conv_opt, r.prop_opt);
        out << buf;
    }
}

}  // namespace nfpls
