#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nfpls/beam_geometry.hpp"
#include "nfpls/channel.hpp"
#include "nfpls/secrecy.hpp"

namespace nfpls {

using MatrixXcd = Eigen::MatrixXcd;

struct Scenario {
    ArrayGeometry geom;
    std::vector<NearFieldChannel> users;
    NearFieldChannel eve;
    double total_power = 0;        // P
    std::vector<double> noise_b;   // per-user sigma^2
    double noise_e = 0;            // eavesdropper sigma^2
    double phi_db = 3.0;

    int num_users() const { return (int)users.size(); }

    void validate() const {
        if (users.empty()) throw std::invalid_argument("Scenario: at least one user");
        if (total_power <= 0 || noise_e <= 0)
            throw std::invalid_argument("Scenario: powers and noises must be > 0");
        if ((int)noise_b.size() != num_users())
            throw std::invalid_argument("Scenario: noise_b size mismatch");
        for (double s : noise_b)
            if (s <= 0) throw std::invalid_argument("Scenario: noise_b entries must be > 0");
    }
};

enum class BeamTag { Mrt, Optimized };
enum class AnTag { EveAligned, Optimized, Zero };

struct BeamPlan {
    std::vector<BeamTag> user_tags;
    AnTag an_tag = AnTag::EveAligned;

    int optimized_count() const {
        return (int)std::count(user_tags.begin(), user_tags.end(), BeamTag::Optimized);
    }
};

struct BeamformingSolution {
    std::vector<VectorXcd> w;
    VectorXcd z;
    std::vector<double> per_user_secrecy;  // clamped at 0
    double sum_secrecy = 0;
    BeamPlan plan;
    int iterations = 0;                     // SCA outer iterations (0 for closed form)
    std::vector<double> objective_history;  // lifted objective per outer iteration
    double rank_gap = 0;                    // worst lambda2/lambda1 seen at extraction
};

/// Rates for a given set of beamformers. gamma_k counts the other users'
/// signals and the AN as interference; the eavesdropper cancels multi-user
/// interference but not the AN.
inline BeamformingSolution evaluate(const Scenario& sc, const std::vector<VectorXcd>& w_list,
                                    const VectorXcd& z) {
    sc.validate();
    const int k = sc.num_users();
    if ((int)w_list.size() != k) throw std::invalid_argument("evaluate: w_list size mismatch");
    double used = z.squaredNorm();
    for (const auto& w : w_list) used += w.squaredNorm();
    if (used > sc.total_power * (1.0 + 1e-9))
        throw std::invalid_argument("evaluate: power budget violated");

    BeamformingSolution sol;
    sol.w = w_list;
    sol.z = z;
    sol.plan.user_tags.assign(k, BeamTag::Mrt);
    sol.per_user_secrecy.resize(k);
    const double ez = std::norm(sc.eve.vector.dot(z));
    for (int i = 0; i < k; ++i) {
        const auto& h = sc.users[i].vector;
        double interference = std::norm(h.dot(z));
        for (int j = 0; j < k; ++j)
            if (j != i) interference += std::norm(h.dot(w_list[j]));
        const double signal = std::norm(h.dot(w_list[i]));
        const double rate_b = std::log2(1.0 + signal / (interference + sc.noise_b[i]));
        const double leak = std::norm(sc.eve.vector.dot(w_list[i]));
        const double cap_e = std::log2(1.0 + leak / (ez + sc.noise_e));
        sol.per_user_secrecy[i] = std::max(0.0, rate_b - cap_e);
        sol.sum_secrecy += sol.per_user_secrecy[i];
    }
    return sol;
}

inline VectorXcd mrt_beamformer(const NearFieldChannel& channel, double power) {
    if (power < 0) throw std::invalid_argument("mrt_beamformer: power must be >= 0");
    const double nrm = channel.vector.norm();
    if (nrm == 0) throw std::invalid_argument("mrt_beamformer: zero channel");
    return std::sqrt(power) / nrm * channel.vector;
}

inline VectorXcd an_aligned_beamformer(const Scenario& sc, double power_e) {
    return mrt_beamformer(sc.eve, power_e);
}

struct SCAConfig {
    int max_iters = 50;
    double objective_tolerance = 1e-4;   // relative outer objective change
    double subproblem_tolerance = 1e-7;  // relative inner surrogate change
    double rank_tolerance = 0.05;        // lambda2/lambda1 warning threshold
    int inner_max_iters = 150;
    int max_psd_dim = 64;  // full PSD formulation is desk-scale only

    void validate() const {
        if (max_iters < 1 || inner_max_iters < 1 || objective_tolerance <= 0 ||
            subproblem_tolerance <= 0 || rank_tolerance <= 0)
            throw std::invalid_argument("SCAConfig: fields must be positive, max_iters >= 1");
    }
};

namespace detail {

enum class ZMode { Free, Fixed, Ray };

// Lifted-problem state: PSD matrices for whichever beamformers are free.
struct ScaState {
    std::vector<MatrixXcd> w;  // only free indices are meaningful
    MatrixXcd z;
    double ray_power = 0;
};

// All trace terms of the objective for one state, fixed contributions folded
// in. Channels are noise-normalized, so every denominator carries "+ 1".
struct ScaScalars {
    std::vector<double> tot;    // sum_i tr(Hb_k W_i) + tr(Hb_k Z) + 1
    std::vector<double> intf;   // tot - tr(Hb_k W_k)
    std::vector<double> eve_k;  // tr(He W_k) + tr(He Z) + 1
    double eve_z = 0;           // tr(He Z) + 1
};

class ScaSolver {
public:
    ScaSolver(const Scenario& sc, const SCAConfig& cfg, const std::vector<bool>& w_free,
              const std::vector<VectorXcd>& w_vectors, ZMode z_mode, const VectorXcd& z_vector)
        : sc_(sc), cfg_(cfg), w_free_(w_free), z_mode_(z_mode) {
        cfg.validate();
        const int k = sc.num_users();
        const int n = sc.geom.num_antennas;
        if (n > cfg.max_psd_dim)
            throw std::invalid_argument("sca: N exceeds the configured PSD formulation limit");
        hb_.resize(k);
        for (int i = 0; i < k; ++i) hb_[i] = sc.users[i].vector / std::sqrt(sc.noise_b[i]);
        he_ = sc.eve.vector / std::sqrt(sc.noise_e);

        budget_ = sc.total_power;
        fixed_w_.assign(k, VectorXcd::Zero(n));
        for (int i = 0; i < k; ++i) {
            if (!w_free[i]) {
                fixed_w_[i] = w_vectors[i];
                budget_ -= w_vectors[i].squaredNorm();
            }
        }
        if (z_mode == ZMode::Fixed) {
            fixed_z_ = z_vector;
            budget_ -= z_vector.squaredNorm();
        } else if (z_mode == ZMode::Ray) {
            const double nz = z_vector.norm();
            if (nz == 0) throw std::invalid_argument("sca: ray AN needs a nonzero direction");
            ray_dir_ = z_vector / nz;
        }
        if (budget_ < -1e-12 * sc.total_power)
            throw std::invalid_argument("sca: fixed beamformers exceed the power budget");
        budget_ = std::max(budget_, 0.0);

        // fixed per-user constants
        fixed_tb_.assign(k, std::vector<double>(k, 0.0));
        fixed_te_.assign(k, 0.0);
        for (int i = 0; i < k; ++i) {
            if (w_free[i]) continue;
            for (int u = 0; u < k; ++u) fixed_tb_[u][i] = std::norm(hb_[u].dot(fixed_w_[i]));
            fixed_te_[i] = std::norm(he_.dot(fixed_w_[i]));
        }
        if (z_mode == ZMode::Fixed) {
            fixed_zb_.assign(k, 0.0);
            for (int u = 0; u < k; ++u) fixed_zb_[u] = std::norm(hb_[u].dot(fixed_z_));
            fixed_ze_ = std::norm(he_.dot(fixed_z_));
        }

        // initial lifted state from the given vectors
        state_.w.assign(k, MatrixXcd());
        for (int i = 0; i < k; ++i)
            if (w_free[i]) state_.w[i] = w_vectors[i] * w_vectors[i].adjoint();
        if (z_mode == ZMode::Free)
            state_.z = z_vector * z_vector.adjoint();
        else if (z_mode == ZMode::Ray)
            state_.ray_power = z_vector.squaredNorm();
    }

    // outer SCA loop; returns extracted vectors via out-params
    void run(std::vector<VectorXcd>& w_out, VectorXcd& z_out, int& iters,
             std::vector<double>& history, double& rank_gap) {
        double f_prev = objective(state_);
        if (!std::isfinite(f_prev)) throw std::runtime_error("sca: non-finite initial objective");
        history.push_back(f_prev);
        int outer = 0;
        for (; outer < cfg_.max_iters; ++outer) {
            solve_subproblem();
            const double f = objective(state_);
            if (!std::isfinite(f))
                throw std::runtime_error("sca: objective diverged at outer iteration " +
                                         std::to_string(outer));
            history.push_back(f);
            const double change = std::abs(f_prev - f) / std::max(1.0, std::abs(f_prev));
            f_prev = f;
            if (change < cfg_.objective_tolerance) {
                ++outer;
                break;
            }
        }
        iters = outer;
        extract(w_out, z_out, rank_gap);
    }

    double budget() const { return budget_; }

private:
    const Scenario& sc_;
    const SCAConfig& cfg_;
    std::vector<bool> w_free_;
    ZMode z_mode_;
    std::vector<VectorXcd> hb_;  // noise-normalized channels
    VectorXcd he_;
    std::vector<VectorXcd> fixed_w_;
    VectorXcd fixed_z_;
    VectorXcd ray_dir_;
    std::vector<std::vector<double>> fixed_tb_;  // [user][beam]
    std::vector<double> fixed_te_;
    std::vector<double> fixed_zb_;
    double fixed_ze_ = 0;
    double budget_ = 0;
    ScaState state_;
    double step_ = 1.0;

    static double quad(const VectorXcd& h, const MatrixXcd& m) {
        return std::real(h.dot(m * h));  // h^H M h
    }

    ScaScalars scalars(const ScaState& s) const {
        const int k = sc_.num_users();
        ScaScalars sc;
        sc.tot.assign(k, 1.0);
        sc.intf.assign(k, 1.0);
        sc.eve_k.assign(k, 1.0);
        sc.eve_z = 1.0;

        std::vector<double> zb(k, 0.0);
        double ze = 0.0;
        if (z_mode_ == ZMode::Free) {
            for (int u = 0; u < k; ++u) zb[u] = quad(hb_[u], s.z);
            ze = quad(he_, s.z);
        } else if (z_mode_ == ZMode::Ray) {
            for (int u = 0; u < k; ++u) zb[u] = s.ray_power * std::norm(hb_[u].dot(ray_dir_));
            ze = s.ray_power * std::norm(he_.dot(ray_dir_));
        } else {
            zb = fixed_zb_;
            ze = fixed_ze_;
        }
        sc.eve_z += ze;
        for (int u = 0; u < k; ++u) {
            double tot = zb[u];
            double own = 0;
            for (int i = 0; i < k; ++i) {
                const double t = w_free_[i] ? quad(hb_[u], s.w[i]) : fixed_tb_[u][i];
                tot += t;
                if (i == u) own = t;
            }
            sc.tot[u] += tot;
            sc.intf[u] += tot - own;
            sc.eve_k[u] += ze + (w_free_[u] ? quad(he_, s.w[u]) : fixed_te_[u]);
        }
        return sc;
    }

    // exact lifted objective f = N1 + N2 - D1 - D2 (equals minus the
    // unclamped sum secrecy)
    double objective(const ScaState& s) const {
        const auto v = scalars(s);
        double f = -sc_.num_users() * std::log2(v.eve_z);
        for (int u = 0; u < sc_.num_users(); ++u)
            f += -std::log2(v.tot[u]) + std::log2(v.intf[u]) + std::log2(v.eve_k[u]);
        return f;
    }

    // surrogate value with D1, D2 linearized at the outer point (linear
    // coefficients passed in); constants dropped
    double surrogate(const ScaState& s, const std::vector<MatrixXcd>& lin_w,
                     const MatrixXcd& lin_z, double lin_ray) const {
        const auto v = scalars(s);
        double g = -sc_.num_users() * std::log2(v.eve_z);
        for (int u = 0; u < sc_.num_users(); ++u) g -= std::log2(v.tot[u]);
        for (int i = 0; i < sc_.num_users(); ++i)
            if (w_free_[i]) g += std::real((lin_w[i].adjoint() * s.w[i]).trace());
        if (z_mode_ == ZMode::Free) g += std::real((lin_z.adjoint() * s.z).trace());
        if (z_mode_ == ZMode::Ray) g += lin_ray * s.ray_power;
        return g;
    }

    void solve_subproblem() {
        const int k = sc_.num_users();
        const int n = sc_.geom.num_antennas;
        const double ln2 = std::log(2.0);
        const auto v0 = scalars(state_);

        // linear coefficients from the concave terms' Taylor expansion
        std::vector<MatrixXcd> lin_w(k);
        MatrixXcd lin_z = MatrixXcd::Zero(n, n);
        for (int u = 0; u < k; ++u) lin_z += hb_[u] * hb_[u].adjoint() / (v0.intf[u] * ln2);
        double esum = 0;
        for (int u = 0; u < k; ++u) esum += 1.0 / (v0.eve_k[u] * ln2);
        lin_z += esum * (he_ * he_.adjoint());
        for (int i = 0; i < k; ++i) {
            if (!w_free_[i]) continue;
            lin_w[i] = MatrixXcd::Zero(n, n);
            for (int u = 0; u < k; ++u)
                if (u != i) lin_w[i] += hb_[u] * hb_[u].adjoint() / (v0.intf[u] * ln2);
            lin_w[i] += he_ * he_.adjoint() / (v0.eve_k[i] * ln2);
        }
        double lin_ray = 0;
        if (z_mode_ == ZMode::Ray) lin_ray = std::real(ray_dir_.dot(lin_z * ray_dir_));

        double g_cur = surrogate(state_, lin_w, lin_z, lin_ray);
        for (int inner = 0; inner < cfg_.inner_max_iters; ++inner) {
            const auto v = scalars(state_);
            // gradient of the convex part + linear coefficients
            MatrixXcd gcommon = MatrixXcd::Zero(n, n);
            for (int u = 0; u < k; ++u) gcommon -= hb_[u] * hb_[u].adjoint() / (v.tot[u] * ln2);
            std::vector<MatrixXcd> grad_w(k);
            for (int i = 0; i < k; ++i)
                if (w_free_[i]) grad_w[i] = gcommon + lin_w[i];
            MatrixXcd grad_z;
            double grad_ray = 0;
            if (z_mode_ == ZMode::Free)
                grad_z = gcommon - (double)k / (v.eve_z * ln2) * (he_ * he_.adjoint()) + lin_z;
            if (z_mode_ == ZMode::Ray) {
                const double zg = std::real(ray_dir_.dot(gcommon * ray_dir_));
                const double eg = (double)k / (v.eve_z * ln2) * std::norm(he_.dot(ray_dir_));
                grad_ray = zg - eg + lin_ray;
            }

            bool accepted = false;
            for (int bt = 0; bt < 40; ++bt) {
                ScaState trial = state_;
                double dist2 = 0;
                for (int i = 0; i < k; ++i)
                    if (w_free_[i]) trial.w[i] -= step_ * grad_w[i];
                if (z_mode_ == ZMode::Free) trial.z -= step_ * grad_z;
                if (z_mode_ == ZMode::Ray) trial.ray_power -= step_ * grad_ray;
                project(trial);
                for (int i = 0; i < k; ++i)
                    if (w_free_[i]) dist2 += (trial.w[i] - state_.w[i]).squaredNorm();
                if (z_mode_ == ZMode::Free) dist2 += (trial.z - state_.z).squaredNorm();
                if (z_mode_ == ZMode::Ray) {
                    const double dp = trial.ray_power - state_.ray_power;
                    dist2 += dp * dp;
                }
                const double g_trial = surrogate(trial, lin_w, lin_z, lin_ray);
                if (g_trial <= g_cur - 1e-4 * dist2 / std::max(step_, 1e-300)) {
                    const double rel = (g_cur - g_trial) / std::max(1.0, std::abs(g_cur));
                    state_ = std::move(trial);
                    g_cur = g_trial;
                    step_ *= 2.0;
                    accepted = true;
                    if (rel < cfg_.subproblem_tolerance) inner = cfg_.inner_max_iters;
                    break;
                }
                step_ *= 0.5;
            }
            if (!accepted) break;  // stationary for this surrogate
        }
    }

    // Euclidean projection onto {each block PSD, total trace <= budget}:
    // eigen-clip each block, then shift the pooled spectrum if over budget.
    void project(ScaState& s) const {
        struct Block {
            MatrixXcd* m;
            Eigen::VectorXd evals;
            MatrixXcd evecs;
        };
        std::vector<Block> blocks;
        for (int i = 0; i < sc_.num_users(); ++i)
            if (w_free_[i]) blocks.push_back({&s.w[i], {}, {}});
        if (z_mode_ == ZMode::Free) blocks.push_back({&s.z, {}, {}});

        double total = 0;
        for (auto& b : blocks) {
            MatrixXcd sym = 0.5 * (*b.m + b.m->adjoint());
            Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(sym);
            b.evals = eig.eigenvalues().cwiseMax(0.0);
            b.evecs = eig.eigenvectors();
            total += b.evals.sum();
        }
        if (z_mode_ == ZMode::Ray) {
            s.ray_power = std::max(s.ray_power, 0.0);
            total += s.ray_power;
        }

        if (total > budget_) {
            // waterfilling shift: find tau with sum max(lambda - tau, 0) = budget
            std::vector<double> all;
            for (const auto& b : blocks)
                for (int i = 0; i < b.evals.size(); ++i)
                    if (b.evals(i) > 0) all.push_back(b.evals(i));
            if (z_mode_ == ZMode::Ray && s.ray_power > 0) all.push_back(s.ray_power);
            std::sort(all.begin(), all.end(), std::greater<>());
            double cum = 0, tau = 0;
            for (size_t i = 0; i < all.size(); ++i) {
                cum += all[i];
                const double t = (cum - budget_) / (double)(i + 1);
                if (i + 1 == all.size() || t >= all[i + 1]) {
                    tau = t;
                    break;
                }
            }
            tau = std::max(tau, 0.0);
            for (auto& b : blocks) b.evals = (b.evals.array() - tau).cwiseMax(0.0).matrix();
            if (z_mode_ == ZMode::Ray) s.ray_power = std::max(s.ray_power - tau, 0.0);
        }
        for (auto& b : blocks)
            *b.m = b.evecs * b.evals.asDiagonal() * b.evecs.adjoint();
    }

    void extract(std::vector<VectorXcd>& w_out, VectorXcd& z_out, double& rank_gap) const {
        const int k = sc_.num_users();
        rank_gap = 0;
        w_out.resize(k);
        auto rank_one = [&](const MatrixXcd& m) {
            Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(0.5 * (m + m.adjoint()));
            const auto& ev = eig.eigenvalues();
            const int top = (int)ev.size() - 1;
            const double l1 = std::max(ev(top), 0.0);
            const double l2 = top > 0 ? std::max(ev(top - 1), 0.0) : 0.0;
            if (l1 > 0) rank_gap = std::max(rank_gap, l2 / l1);
            const double tr = std::max(ev.cwiseMax(0.0).sum(), 0.0);
            return VectorXcd(std::sqrt(tr) * eig.eigenvectors().col(top));
        };
        for (int i = 0; i < k; ++i) w_out[i] = w_free_[i] ? rank_one(state_.w[i]) : fixed_w_[i];
        if (z_mode_ == ZMode::Free)
            z_out = rank_one(state_.z);
        else if (z_mode_ == ZMode::Ray)
            z_out = std::sqrt(state_.ray_power) * ray_dir_;
        else
            z_out = fixed_z_;
    }
};

// Shared driver: run the solver, keep whichever of {init vectors, extracted
// solution} evaluates better, carry the objective history along.
inline BeamformingSolution sca_run(const Scenario& sc, const SCAConfig& cfg,
                                   const std::vector<bool>& w_free,
                                   const std::vector<VectorXcd>& w_init, ZMode z_mode,
                                   const VectorXcd& z_init, const BeamPlan& plan) {
    ScaSolver solver(sc, cfg, w_free, w_init, z_mode, z_init);
    std::vector<VectorXcd> w_out;
    VectorXcd z_out;
    int iters = 0;
    std::vector<double> history;
    double rank_gap = 0;
    solver.run(w_out, z_out, iters, history, rank_gap);

    BeamformingSolution from_init = evaluate(sc, w_init, z_init);
    BeamformingSolution extracted = evaluate(sc, w_out, z_out);
    BeamformingSolution& best = extracted.sum_secrecy >= from_init.sum_secrecy ? extracted : from_init;
    best.plan = plan;
    best.iterations = iters;
    best.objective_history = std::move(history);
    best.rank_gap = rank_gap;
    if (rank_gap > cfg.rank_tolerance)
        std::cerr << "[nfpls] warning: rank-one extraction gap lambda2/lambda1 = " << rank_gap
                  << " exceeds " << cfg.rank_tolerance << "\n";
    return best;
}

}  // namespace detail

/// Conventional solver for the lifted sum-secrecy problem: SDR plus
/// successive convex approximation, each convex subproblem solved by
/// projected gradient descent on the PSD trace ball, rank-one recovery by
/// dominant eigenvector scaled to preserve trace. Defaults to MRT plus
/// eavesdropper-aligned AN at uniform power when no init is given.
inline BeamformingSolution sca_optimize(const Scenario& sc, const SCAConfig& cfg,
                                        const std::optional<BeamformingSolution>& init = {}) {
    sc.validate();
    const int k = sc.num_users();
    std::vector<VectorXcd> w0(k);
    VectorXcd z0;
    if (init) {
        w0 = init->w;
        z0 = init->z;
    } else {
        const double p0 = sc.total_power / (k + 1);
        for (int i = 0; i < k; ++i) w0[i] = mrt_beamformer(sc.users[i], p0);
        z0 = an_aligned_beamformer(sc, p0);
    }
    BeamPlan plan;
    plan.user_tags.assign(k, BeamTag::Optimized);
    plan.an_tag = AnTag::Optimized;
    return detail::sca_run(sc, cfg, std::vector<bool>(k, true), w0, detail::ZMode::Free, z0, plan);
}

namespace detail {

// security metric for plan selection: the AN power a user needs to regain
// security against the eavesdropper; 0 = secure, +inf = unrecoverable
inline double security_cost(const Scenario& sc, int user) {
    LinkPair link(sc.users[user].scalar_gain, sc.eve.scalar_gain,
                  correlation_exact(sc.geom, sc.users[user].position, sc.eve.position).rho,
                  sc.noise_b[user], sc.total_power);
    const auto p = min_an_power(link);
    return p ? *p : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Three-step identification of which beamformers need numerical
/// optimization. Isolated users are decided by the secure condition alone;
/// within a chained cluster the in-chain users are MRT-aligned and the
/// terminal set contributes the single member with the smallest required AN
/// power; the merged far set behaves as one fully-overlapped cluster.
inline BeamPlan determine_plan(const Scenario& sc, const InterferenceSets& sets) {
    sc.validate();
    const int k = sc.num_users();
    if ((int)sets.raw.size() != k) throw std::invalid_argument("determine_plan: sets mismatch");

    BeamPlan plan;
    plan.user_tags.assign(k, BeamTag::Mrt);
    plan.an_tag = AnTag::EveAligned;
    std::vector<double> cost(k);
    for (int i = 0; i < k; ++i) cost[i] = detail::security_cost(sc, i);

    auto secure_rule = [&](int u) {
        plan.user_tags[u] = cost[u] > 0 ? BeamTag::Optimized : BeamTag::Mrt;
    };
    auto pick_min_cost = [&](const std::vector<int>& group) {
        int best = group.front();
        for (int u : group)
            if (cost[u] < cost[best] || (cost[u] == cost[best] && u < best)) best = u;
        return best;
    };

    // merged far set: one fully-overlapped cluster (a lone far user is just
    // isolated)
    std::vector<bool> handled(k, false);
    if (sets.merged_far_set.size() >= 2) {
        const int chosen = pick_min_cost(sets.merged_far_set);
        for (int u : sets.merged_far_set) {
            plan.user_tags[u] = u == chosen ? BeamTag::Optimized : BeamTag::Mrt;
            handled[u] = true;
        }
    }

    // connected components of the symmetrized sets among the remaining users
    std::vector<int> comp(k, -1);
    int ncomp = 0;
    for (int i = 0; i < k; ++i) {
        if (handled[i] || comp[i] >= 0) continue;
        std::vector<int> stack{i};
        comp[i] = ncomp;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int vtx : sets.symmetric[u]) {
                if (handled[vtx] || comp[vtx] >= 0) continue;
                comp[vtx] = ncomp;
                stack.push_back(vtx);
            }
        }
        ++ncomp;
    }
    std::vector<std::vector<int>> members(ncomp);
    for (int i = 0; i < k; ++i)
        if (!handled[i]) members[comp[i]].push_back(i);

    for (const auto& grp : members) {
        if (grp.empty()) continue;
        if (grp.size() == 1) {
            secure_rule(grp.front());
            continue;
        }
        // chain walk from the nearest member, ascending in range
        std::vector<bool> visited(k, false);
        auto nearer = [&](int a, int b) {
            const double ra = sc.users[a].position.range, rb = sc.users[b].position.range;
            return ra < rb || (ra == rb && a < b);
        };
        int head = grp.front();
        for (int u : grp)
            if (nearer(u, head)) head = u;
        secure_rule(head);
        visited[head] = true;

        std::vector<bool> tagged(k, false);
        tagged[head] = true;
        int current = head;
        while (!sets.raw[current].empty()) {
            int next = -1;
            for (int u : sets.raw[current]) {
                if (visited[u]) continue;
                if (next < 0 || nearer(next, u)) next = u;  // farthest unvisited
            }
            if (next < 0) break;
            visited[next] = true;
            if (!sets.raw[next].empty()) {
                plan.user_tags[next] = BeamTag::Mrt;
                tagged[next] = true;
                current = next;
                continue;
            }
            // terminal: one member of the current set gets optimized
            std::vector<int> candidates;
            for (int u : sets.raw[current])
                if (!tagged[u]) candidates.push_back(u);
            if (candidates.empty()) break;
            const int chosen = pick_min_cost(candidates);
            for (int u : candidates) {
                plan.user_tags[u] = u == chosen ? BeamTag::Optimized : BeamTag::Mrt;
                tagged[u] = true;
            }
            break;
        }
        for (int u : grp) {
            if (tagged[u]) continue;
            if (!sets.raw[u].empty())
                plan.user_tags[u] = BeamTag::Mrt;
            else
                secure_rule(u);
        }
    }
    return plan;
}

/// Low-complexity pipeline: interference sets -> beamformer plan -> MRT and
/// eavesdropper-aligned AN with per-user closed-form power splits (each user
/// budgeted P/K, AN powers pooled) -> SCA restricted to the users the plan
/// marked for optimization, with everything else held fixed.
inline BeamformingSolution low_complexity_solve(const Scenario& sc, const SCAConfig& cfg) {
    sc.validate();
    const int k = sc.num_users();
    std::vector<PolarPosition> positions;
    positions.reserve(k);
    for (const auto& u : sc.users) positions.push_back(u.position);

    bool linear = true;
    for (const auto& p : positions)
        if (std::abs(p.theta - positions.front().theta) > 1e-12) linear = false;

    const BeamSpec spec = BeamSpec::solve(sc.phi_db);
    const auto sets = build_interference_sets(
        sc.geom, spec, positions, linear ? UserDistribution::Linear : UserDistribution::Uniform);
    BeamPlan plan = determine_plan(sc, sets);

    // closed-form power stage: pairwise optimal splits at budget P/K,
    // AN shares pooled into one eavesdropper-aligned vector
    std::vector<VectorXcd> w(k);
    double an_power = 0;
    for (int i = 0; i < k; ++i) {
        LinkPair link(sc.users[i].scalar_gain, sc.eve.scalar_gain,
                      correlation_exact(sc.geom, sc.users[i].position, sc.eve.position).rho,
                      sc.noise_b[i], sc.total_power / k);
        const PowerSplit split = optimal_power_split(link);
        w[i] = mrt_beamformer(sc.users[i], split.p_b);
        an_power += split.p_e;
    }
    VectorXcd z = an_aligned_beamformer(sc, an_power);

    if (plan.optimized_count() == 0) {
        BeamformingSolution sol = evaluate(sc, w, z);
        sol.plan = plan;
        sol.iterations = 0;
        return sol;
    }
    std::vector<bool> w_free(k, false);
    for (int i = 0; i < k; ++i) w_free[i] = plan.user_tags[i] == BeamTag::Optimized;
    return detail::sca_run(sc, cfg, w_free, w, detail::ZMode::Fixed, z, plan);
}

}  // namespace nfpls
