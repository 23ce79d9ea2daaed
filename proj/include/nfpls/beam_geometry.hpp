#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nfpls/correlation.hpp"
#include "nfpls/geometry.hpp"

namespace nfpls {

namespace detail {

inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    return std::sin(M_PI * x) / (M_PI * x);
}

// G(beta) = |C(beta) + jS(beta)| / beta, the normalized on-axis gain profile.
inline double depth_gain(double beta) {
    if (beta < 1e-12) return 1.0;
    return std::hypot(fresnel_c(beta), fresnel_s(beta)) / beta;
}

// Bisection on a monotone-decreasing branch [lo, hi] of f for f(x) = target.
template <class F>
inline double bisect_decreasing(F f, double lo, double hi, double target) {
    double flo = f(lo), fhi = f(hi);
    if (target > flo || target < fhi)
        throw std::domain_error("bisect: target outside the first decreasing branch");
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// First local minimum of depth_gain past beta = 0 (~0.2856 near beta = 1.91);
// the single-lobe root definition is only valid above that level.
inline double depth_gain_first_min_location() {
    static const double loc = [] {
        double prev = depth_gain(0.5);
        for (double b = 0.501; b < 4.0; b += 1e-3) {
            const double v = depth_gain(b);
            if (v > prev + 1e-15) return b - 1e-3;
            prev = v;
        }
        return 4.0;
    }();
    return loc;
}

}  // namespace detail

/// Root of sinc(beta) = 10^(-phi/20) on sinc's first decreasing branch.
inline double solve_beta_bar(double phi_db) {
    if (phi_db <= 0) throw std::invalid_argument("solve_beta_bar: phi must be > 0");
    const double target = std::pow(10.0, -phi_db / 20.0);
    return detail::bisect_decreasing(detail::sinc, 0.0, 1.0, target);
}

/// Root of G(beta) = 10^(-phi/20) on G's first decreasing branch. Throws when
/// the target lies below the first-lobe minimum (phi too large for the
/// single-lobe definition).
inline double solve_beta_phi(double phi_db) {
    if (phi_db <= 0) throw std::invalid_argument("solve_beta_phi: phi must be > 0");
    const double target = std::pow(10.0, -phi_db / 20.0);
    const double hi = detail::depth_gain_first_min_location();
    if (target < detail::depth_gain(hi))
        throw std::domain_error("solve_beta_phi: phi exceeds the single-lobe range");
    return detail::bisect_decreasing(detail::depth_gain, 1e-9, hi, target);
}

/// phi-dB level with its two precomputed roots; beta_bar drives the beam
/// width, beta_phi the beam depth.
struct BeamSpec {
    double phi_db = 3.0;
    double beta_bar = 0;
    double beta_phi = 0;

    static BeamSpec solve(double phi_db) {
        BeamSpec s;
        s.phi_db = phi_db;
        s.beta_bar = solve_beta_bar(phi_db);
        s.beta_phi = solve_beta_phi(phi_db);
        return s;
    }
};

/// Cross-range extent (meters) of the phi-dB lobe on the user's distance ring.
inline double beam_width(const ArrayGeometry& geom, const BeamSpec& spec,
                         const PolarPosition& user) {
    return 2.0 * spec.beta_bar * geom.wavelength * user.range /
           (geom.num_antennas * geom.spacing);
}

struct BeamDepthInterval {
    double depth = 0;    // r_right - r_left; +inf past the focal boundary
    double r_left = 0;
    double r_right = 0;  // +inf past the focal boundary
};

/// Focal boundary r_BD = N^2 d^2 (1 - theta^2) / (2 lambda beta_phi^2);
/// beyond it the depth interval is unbounded.
inline double depth_boundary(const ArrayGeometry& geom, const BeamSpec& spec, double theta) {
    const double nd = geom.num_antennas * geom.spacing;
    return nd * nd * (1.0 - theta * theta) / (2.0 * geom.wavelength * spec.beta_phi * spec.beta_phi);
}

inline BeamDepthInterval beam_depth(const ArrayGeometry& geom, const BeamSpec& spec,
                                    const PolarPosition& user) {
    const double r = user.range;
    const double r_bd = depth_boundary(geom, spec, user.theta);
    BeamDepthInterval out;
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (r_bd <= 0.0) {  // endfire, theta^2 = 1
        out.r_left = 0.0;
        out.r_right = inf;
        out.depth = inf;
        return out;
    }
    out.r_left = r * r_bd / (r_bd + r);
    if (r < r_bd) {
        out.r_right = r * r_bd / (r_bd - r);
        out.depth = 2.0 * r * r * r_bd / (r_bd * r_bd - r * r);
    } else {
        out.r_right = inf;
        out.depth = inf;
    }
    return out;
}

/// Axis-aligned rectangle around the user within which another focused beam
/// causes at least phi-dB interference. Unbounded depth is clipped to the
/// near-field region in the x coordinate.
struct InterferenceDomain {
    double center_x = 0, center_y = 0;
    double half_width = 0;   // y extent, BW/2
    double half_depth = 0;   // x extent, BD/2; may be +inf
    double x_clip = 0;       // Rayleigh distance, bounds x when half_depth is infinite
    double r_left = 0, r_right = 0;
    int owner = 0;

    bool contains(double x, double y) const {
        if (std::abs(y - center_y) > half_width) return false;
        if (std::isinf(half_depth)) return x >= 0.0 && x <= x_clip;
        return std::abs(x - center_x) <= half_depth;
    }
};

inline InterferenceDomain interference_domain(const ArrayGeometry& geom, const BeamSpec& spec,
                                              const PolarPosition& user, int owner = 0) {
    InterferenceDomain dom;
    dom.owner = owner;
    dom.center_x = user.x();
    dom.center_y = user.y();
    dom.half_width = 0.5 * beam_width(geom, spec, user);
    const auto bd = beam_depth(geom, spec, user);
    dom.half_depth = 0.5 * bd.depth;
    dom.r_left = bd.r_left;
    dom.r_right = bd.r_right;
    dom.x_clip = geom.rayleigh_distance();
    return dom;
}

/// Range beyond which the depth interval's right boundary passes the Rayleigh
/// distance. The closed form presumes half-wavelength spacing.
inline double distance_threshold(const ArrayGeometry& geom, const BeamSpec& spec, double theta) {
    const double n2 = (double)geom.num_antennas * geom.num_antennas;
    const double om = 1.0 - theta * theta;
    return n2 * geom.wavelength * om / (8.0 * spec.beta_phi * spec.beta_phi + 2.0 * om);
}

enum class UserDistribution { Linear, Uniform };

/// Per-user interference sets. `raw` keeps the one-sided construction (only
/// users at greater range are listed); `symmetric` is its union closure, which
/// downstream consumers use. Users at or beyond the distance threshold are
/// pooled into `merged_far_set`.
struct InterferenceSets {
    std::vector<std::vector<int>> raw;
    std::vector<std::vector<int>> symmetric;
    std::vector<int> merged_far_set;
    double threshold = 0;

    bool in_raw(int owner, int other) const {
        const auto& s = raw[owner];
        return std::find(s.begin(), s.end(), other) != s.end();
    }
    bool in_symmetric(int owner, int other) const {
        const auto& s = symmetric[owner];
        return std::find(s.begin(), s.end(), other) != s.end();
    }
};

inline InterferenceSets build_interference_sets(const ArrayGeometry& geom, const BeamSpec& spec,
                                                const std::vector<PolarPosition>& users,
                                                UserDistribution distribution) {
    if (users.empty()) throw std::invalid_argument("build_interference_sets: no users");
    const int k = (int)users.size();
    InterferenceSets sets;
    sets.raw.assign(k, {});
    sets.symmetric.assign(k, {});
    sets.threshold = distance_threshold(geom, spec, users.front().theta);

    std::vector<bool> far(k, false);
    for (int i = 0; i < k; ++i) {
        const double r_dt = distance_threshold(geom, spec, users[i].theta);
        if (users[i].range >= r_dt) {  // ties go to the far pool
            far[i] = true;
            sets.merged_far_set.push_back(i);
        }
    }

    for (int i = 0; i < k; ++i) {
        if (far[i]) continue;
        const auto bd = beam_depth(geom, spec, users[i]);
        const double bw_half = 0.5 * beam_width(geom, spec, users[i]);
        for (int j = 0; j < k; ++j) {
            if (j == i || far[j]) continue;
            if (users[j].range < users[i].range) continue;  // one-sided
            if (users[j].range < bd.r_left || users[j].range > bd.r_right) continue;
            if (distribution == UserDistribution::Uniform &&
                std::abs(users[j].y() - users[i].y()) > bw_half)
                continue;
            sets.raw[i].push_back(j);
        }
    }

    for (int i = 0; i < k; ++i) {
        for (int j : sets.raw[i]) {
            sets.symmetric[i].push_back(j);
            sets.symmetric[j].push_back(i);
        }
    }
    for (auto& s : sets.symmetric) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return sets;
}

}  // namespace nfpls
