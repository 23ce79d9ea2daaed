#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "nfpls/channel.hpp"
#include "nfpls/correlation.hpp"
#include "nfpls/geometry.hpp"

namespace nfpls {

/// One legitimate-user / eavesdropper pair reduced to scalars: channel gains,
/// steering correlation, shared noise power and total power budget. All
/// linear-scale; dB conversion happens at the boundary.
struct LinkPair {
    double g_b = 0;           // legitimate scalar gain, N|h_B|^2
    double g_e = 0;           // eavesdropper scalar gain, N|h_E|^2
    double rho = 0;           // steering-vector correlation, in (0, 1]
    double noise_power = 0;   // sigma^2
    double total_power = 0;   // P

    LinkPair() = default;
    LinkPair(double gb, double ge, double rho_, double sigma2, double p)
        : g_b(gb), g_e(ge), rho(rho_), noise_power(sigma2), total_power(p) {
        if (g_b <= 0 || g_e <= 0 || noise_power <= 0 || total_power <= 0)
            throw std::invalid_argument("LinkPair: gains, noise and power must be > 0");
        if (rho <= 0 || rho > 1.0) throw std::invalid_argument("LinkPair: rho must be in (0, 1]");
    }
};

inline LinkPair make_link(const ArrayGeometry& geom, const PolarPosition& user,
                          const PolarPosition& eve, double total_power, double noise_power) {
    const double gb = geom.num_antennas * std::norm(center_gain(geom, user));
    const double ge = geom.num_antennas * std::norm(center_gain(geom, eve));
    return LinkPair(gb, ge, correlation_exact(geom, user, eve).rho, noise_power, total_power);
}

struct PowerSplit {
    double p_b = 0;  // power to the legitimate signal
    double p_e = 0;  // power to artificial noise
};

inline void check_split(const LinkPair& link, const PowerSplit& split) {
    if (split.p_b < 0 || split.p_e < 0 ||
        split.p_b + split.p_e > link.total_power * (1.0 + 1e-12))
        throw std::invalid_argument("PowerSplit: infeasible for the link's power budget");
}

/// Secrecy rate under MRT signal beamforming and eavesdropper-aligned AN,
///   log2(1 + P_B g_B / (P_E g_B rho^2 + s2)) - log2(1 + P_B g_E rho^2 / (P_E g_E + s2)).
/// May be negative; clamping is the caller's concern.
inline double secrecy_rate_mrt(const LinkPair& link, const PowerSplit& split) {
    check_split(link, split);
    const double r2 = link.rho * link.rho;
    const double s2 = link.noise_power;
    const double legit = 1.0 + split.p_b * link.g_b / (split.p_e * link.g_b * r2 + s2);
    const double eve = 1.0 + split.p_b * link.g_e * r2 / (split.p_e * link.g_e + s2);
    return std::log2(legit) - std::log2(eve);
}

/// Rate with the AN terms removed: log2(1 + p_b (g_B - g_E rho^2) / (p_b g_E rho^2 + s2)).
inline double secrecy_rate_no_an(const LinkPair& link, double p_b) {
    if (p_b < 0 || p_b > link.total_power * (1.0 + 1e-12))
        throw std::invalid_argument("secrecy_rate_no_an: p_b outside [0, P]");
    const double r2 = link.rho * link.rho;
    return std::log2(1.0 + p_b * (link.g_b - link.g_e * r2) /
                               (p_b * link.g_e * r2 + link.noise_power));
}

/// Secure condition without AN: g_B - g_E rho^2 >= 0.
inline bool secure_without_an(const LinkPair& link) {
    return link.g_b - link.g_e * link.rho * link.rho >= 0.0;
}

namespace detail {

inline bool rho_degenerate(const LinkPair& link) { return link.rho >= 1.0 - 1e-12; }

// Recoverability bound from the quadratic xi(P_E): the insecure link can be
// made secure iff g_B - g_E rho^2 >= -P g_B g_E (1 - rho^4) / sigma^2.
inline bool an_recoverable(const LinkPair& link) {
    const double r2 = link.rho * link.rho;
    const double lhs = link.g_b - link.g_e * r2;
    const double rhs =
        -link.total_power * link.g_b * link.g_e * (1.0 - r2 * r2) / link.noise_power;
    return lhs >= rhs;
}

struct Upsilon {
    double y1, y2, y3;
};

// Coefficients of the stationarity quadratic f(P_E) = y1 P_E^2 + y2 P_E + y3.
inline Upsilon upsilon(const LinkPair& link) {
    const double gb = link.g_b, ge = link.g_e;
    const double r2 = link.rho * link.rho, r4 = r2 * r2;
    const double s2 = link.noise_power, P = link.total_power;
    Upsilon u;
    u.y1 = P * gb * gb * ge * ge * r2 * (r4 - 1.0) + gb * gb * ge * r4 * (r2 - 1.0) * s2 +
           gb * ge * ge * (r2 - 1.0) * s2;
    u.y2 = 2.0 * P * gb * ge * (gb + ge) * (r2 - 1.0) * r2 * s2 +
           2.0 * gb * ge * (r4 - 1.0) * s2 * s2;
    u.y3 = P * P * gb * ge * (ge - gb * r2) * r2 * s2 + P * (ge * ge - gb * gb) * r2 * s2 * s2 +
           (ge * r2 - gb) * s2 * s2 * s2;
    return u;
}

// 1-D maximization of secrecy_rate_mrt over P_E in [0, P] by golden section,
// used only on the rho ~ 1 degenerate branch where the quadratic's leading
// coefficient vanishes.
inline PowerSplit numeric_power_split(const LinkPair& link) {
    const double P = link.total_power;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = P;
    auto f = [&](double pe) { return secrecy_rate_mrt(link, {P - pe, pe}); };
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * P; ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = f(d);
        }
    }
    double pe = 0.5 * (a + b);
    if (f(0.0) >= f(pe)) pe = 0.0;  // boundary wins on monotone links
    return {P - pe, pe};
}

}  // namespace detail

/// Minimum AN power restoring security. Returns 0 for already-secure links,
/// the positive root of xi for regainable ones, and nullopt when no AN
/// allocation within the budget can help.
inline std::optional<double> min_an_power(const LinkPair& link) {
    if (secure_without_an(link)) return 0.0;
    if (detail::rho_degenerate(link)) return std::nullopt;  // (1 - rho^4) division degenerates
    if (!detail::an_recoverable(link)) return std::nullopt;
    const double r2 = link.rho * link.rho;
    const double pe_min = (link.g_e * r2 - link.g_b) * link.noise_power /
                          (link.g_b * link.g_e * (1.0 - r2 * r2));
    return pe_min;
}

/// Closed-form optimal power allocation on the full-power line P_B + P_E = P.
/// Interior optimum (the smaller root of the stationarity quadratic) when the
/// first-increase condition holds, otherwise all power to the signal.
inline PowerSplit optimal_power_split(const LinkPair& link) {
    const double P = link.total_power;
    if (detail::rho_degenerate(link)) return detail::numeric_power_split(link);
    const auto u = detail::upsilon(link);
    if (u.y3 <= 0.0) return {P, 0.0};  // monotone decreasing in P_E
    const double disc = u.y2 * u.y2 - 4.0 * u.y1 * u.y3;
    if (!(disc >= 0.0) || u.y1 == 0.0) return detail::numeric_power_split(link);
    double pe = -u.y2 / (2.0 * u.y1) - std::sqrt(disc) / (2.0 * u.y1);
    if (pe < 0.0) pe = 0.0;
    if (pe > P) pe = P;
    return {P - pe, pe};
}

enum class SecrecyCase {
    InsecureUnrecoverable,
    Case1Regainable,   // insecure, AN restores security
    Case2InteriorMax,  // secure, rate first increases then decreases in P_E
    Case3Monotone,     // secure, rate monotone decreasing in P_E
};

inline const char* to_string(SecrecyCase c) {
    switch (c) {
        case SecrecyCase::InsecureUnrecoverable: return "INSECURE_UNRECOVERABLE";
        case SecrecyCase::Case1Regainable: return "CASE1_REGAINABLE";
        case SecrecyCase::Case2InteriorMax: return "CASE2_INTERIOR_MAX";
        case SecrecyCase::Case3Monotone: return "CASE3_MONOTONE";
    }
    return "?";
}

struct SecrecyDiagnosis {
    bool secure_without_an = false;
    bool recoverable_with_an = false;
    std::optional<double> p_e_min;
    SecrecyCase case_label = SecrecyCase::Case3Monotone;
    PowerSplit optimal_split;
    double max_secrecy_rate = 0;  // clamped at 0
};

inline SecrecyDiagnosis diagnose(const LinkPair& link) {
    SecrecyDiagnosis d;
    d.secure_without_an = secure_without_an(link);
    d.p_e_min = min_an_power(link);
    d.recoverable_with_an = d.p_e_min.has_value();
    d.optimal_split = optimal_power_split(link);
    const double rate = secrecy_rate_mrt(link, d.optimal_split);
    d.max_secrecy_rate = rate > 0 ? rate : 0.0;
    if (!d.secure_without_an) {
        d.case_label = d.recoverable_with_an ? SecrecyCase::Case1Regainable
                                             : SecrecyCase::InsecureUnrecoverable;
    } else if (!detail::rho_degenerate(link) && detail::upsilon(link).y3 > 0.0) {
        d.case_label = SecrecyCase::Case2InteriorMax;
    } else {
        d.case_label = SecrecyCase::Case3Monotone;
    }
    return d;
}

}  // namespace nfpls
