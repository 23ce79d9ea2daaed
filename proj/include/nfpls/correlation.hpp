#pragma once

#include <cmath>
#include <complex>

#include "nfpls/fresnel.hpp"
#include "nfpls/geometry.hpp"

namespace nfpls {

/// |b_i^H b_j| of two steering vectors; always in (0, 1].
struct CorrelationValue {
    double rho = 1.0;
};

/// Exact correlation by the N-term sum.
inline CorrelationValue correlation_exact(const ArrayGeometry& geom, const PolarPosition& pos_i,
                                          const PolarPosition& pos_j) {
    const int n = geom.num_antennas;
    const double k = 2.0 * M_PI / geom.wavelength;
    std::complex<double> acc = 0;
    for (int m = 1; m <= n; ++m) {
        const double dphase =
            k * (element_excess_distance(geom, pos_i, m) - element_excess_distance(geom, pos_j, m));
        acc += std::polar(1.0, dphase);
    }
    double rho = std::abs(acc) / n;
    if (rho > 1.0) rho = 1.0;
    return {rho};
}

namespace detail {

// G(b1, b2) = |(C(b1+b2) - C(b1-b2)) + j(S(b1+b2) - S(b1-b2))| / (2 b2)
inline double correlation_g(double beta1, double beta2) {
    const double ct = fresnel_c(beta1 + beta2) - fresnel_c(beta1 - beta2);
    const double st = fresnel_s(beta1 + beta2) - fresnel_s(beta1 - beta2);
    return std::hypot(ct, st) / (2.0 * beta2);
}

}  // namespace detail

/// Fresnel-integral approximation of the correlation. Falls back to the
/// exact sum when the two positions share the same effective curvature
/// (1-theta^2)/r, where the approximation's beta_2 vanishes.
inline CorrelationValue correlation_fresnel(const ArrayGeometry& geom, const PolarPosition& pos_i,
                                            const PolarPosition& pos_j) {
    const double ci = (1.0 - pos_i.theta * pos_i.theta) / pos_i.range;
    const double cj = (1.0 - pos_j.theta * pos_j.theta) / pos_j.range;
    const double dc = std::abs(ci - cj);
    if (dc <= 1e-14 * std::max({ci, cj, 1e-300})) {
        return correlation_exact(geom, pos_i, pos_j);
    }
    const double root = std::sqrt(geom.spacing * dc);
    const double beta1 = (pos_j.theta - pos_i.theta) / root;
    const double beta2 = 0.5 * geom.num_antennas * root;
    double rho = detail::correlation_g(beta1, beta2);
    if (rho > 1.0) rho = 1.0;
    if (rho <= 0.0) rho = 1e-300;
    return {rho};
}

}  // namespace nfpls
