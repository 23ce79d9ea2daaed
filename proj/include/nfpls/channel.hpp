#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nfpls/geometry.hpp"
#include "nfpls/rng.hpp"

namespace nfpls {

using VectorXcd = Eigen::VectorXcd;

/// Unit-norm spherical-wavefront steering vector; entry n carries the phase
/// -2*pi*(r^(n) - r)/lambda of the n-th element's excess path.
inline VectorXcd steering_vector(const ArrayGeometry& geom, const PolarPosition& pos) {
    const int n = geom.num_antennas;
    VectorXcd b(n);
    const double scale = 1.0 / std::sqrt((double)n);
    const double k = 2.0 * M_PI / geom.wavelength;
    for (int i = 1; i <= n; ++i) {
        const double phase = -k * element_excess_distance(geom, pos, i);
        b(i - 1) = std::polar(scale, phase);
    }
    return b;
}

/// Channel vector with its line-of-sight scalar parameters kept alongside.
/// scalar_gain is g = N |h_c|^2 with h_c the LoS center-of-array gain, also
/// for multipath channels (the closed-form secrecy machinery is LoS-based).
struct NearFieldChannel {
    VectorXcd vector;
    double scalar_gain = 0;
    PolarPosition position;
    std::vector<std::pair<std::complex<double>, PolarPosition>> nlos_components;
};

// LoS complex gain from the array center, h_c = lambda/(4 pi r) e^{-j 2 pi r / lambda}
inline std::complex<double> center_gain(const ArrayGeometry& geom, const PolarPosition& pos) {
    const double amp = geom.wavelength / (4.0 * M_PI * pos.range);
    return std::polar(amp, -2.0 * M_PI * pos.range / geom.wavelength);
}

inline NearFieldChannel los_channel(const ArrayGeometry& geom, const PolarPosition& pos) {
    NearFieldChannel ch;
    ch.position = pos;
    const std::complex<double> hc = center_gain(geom, pos);
    ch.scalar_gain = geom.num_antennas * std::norm(hc);
    ch.vector = std::sqrt((double)geom.num_antennas) * hc * steering_vector(geom, pos);
    return ch;
}

/// LoS plus num_paths NLoS components, h = h_LoS + sqrt(N/L) sum_l h_l b(theta_l, r_l).
/// Scatterers are placed uniformly over theta in [-1, 1] and range in
/// [r_Fre, r_Ray]; path gains are complex Gaussian with std kappa*|h_c|,
/// kappa = 10^(kappa_db/20). Deterministic given the seed.
inline NearFieldChannel multipath_channel(const ArrayGeometry& geom, const PolarPosition& pos,
                                          int num_paths, double kappa_db, std::uint64_t seed) {
    NearFieldChannel ch = los_channel(geom, pos);
    if (num_paths == 0) return ch;
    if (num_paths < 0) throw std::invalid_argument("multipath_channel: num_paths must be >= 0");
    const double kappa = std::pow(10.0, kappa_db / 20.0);
    if (kappa <= 0) throw std::invalid_argument("multipath_channel: kappa must be positive");

    Rng rng(seed);
    const double eta = kappa * std::sqrt(ch.scalar_gain / geom.num_antennas);  // kappa * |h_c|
    const double r_lo = geom.fresnel_distance();
    const double r_hi = geom.rayleigh_distance();
    const double path_scale = std::sqrt((double)geom.num_antennas / num_paths);
    for (int l = 0; l < num_paths; ++l) {
        PolarPosition sc(rng.uniform(-1.0, 1.0), rng.uniform(r_lo, r_hi));
        const std::complex<double> gain = rng.complex_gaussian(eta);
        ch.vector += path_scale * gain * steering_vector(geom, sc);
        ch.nlos_components.emplace_back(gain, sc);
    }
    return ch;
}

}  // namespace nfpls
