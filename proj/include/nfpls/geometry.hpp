#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace nfpls {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Uniform linear array along the y-axis, centered at the origin.
/// Element n (1-based) sits at (0, delta(n) * spacing).
struct ArrayGeometry {
    int num_antennas = 0;      // N
    double carrier_freq = 0;   // Hz
    double wavelength = 0;     // m
    double spacing = 0;        // m

    static ArrayGeometry make(int n, double freq_hz, double spacing_m = 0.0) {
        if (n < 2) throw std::invalid_argument("ArrayGeometry: need at least 2 antennas");
        if (freq_hz <= 0) throw std::invalid_argument("ArrayGeometry: carrier frequency must be > 0");
        ArrayGeometry g;
        g.num_antennas = n;
        g.carrier_freq = freq_hz;
        g.wavelength = kSpeedOfLight / freq_hz;
        g.spacing = spacing_m > 0 ? spacing_m : g.wavelength / 2.0;
        return g;
    }

    // signed element offset index, delta_n = (2n - N - 1) / 2 for n in [1, N]
    double delta(int n) const {
        if (n < 1 || n > num_antennas)
            throw std::out_of_range("antenna index " + std::to_string(n) + " outside [1, " +
                                    std::to_string(num_antennas) + "]");
        return 0.5 * (2 * n - num_antennas - 1);
    }

    // Physical span used for the field boundaries. N*d, so that the
    // beam-depth boundary identity r_R(r_DT) = r_Ray holds exactly at
    // half-wavelength spacing.
    double aperture() const { return num_antennas * spacing; }

    double fresnel_distance() const {
        const double d3 = aperture() * aperture() * aperture();
        return 0.62 * std::sqrt(d3 / wavelength);
    }

    double rayleigh_distance() const {
        return 2.0 * aperture() * aperture() / wavelength;
    }
};

/// Position in the array's polar coordinates: spatial angle theta = cos(AoD)
/// and range r from the array center.
struct PolarPosition {
    double theta = 0;  // dimensionless, in [-1, 1]
    double range = 0;  // m, > 0

    PolarPosition() = default;
    PolarPosition(double theta_, double range_) : theta(theta_), range(range_) {
        if (std::abs(theta) > 1.0) throw std::invalid_argument("PolarPosition: |theta| must be <= 1");
        if (range <= 0) throw std::invalid_argument("PolarPosition: range must be > 0");
    }

    double x() const { return range * std::sqrt(1.0 - theta * theta); }
    double y() const { return range * theta; }
};

/// Distance from the n-th element (1-based) to the given position.
inline double element_distance(const ArrayGeometry& geom, const PolarPosition& pos, int n) {
    const double dn = geom.delta(n) * geom.spacing;
    const double r = pos.range;
    return std::sqrt(r * r - 2.0 * r * pos.theta * dn + dn * dn);
}

/// element_distance(n) - range, computed without cancellation. Needed for
/// steering phases at ranges far beyond the aperture, where the naive
/// sqrt(r^2 + eps) - r loses all significant digits.
inline double element_excess_distance(const ArrayGeometry& geom, const PolarPosition& pos, int n) {
    const double dn = geom.delta(n) * geom.spacing;
    const double r = pos.range;
    const double num = dn * dn - 2.0 * r * pos.theta * dn;
    return num / (element_distance(geom, pos, n) + r);
}

}  // namespace nfpls
