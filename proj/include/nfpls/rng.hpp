#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace nfpls {

/// Seedable stream of reproducible draws. The engine is std::mt19937_64
/// (bit-exact across platforms by the standard); uniform doubles and the
/// Box-Muller normal transform are spelled out here instead of using the
/// std distributions, whose algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1) with 53 random bits
    double uniform01() { return (eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // standard normal via Box-Muller; draws two uniforms per pair
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(6.283185307179586476925287 * u2);
        have_spare_ = true;
        return mag * std::cos(6.283185307179586476925287 * u2);
    }

    // circularly-symmetric complex Gaussian with E|x|^2 = stddev^2
    std::complex<double> complex_gaussian(double stddev) {
        const double s = stddev * 0.7071067811865475244;  // per-component sigma
        return {s * normal(), s * normal()};
    }

    std::uint64_t next_u64() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0;
    bool have_spare_ = false;
};

}  // namespace nfpls
