#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nfpls/beam_geometry.hpp"
#include "nfpls/geometry.hpp"
#include "nfpls/rng.hpp"

namespace nfpls {

/// Probability that a user drawn uniformly over the near-field range lies in
/// the separable region [r_Fre, r_DT^max). Clamped to [0, 1]; small arrays
/// can push the threshold past the Rayleigh distance.
inline double separable_probability(const ArrayGeometry& geom, const BeamSpec& spec) {
    const double r_dt_max = distance_threshold(geom, spec, 0.0);
    const double r_fre = geom.fresnel_distance();
    const double r_ray = geom.rayleigh_distance();
    const double p = (r_dt_max - r_fre) / (r_ray - r_fre);
    return std::clamp(p, 0.0, 1.0);
}

/// P(K = m) for m = 1..K: the count of users needing beamformer optimization
/// under the extreme-condition model (each separable user costs one, all
/// non-separable users jointly cost one). Index 0 of the result is m = 1.
inline std::vector<double> optimization_count_pmf(int k, double p_sr) {
    if (k < 1) throw std::invalid_argument("optimization_count_pmf: K must be >= 1");
    if (p_sr < 0 || p_sr > 1) throw std::invalid_argument("optimization_count_pmf: p_sr in [0,1]");
    std::vector<double> pmf(k, 0.0);
    // binomial C(K, m-1) p^(m-1) (1-p)^(K-m+1), with the all-separable mass
    // p^K folded into m = K
    double binom = 1.0;  // C(K, 0)
    for (int m = 1; m <= k; ++m) {
        const int s = m - 1;  // separable count
        if (s > 0) binom = binom * (k - s + 1) / s;
        pmf[m - 1] = binom * std::pow(p_sr, s) * std::pow(1.0 - p_sr, k - s);
    }
    pmf[k - 1] += std::pow(p_sr, k);
    return pmf;
}

/// K_req = 1 + K p_sr - p_sr^K, the expectation of the pmf above.
inline double expected_optimizations(int k, double p_sr) {
    if (k < 1) throw std::invalid_argument("expected_optimizations: K must be >= 1");
    return 1.0 + k * p_sr - std::pow(p_sr, k);
}

/// Empirical mean of the optimization count: K ranges drawn uniformly in
/// [r_Fre, r_Ray] at theta = 0; count = #separable + 1 if any user lies at or
/// beyond the threshold.
inline double monte_carlo_optimizations(const ArrayGeometry& geom, const BeamSpec& spec, int k,
                                        int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("monte_carlo_optimizations: trials must be >= 1");
    const double r_dt_max = distance_threshold(geom, spec, 0.0);
    const double r_fre = geom.fresnel_distance();
    const double r_ray = geom.rayleigh_distance();
    Rng rng(seed);
    std::int64_t total = 0;
    for (int t = 0; t < trials; ++t) {
        int separable = 0;
        for (int i = 0; i < k; ++i) {
            if (rng.uniform(r_fre, r_ray) < r_dt_max) ++separable;
        }
        total += separable + (separable < k ? 1 : 0);
    }
    return (double)total / trials;
}

}  // namespace nfpls
