#pragma once

#include <cmath>

// Fresnel integrals C(x) = int_0^x cos(pi t^2 / 2) dt and
// S(x) = int_0^x sin(pi t^2 / 2) dt.
//
// |x| <= 3.5: Maclaurin series accumulated in long double (the terms grow to
// ~1e8 before the alternating tail wins, so double accumulation would lose
// digits near the seam).
// |x| > 3.5: auxiliary functions f, g via their asymptotic series, truncated
// at the smallest term:
//   C(x) = 1/2 + f sin(pi x^2/2) - g cos(pi x^2/2)
//   S(x) = 1/2 - f cos(pi x^2/2) - g sin(pi x^2/2)
// Worst case error is ~6e-10 right at the seam and drops off quickly on both
// sides; both branches are odd-extended for x < 0.

namespace nfpls {
namespace detail {

struct FresnelPair {
    double c, s;
};

inline FresnelPair fresnel_series(double x) {
    const long double z = x;
    const long double u = 1.57079632679489661923L * z * z;  // pi x^2 / 2
    const long double u2 = u * u;
    // c_n = (pi/2)^(2n) x^(4n+1) / (2n)!,  s_n = (pi/2)^(2n+1) x^(4n+3) / (2n+1)!
    long double cterm = z;
    long double sterm = u * z;  // (pi/2) x^3
    long double csum = cterm;          // first C term / (4*0+1)
    long double ssum = sterm / 3.0L;   // first S term / (4*0+3)
    for (int n = 0; n < 80; ++n) {
        cterm *= -u2 / ((2.0L * n + 1.0L) * (2.0L * n + 2.0L));
        sterm *= -u2 / ((2.0L * n + 2.0L) * (2.0L * n + 3.0L));
        const long double dc = cterm / (4.0L * n + 5.0L);
        const long double ds = sterm / (4.0L * n + 7.0L);
        csum += dc;
        ssum += ds;
        if (std::abs((double)cterm) < 1e-22 && std::abs((double)sterm) < 1e-22) break;
    }
    return {(double)csum, (double)ssum};
}

inline FresnelPair fresnel_asymptotic(double x) {
    const long double z = x;
    const long double u = 1.57079632679489661923L * z * z;
    const long double inv = 1.0L / (2.0L * u);  // 1/(pi x^2)
    // f = (1/(pi z)) sum (-1)^m (4m-1)!! / (pi x^2)^(2m)
    // g = (1/(pi z)) sum (-1)^m (4m+1)!! / (pi x^2)^(2m+1)
    long double fa = 1.0L, fterm = 1.0L;
    long double ga = inv, gterm = inv;
    for (int m = 0;; ++m) {
        const long double fnext = fterm * (4.0L * m + 3.0L) * (4.0L * m + 1.0L) * inv * inv;
        const long double gnext = gterm * (4.0L * m + 5.0L) * (4.0L * m + 3.0L) * inv * inv;
        if (std::abs((double)fnext) >= std::abs((double)fterm)) break;  // series turned
        fterm = fnext;
        gterm = gnext;
        const long double sgn = (m % 2 == 0) ? -1.0L : 1.0L;
        fa += sgn * fterm;
        ga += sgn * gterm;
        if (std::abs((double)fterm) < 1e-20 && std::abs((double)gterm) < 1e-20) break;
    }
    const long double pref = 1.0L / (3.14159265358979323846L * z);
    const long double f = pref * fa;
    const long double g = pref * ga;
    const long double su = std::sin(u), cu = std::cos(u);
    return {(double)(0.5L + f * su - g * cu), (double)(0.5L - f * cu - g * su)};
}

inline FresnelPair fresnel_both(double x) {
    const double ax = std::abs(x);
    FresnelPair p = (ax <= 3.5) ? fresnel_series(ax) : fresnel_asymptotic(ax);
    if (x < 0) {
        p.c = -p.c;
        p.s = -p.s;
    }
    return p;
}

}  // namespace detail

inline double fresnel_c(double x) { return detail::fresnel_both(x).c; }
inline double fresnel_s(double x) { return detail::fresnel_both(x).s; }

}  // namespace nfpls
