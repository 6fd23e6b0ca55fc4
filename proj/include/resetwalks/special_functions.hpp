#pragma once

// Gamma and digamma on the imaginary axis.

#include <cmath>
#include <complex>
#include <numbers>

namespace resetwalks {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

using cplxl = std::complex<long double>;

/// log sinh(x) for x > 0 without overflow.
inline double log_sinh(double x) {
    if (x < 20.0) return std::log(std::sinh(x));
    return x - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * x));
}

/// Stirling series with Bernoulli terms through B_20; accurate to long double for |z| >= 12.
inline cplxl log_gamma_stirling(cplxl z) {
    static constexpr long double c[10] = {1.0L / 12,         -1.0L / 360,       1.0L / 1260,       -1.0L / 1680,
                                          1.0L / 1188,       -691.0L / 360360,  1.0L / 156,        -3617.0L / 122400,
                                          43867.0L / 244188, -174611.0L / 125400};
    const cplxl w = 1.0L / z, w2 = w * w;
    cplxl s = c[9];
    for (int k = 8; k >= 0; --k) s = s * w2 + c[k];
    return (z - 0.5L) * std::log(z) - z + 0.5L * std::log(2.0L * std::numbers::pi_v<long double>) + s * w;
}

/// log Gamma(z) for Re z >= 0, up to a multiple of 2 pi i in the imaginary part.
inline cplxl log_gamma(cplxl z) {
    if (z.real() < 0.5L) return log_gamma(z + 1.0L) - std::log(z);
    cplxl shift = 0;
    while (std::abs(z) < 12.0L) {
        shift += std::log(z);
        z += 1.0L;
    }
    return log_gamma_stirling(z) - shift;
}

/// log |Gamma(it)| from |Gamma(it)|^2 = pi / (t sinh(pi t)).
inline double log_abs_gamma_imag(double t) {
    return 0.5 * (std::log(std::numbers::pi) - std::log(t) - log_sinh(std::numbers::pi * t));
}

/// Gamma(it), t > 0: modulus from the reflection identity, phase from the log-gamma series.
inline std::complex<double> gamma_imag(double t) {
    const double phase = static_cast<double>(log_gamma(cplxl(0.0L, t)).imag());
    return std::polar(std::exp(log_abs_gamma_imag(t)), phase);
}

/// psi(z) = -1/z - gamma + sum_k z/(k(k+z)), with an Euler-Maclaurin tail after K terms.
inline std::complex<double> digamma(std::complex<double> zd) {
    const cplxl z(zd.real(), zd.imag());
    const long K = std::max<long>(64, static_cast<long>(8.0 * std::abs(zd)));
    cplxl s = -1.0L / z - static_cast<long double>(kEulerGamma);
    for (long k = K; k >= 1; --k) {
        const long double kk = static_cast<long double>(k);
        s += z / (kk * (kk + z));
    }
    // sum_{k>K} f(k), f(x) = 1/x - 1/(x+z)
    const long double Kl = static_cast<long double>(K);
    const cplxl a = 1.0L / Kl, b = 1.0L / (Kl + z);
    const cplxl f = a - b;
    const cplxl f1 = -a * a + b * b;
    const cplxl f3 = -6.0L * a * a * a * a + 6.0L * b * b * b * b;
    const cplxl f5 = -120.0L * std::pow(a, 6) + 120.0L * std::pow(b, 6);
    s += std::log(1.0L + z / Kl) - f / 2.0L - f1 / 12.0L + f3 / 720.0L - f5 / 30240.0L;
    return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

inline std::complex<double> digamma_imag(double t) { return digamma({0.0, t}); }

/// Right-hand side of the bound |psi(it)| <= ln(1+t^2)/2 + (pi/2 + 1 - gamma) + 1/t.
inline double digamma_imag_bound(double t) {
    return 0.5 * std::log1p(t * t) + (std::numbers::pi / 2 + 1 - kEulerGamma) + 1.0 / t;
}

/// Relaxed form with ln(2)/2 and ln(t) on t >= 1.
inline double digamma_imag_bound_relaxed(double t) {
    return (std::numbers::pi / 2 + 1 - kEulerGamma + std::numbers::ln2 / 2) + ((t >= 1 ? std::log(t) : 0.0) + 1.0 / t);
}

} // namespace resetwalks
