#pragma once

// Roots of D(z) = 1 - z + q p^{h+1} z^{h+2}, the Gumbel law of the height of
// Moran walks, waiting times and excursions.

#include "core_model.hpp"
#include "errors.hpp"
#include "kernel_gf.hpp"
#include "mellin.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace resetwalks {

struct DenominatorRoots {
    double p = 0.5;
    long long h = 0;
    std::vector<cplx> roots; // all h+2 roots, ascending modulus
    double z1 = 1;           // real root in (1, 1/p)
    double epsilon = 0;      // z1 - 1
    double epsilon_excess = 0; // z1 - 1 - q p^{h+1}, without cancellation
    double z_star = 0;       // positive zero of D'
    double max_residual = 0; // max |D(z)| / (1 + |z|) over the roots
    double min_gap = 0;      // smallest pairwise distance
    bool in_regime = false;  // h >= 2/q
    bool classified = false; // (i)-(iv) verified
};

namespace detail {

// D(1+e) = q p^{h+1} (1+e)^{h+2} - e
inline long double d_shifted(long double a, long long h, long double e) {
    return a * std::exp(static_cast<long double>(h + 2) * std::log1p(e)) - e;
}

// |D(z)| scaled to w = pz: w^{h+2} - w/q + p/q
inline double d_residual(double p, long long h, cplx z) {
    const std::complex<long double> w(p * z.real(), p * z.imag());
    const long double q = 1.0L - p;
    const auto v = std::pow(w, static_cast<long double>(h + 2)) - w / q + static_cast<long double>(p) / q;
    return static_cast<double>(std::abs(v) / (1.0L + std::abs(w) / q));
}

} // namespace detail

inline DenominatorRoots locate_roots(double p, long long h, double tol = 1e-9) {
    RESETWALKS_REQUIRE(p > 0 && p < 1, ErrorCode::InvalidArgument, "p must lie in (0,1)");
    RESETWALKS_REQUIRE(h >= 0, ErrorCode::InvalidArgument, "h must be nonnegative");
    const double q = 1 - p;
    DenominatorRoots r;
    r.p = p;
    r.h = h;
    r.in_regime = static_cast<double>(h) >= 2.0 / q;
    r.z_star = std::pow(1.0 / (q * static_cast<double>(h + 2)), 1.0 / static_cast<double>(h + 1)) / p;

    // z1 by geometric bisection on e = z - 1 over [q p^{h+1}, z* - 1]: D > 0 at the left end, < 0 at the right
    const long double a = static_cast<long double>(q) * std::pow(static_cast<long double>(p), static_cast<long double>(h + 1));
    long double lo = a, hi = static_cast<long double>(r.z_star) - 1;
    const bool bracketed = hi > lo && detail::d_shifted(a, h, hi) < 0;
    if (bracketed) {
        for (int it = 0; it < 200 && hi - lo > 1e-15L * lo; ++it) {
            const long double mid = std::sqrt(lo * hi);
            (detail::d_shifted(a, h, mid) > 0 ? lo : hi) = mid;
        }
        const long double e = 0.5L * (lo + hi);
        r.epsilon = static_cast<double>(e);
        r.z1 = static_cast<double>(1.0L + e);
        // at the root e = a (1+e)^{h+2}
        r.epsilon_excess = static_cast<double>(a * std::expm1(static_cast<long double>(h + 2) * std::log1p(e)));
    }

    // full root set in w = pz: w^{h+2} - w/q + p/q
    std::vector<cplx> c(static_cast<std::size_t>(h + 3), cplx(0));
    c[0] = p / q;
    c[1] = -1.0 / q;
    c.back() = 1.0;
    auto ws = detail::polynomial_roots(c, 3);
    for (const auto& w : ws) r.roots.push_back(w / p);
    std::sort(r.roots.begin(), r.roots.end(), [](cplx x, cplx y) { return std::abs(x) < std::abs(y); });
    if (bracketed) {
        if (std::abs(r.roots[0].imag()) < 1e-6 && std::abs(r.roots[0].real() - r.z1) < 1e-6) r.roots[0] = r.z1;
    } else {
        // small h: z1 is the real root above 1 other than 1/p
        for (const auto& z : r.roots)
            if (std::abs(z.imag()) < 1e-9 && z.real() > 1 && std::abs(z.real() - 1 / p) > 1e-9 / p) {
                r.z1 = z.real();
                r.epsilon = r.z1 - 1;
                r.epsilon_excess = r.epsilon - static_cast<double>(a);
                break;
            }
    }
    for (const auto& z : r.roots) r.max_residual = std::max(r.max_residual, detail::d_residual(p, h, z));
    r.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.roots.size(); ++i)
        for (std::size_t j = i + 1; j < r.roots.size(); ++j) r.min_gap = std::min(r.min_gap, std::abs(r.roots[i] - r.roots[j]));

    const double R = 1 / p;
    int inside = 0, on = 0, outside = 0;
    bool inside_real = false;
    for (const auto& z : r.roots) {
        const double m = std::abs(z);
        if (std::abs(z - cplx(R)) < tol * R) {
            ++on;
        } else if (m < R * (1 - tol)) {
            ++inside;
            inside_real = std::abs(z.imag()) < tol && r.epsilon > 0 && z.real() < R; // z1 - 1 may underflow double
        } else if (m > R * (1 + tol)) {
            ++outside;
        }
    }
    const bool ok = inside == 1 && inside_real && on == 1 && outside == static_cast<int>(h) && r.min_gap > tol &&
                    r.max_residual < tol;
    r.classified = ok && r.in_regime;
    RESETWALKS_REQUIRE(ok || !r.in_regime, ErrorCode::ClassificationFailed, "roots of D violate the expected layout");
    return r;
}

/// exp(-q n p^{h+1}).
inline double height_cdf_approx(double p, double n, double h) {
    return std::exp(-(1 - p) * n * std::pow(p, h + 1));
}

struct PeakHeight {
    long long h_star = 0;
    double peak_prob = 0; // p^{p/q} - p^{1/q}
};

inline PeakHeight peak_height(double p, double n) {
    RESETWALKS_REQUIRE(n >= 2, ErrorCode::InvalidArgument, "n must be at least 2");
    const double q = 1 - p, L = -std::log(p);
    PeakHeight r;
    r.h_star = std::llround((std::log(n) - std::log(L / (q * q))) / L);
    r.peak_prob = std::pow(p, p / q) - std::pow(p, 1 / q);
    return r;
}

/// argmax over h of exp(-qnp^{h+1}) - exp(-qnp^h).
inline long long approx_argmax(double p, double n) {
    long long best = 0;
    double bv = -1;
    const long long hi = static_cast<long long>(std::log(n) / -std::log(p)) + 40;
    for (long long h = 0; h <= hi; ++h) {
        const double v = height_cdf_approx(p, n, static_cast<double>(h)) - height_cdf_approx(p, n, static_cast<double>(h - 1));
        if (v > bv) {
            bv = v;
            best = h;
        }
    }
    return best;
}

struct FracPartData {
    double n = 1;
    long long floor_log = 0; // floor(ln n / ln(1/p))
    double frac = 0;         // {ln n / ln(1/p)}
    double alpha = 1;        // p^{-frac}
};

/// alpha(n) = p^{-{ln n / ln(1/p)}}; exact powers of an integer 1/p give alpha = 1.
inline FracPartData alpha(double p, double n) {
    RESETWALKS_REQUIRE(n >= 1, ErrorCode::InvalidArgument, "n must be at least 1");
    RESETWALKS_REQUIRE(p > 0 && p < 1, ErrorCode::InvalidArgument, "p must lie in (0,1)");
    FracPartData f;
    f.n = n;
    const double L = -std::log(p);
    const double m = std::round(1 / p);
    if (std::abs(m * p - 1) < 1e-15 && n == std::floor(n) && n < 9.007199254740992e15) {
        // integer base: count powers of m exactly
        const auto base = static_cast<unsigned long long>(m), nn = static_cast<unsigned long long>(n);
        unsigned long long pw = 1;
        long long k = 0;
        while (pw <= nn / base) {
            pw *= base;
            ++k;
        }
        f.floor_log = k;
        f.frac = pw == nn ? 0.0 : std::clamp(std::log(n / static_cast<double>(pw)) / L, 0.0, std::nextafter(1.0, 0.0));
    } else {
        const double x = std::log(n) / L;
        f.floor_log = static_cast<long long>(std::floor(x));
        f.frac = x - static_cast<double>(f.floor_log);
        if (f.frac > 1 - 1e-13) {
            ++f.floor_log;
            f.frac = 0;
        }
    }
    f.alpha = std::clamp(std::exp(f.frac * L), 1.0, std::nextafter(1 / p, 0.0));
    return f;
}

struct GumbelParams {
    double mu = 0;
    double beta = 1;
};

inline GumbelParams gumbel_for(double p, double mu = 0) { return {mu, 1 / -std::log(p)}; }

/// Continuous CDF at x, or discrete CDF at floor(x).
inline double gumbel_cdf(const GumbelParams& g, double x, bool discrete = false) {
    RESETWALKS_REQUIRE(g.beta > 0, ErrorCode::InvalidArgument, "beta must be positive");
    if (discrete) x = std::floor(x);
    return std::exp(-std::exp(-(x - g.mu) / g.beta));
}

template <class Real>
struct GumbelMoments {
    Real mean;
    Real variance;
    long long kmin = 0, kmax = 0; // summation window actually used
};

using Float50 = boost::multiprecision::cpp_bin_float_50;

/// Mean and variance of the discrete Gumbel(mu, beta), summing the pmf until both tails are negligible.
template <class Real = Float50>
GumbelMoments<Real> discrete_gumbel_moments(const GumbelParams& g) {
    using std::exp;
    using std::floor;
    RESETWALKS_REQUIRE(g.beta > 0, ErrorCode::InvalidArgument, "beta must be positive");
    const Real mu(g.mu), beta(g.beta);
    const auto F = [&](long long k) { return Real(exp(-exp(-(Real(k) - mu) / beta))); };
    const Real tiny = std::numeric_limits<Real>::epsilon() * Real(1e-6);
    GumbelMoments<Real> r;
    long long lo = static_cast<long long>(std::floor(g.mu - 40 * g.beta));
    long long hi = static_cast<long long>(std::ceil(g.mu + 40 * g.beta));
    while (F(lo) > tiny) lo -= 8;
    // right tail decays like exp(-(k - mu)/beta)
    while (Real(1) - F(hi) > tiny) hi += 8;
    Real s1 = 0, s2 = 0, prev = F(lo - 1);
    for (long long k = lo; k <= hi; ++k) {
        const Real cur = F(k);
        const Real pm = cur - prev;
        s1 += Real(k) * pm;
        s2 += Real(k) * Real(k) * pm;
        prev = cur;
    }
    r.mean = s1;
    r.variance = s2 - s1 * s1;
    r.kmin = lo;
    r.kmax = hi;
    return r;
}

/// Mean mu + gamma beta and variance pi^2 beta^2 / 6 of the continuous law.
inline std::pair<double, double> gumbel_moments(const GumbelParams& g) {
    return {g.mu + kEulerGamma * g.beta, std::numbers::pi * std::numbers::pi * g.beta * g.beta / 6};
}

struct GumbelCheck {
    long long n = 0;
    double distance = 0;   // sup_k |Pr(H_n <= L + k) - exp(-q alpha p^{k+1})|
    long long argmax = 0;  // height attaining it
    double mean_gap = 0;   // |E[Y] - E[X]| for Gumbel(0, beta)
    double var_gap = 0;    // |Var Y - Var X|
    bool bounds_ok = false; // mean_gap < 1 and var_gap < 2 + 4|E X|
};

inline GumbelCheck gumbel_convergence_check(double p, long long n) {
    RESETWALKS_REQUIRE(n >= 2, ErrorCode::InvalidArgument, "n must be at least 2");
    const double q = 1 - p;
    const auto a = alpha(p, static_cast<double>(n));
    GumbelCheck c;
    c.n = n;
    for (long long h = 0; h <= n; ++h) {
        const long long k = h - a.floor_log;
        const double exact = moran_height_cdf(p, h, n);
        const double approx = std::exp(-q * a.alpha * std::pow(p, static_cast<double>(k + 1)));
        const double d = std::abs(exact - approx);
        if (d > c.distance) {
            c.distance = d;
            c.argmax = h;
        }
        if (exact == 1.0 && approx == 1.0) break;
    }
    const auto g = gumbel_for(p);
    const auto dm = discrete_gumbel_moments<double>(g);
    const auto [m, v] = gumbel_moments(g);
    c.mean_gap = std::abs(dm.mean - m);
    c.var_gap = std::abs(dm.variance - v);
    c.bounds_ok = c.mean_gap < 1 && c.var_gap < 2 + 4 * std::abs(m);
    return c;
}

/// Pr(tau_h <= n) ~ 1 - exp(-q alpha(n)^2 n p^h).
inline double waiting_time_cdf_approx(double p, long long h, double n) {
    RESETWALKS_REQUIRE(h >= 1 && n >= 1, ErrorCode::InvalidArgument, "need h >= 1 and n >= 1");
    const double al = alpha(p, n).alpha;
    return -std::expm1(-(1 - p) * al * al * n * std::pow(p, static_cast<double>(h)));
}

/// 1 - exp(-q n p^h) = 1 - height_cdf_approx(p, n, h - 1), the form consistent with the height law.
inline double waiting_time_cdf_consistent(double p, long long h, double n) {
    RESETWALKS_REQUIRE(h >= 1 && n >= 1, ErrorCode::InvalidArgument, "need h >= 1 and n >= 1");
    return -std::expm1(-(1 - p) * n * std::pow(p, static_cast<double>(h)));
}

/// Exact Pr(tau_h <= n) = Pr(H_n >= h).
template <class T>
T waiting_time_cdf(const T& p, long long h, long long n) {
    return moran_height_tail(p, h - 1, n);
}

/// Pr(H~_n <= h) for Moran excursions from the bounded table: f_{n,0} / Pr(Y_n = 0).
template <class T>
T excursion_cdf_exact(const T& p, long long h, long long n) {
    RESETWALKS_REQUIRE(n >= 1, ErrorCode::InvalidArgument, "n must be at least 1");
    const auto t = bounded_gf_series(moran_model(p), h, n);
    return t.f(n, 0) / (T(1) - p);
}

struct ExcursionStats {
    long long n = 0;
    long long h = 0;
    double cdf = 0;      // Pr(H~_n <= h) = Pr(H_{n-1} <= h)
    double mean = 0;     // asymptotic mean at n - 1
    double variance = 0; // asymptotic variance at n - 1
};

inline ExcursionStats excursion_height_stats(double p, long long n, long long h) {
    RESETWALKS_REQUIRE(n >= 1, ErrorCode::InvalidArgument, "n must be at least 1");
    ExcursionStats s;
    s.n = n;
    s.h = h;
    s.cdf = moran_height_cdf(p, h, n - 1);
    if (n - 1 >= 2) {
        s.mean = mean_asymptotic(p, static_cast<double>(n - 1)).value;
        s.variance = variance_asymptotic(p, static_cast<double>(n - 1)).value;
    }
    return s;
}

} // namespace resetwalks
