#pragma once

// Bounded-height generating functions: truncated series, kernel-method closed
// form, the Moran rational forms and fast coefficient extraction.

#include "core_model.hpp"
#include "errors.hpp"
#include "numeric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <string>
#include <type_traits>
#include <vector>

namespace resetwalks {

using cplx = std::complex<double>;

/// Univariate rational function num(z)/den(z), coefficients listed from z^0 upwards.
template <class T>
struct RationalGF {
    std::vector<T> num;
    std::vector<T> den;

    long long num_degree() const { return static_cast<long long>(num.size()) - 1; }
    long long den_degree() const { return static_cast<long long>(den.size()) - 1; }
};

/// Coefficients of W^{<=h} (no reset) and F^{<=h} (with resets) up to z^N.
template <class T>
struct BoundedGFTable {
    long long h = 0;
    std::vector<LaurentPoly<T>> W; // W[n] = sum_k w_{n,k} u^k
    std::vector<LaurentPoly<T>> F; // F[n] = sum_k f_{n,k} u^k

    long long order() const { return static_cast<long long>(F.size()) - 1; }
    /// Pr(H_n <= h).
    T cdf(long long n) const { return F[static_cast<std::size_t>(n)].sum(); }
    T f(long long n, long long k) const { return F[static_cast<std::size_t>(n)][k]; }
    T w(long long n, long long k) const { return W[static_cast<std::size_t>(n)][k]; }
};

template <class T>
BoundedGFTable<T> bounded_gf_series(const StepModel<T>& model, long long h, long long N,
                                    std::size_t max_width = std::size_t{1} << 24) {
    RESETWALKS_REQUIRE(h >= 0 && N >= 0, ErrorCode::InvalidArgument, "h and N must be nonnegative");
    const double cells = static_cast<double>(N + 1) *
                         static_cast<double>(h + static_cast<long long>(std::max(0, -model.c())) * N + 1);
    RESETWALKS_REQUIRE(cells <= static_cast<double>(max_width), ErrorCode::ResourceLimit,
                       "bounded series table exceeds limit");
    const auto P = step_polynomial(model);
    BoundedGFTable<T> t;
    t.h = h;
    t.W.push_back(LaurentPoly<T>::constant(T(1)));
    t.F.push_back(LaurentPoly<T>::constant(T(1)));
    for (long long n = 0; n < N; ++n) {
        t.W.push_back((P * t.W.back()).truncate_above(h));
        const auto& f = t.F.back();
        t.F.push_back((P * f).truncate_above(h) + LaurentPoly<T>::constant(model.q() * f.sum()));
    }
    return t;
}

/// Evaluates the truncated series sum_{n<=N} z^n rows[n](u).
template <class T>
cplx eval_series(const std::vector<LaurentPoly<T>>& rows, cplx z, cplx u) {
    cplx acc = 0, zn = 1;
    for (const auto& r : rows) {
        acc += zn * r.template evaluate<cplx>(u);
        zn *= z;
    }
    return acc;
}

struct KernelOptions {
    double max_abs_z = 0.5;  // beyond this radius selection by modulus is not trusted
    double min_gap = 1.2;    // required ratio |u_d| / |u_{d+1}| between large and small roots
    double tol = 1e-9;       // residual tolerance |1 - z P(u_i)|
};

struct KernelRoots {
    cplx z;
    std::vector<cplx> large_roots; // the d branches with |u_i(z)| -> infinity as z -> 0
    std::vector<cplx> all_roots;
    double max_residual = 0;
};

namespace detail {

/// Roots of sum_i c[i] x^i (c.back() != 0) by companion-matrix eigenvalues, each polished by Newton steps.
inline std::vector<cplx> polynomial_roots(const std::vector<cplx>& c, int polish = 2) {
    const int n = static_cast<int>(c.size()) - 1;
    if (n <= 0) return {};
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) M(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) M(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
    for (auto& r : roots) {
        for (int it = 0; it < polish; ++it) {
            cplx f = 0, df = 0;
            for (int i = n; i >= 0; --i) {
                df = df * r + f;
                f = f * r + c[static_cast<std::size_t>(i)];
            }
            if (std::abs(df) == 0.0) break;
            const cplx step = f / df;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            r -= step;
        }
    }
    return roots;
}

} // namespace detail

template <class T>
KernelRoots kernel_roots_at(const StepModel<T>& model, cplx z, const KernelOptions& opt = {}) {
    RESETWALKS_REQUIRE(z != cplx(0), ErrorCode::InvalidArgument, "kernel roots need z != 0");
    RESETWALKS_REQUIRE(std::abs(z) <= opt.max_abs_z, ErrorCode::BranchPointProximity,
                       "|z| beyond the radius where roots are selected by modulus");
    const int c = model.c(), d = model.d();
    const int shift = std::max(0, -c);
    // u^shift (1 - z P(u))
    std::vector<cplx> poly(static_cast<std::size_t>(std::max(d, 0) + shift + 1), cplx(0));
    poly[static_cast<std::size_t>(shift)] += 1.0;
    for (const auto& [k, p] : model.steps()) poly[static_cast<std::size_t>(k + shift)] -= z * to_double(p);
    while (poly.size() > 1 && poly.back() == cplx(0)) poly.pop_back();
    KernelRoots kr;
    kr.z = z;
    kr.all_roots = detail::polynomial_roots(poly);
    std::sort(kr.all_roots.begin(), kr.all_roots.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
    const auto P = step_polynomial(model);
    for (const auto& r : kr.all_roots) {
        const double res = std::abs(1.0 - z * P.template evaluate<cplx>(r));
        kr.max_residual = std::max(kr.max_residual, res);
    }
    const auto nd = static_cast<std::size_t>(std::max(d, 0));
    if (nd < kr.all_roots.size()) {
        const double gap = std::abs(kr.all_roots[nd - (nd > 0 ? 1 : 0)]) / std::abs(kr.all_roots[nd]);
        RESETWALKS_REQUIRE(nd == 0 || gap >= opt.min_gap, ErrorCode::BranchPointProximity,
                           "large and small kernel roots are not separated");
    }
    kr.large_roots.assign(kr.all_roots.begin(), kr.all_roots.begin() + static_cast<std::ptrdiff_t>(nd));
    RESETWALKS_REQUIRE(kr.max_residual < opt.tol * std::max(1.0, std::abs(z) * 1e3), ErrorCode::ResidualTooLarge,
                       "kernel root residual too large");
    return kr;
}

/// sum_k u_k^{-h-1} prod_{j != k} (u_j - u)/(u_j - u_k), i.e. sum_k G_k(z) u^{k-1}.
inline cplx interpolation_sum(const std::vector<cplx>& roots, long long h, cplx u) {
    cplx s = 0;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        cplx term = std::pow(roots[k], -static_cast<double>(h + 1));
        for (std::size_t j = 0; j < roots.size(); ++j)
            if (j != k) term *= (roots[j] - u) / (roots[j] - roots[k]);
        s += term;
    }
    return s;
}

/// G_1..G_d from the linear system u_i^h sum_k G_k u_i^k = 1, solved directly.
inline std::vector<cplx> kernel_unknowns(const std::vector<cplx>& roots, long long h) {
    const auto d = static_cast<Eigen::Index>(roots.size());
    Eigen::MatrixXcd V(d, d);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Ones(d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index k = 0; k < d; ++k) V(i, k) = std::pow(roots[static_cast<std::size_t>(i)], static_cast<double>(h + k + 1));
    Eigen::VectorXcd g = V.fullPivLu().solve(rhs);
    return std::vector<cplx>(g.data(), g.data() + d);
}

struct BoundedValue {
    cplx W;   // W^{<=h}(z,u)
    cplx W1;  // W^{<=h}(z,1)
    cplx F;   // F^{<=h}(z,u)
};

template <class T>
BoundedValue bounded_gf_closed_form(const StepModel<T>& model, long long h, cplx z, cplx u,
                                    const KernelOptions& opt = {}) {
    const auto kr = kernel_roots_at(model, z, opt);
    const auto& r = kr.large_roots;
    double scale = 0, gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.size(); ++i) {
        scale = std::max(scale, std::abs(r[i]));
        for (std::size_t j = i + 1; j < r.size(); ++j) gap = std::min(gap, std::abs(r[i] - r[j]));
    }
    RESETWALKS_REQUIRE(gap >= 1e-8 * scale, ErrorCode::DegenerateRoots, "coincident kernel roots");
    const auto P = step_polynomial(model);
    const auto W_at = [&](cplx x) {
        const cplx kernel = 1.0 - z * P.template evaluate<cplx>(x);
        RESETWALKS_REQUIRE(std::abs(kernel) > 1e-14, ErrorCode::KernelZero, "1 - zP(u) vanishes");
        cplx num = 1.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            cplx term = std::pow(x / r[i], static_cast<double>(h + 1));
            for (std::size_t j = 0; j < r.size(); ++j)
                if (j != i) term *= (r[j] - x) / (r[j] - r[i]);
            num -= term;
        }
        return num / kernel;
    };
    BoundedValue v;
    v.W = W_at(u);
    v.W1 = W_at(1.0);
    v.F = v.W / (1.0 - z * to_double(model.q()) * v.W1);
    return v;
}

/// F^{<=h}(z,1) for Moran walks: (1 - (pz)^{h+1}) / (1 - z + q p^{h+1} z^{h+2}).
template <class T>
RationalGF<T> moran_height_gf(const T& p, long long h) {
    RESETWALKS_REQUIRE(p > T(0) && p < T(1), ErrorCode::InvalidArgument, "p must lie in (0,1)");
    RESETWALKS_REQUIRE(h >= 0, ErrorCode::InvalidArgument, "h must be nonnegative");
    const T ph1 = ipow(p, h + 1);
    RationalGF<T> g;
    g.num.assign(static_cast<std::size_t>(h + 2), T(0));
    g.num[0] = T(1);
    g.num[static_cast<std::size_t>(h + 1)] = -ph1;
    g.den.assign(static_cast<std::size_t>(h + 3), T(0));
    g.den[0] = T(1);
    g.den[1] = T(-1);
    g.den[static_cast<std::size_t>(h + 2)] += (T(1) - p) * ph1;
    return g;
}

/// Bivariate Moran form (1-pz)(1-(pzu)^{h+1}) / ((1-puz)(1-z+(pz)^{h+1} z q)).
inline cplx moran_bivariate(double p, long long h, cplx z, cplx u) {
    const double q = 1 - p;
    const cplx pz = p * z;
    return (1.0 - pz) * (1.0 - std::pow(pz * u, static_cast<double>(h + 1))) /
           ((1.0 - pz * u) * (1.0 - z + std::pow(pz, static_cast<double>(h + 1)) * z * q));
}

/// Pr(tau_h = n) = [z^n] (1 - pz) p^h z^h / (1 - z + q p^h z^{h+1}).
template <class T>
RationalGF<T> waiting_time_gf(const T& p, long long h) {
    RESETWALKS_REQUIRE(h >= 1, ErrorCode::InvalidArgument, "target height must be at least 1");
    RESETWALKS_REQUIRE(p > T(0) && p < T(1), ErrorCode::InvalidArgument, "p must lie in (0,1)");
    const T ph = ipow(p, h);
    RationalGF<T> g;
    g.num.assign(static_cast<std::size_t>(h + 2), T(0));
    g.num[static_cast<std::size_t>(h)] = ph;
    g.num[static_cast<std::size_t>(h + 1)] = -p * ph;
    g.den.assign(static_cast<std::size_t>(h + 2), T(0));
    g.den[0] = T(1);
    g.den[1] = T(-1);
    g.den[static_cast<std::size_t>(h + 1)] += (T(1) - p) * ph;
    return g;
}

/// First N+1 series coefficients by the O(N d) recurrence.
template <class T>
std::vector<T> series_prefix(const RationalGF<T>& gf, long long N) {
    RESETWALKS_REQUIRE(!gf.den.empty() && gf.den[0] != T(0), ErrorCode::InvalidArgument,
                       "denominator constant term must be nonzero");
    std::vector<T> a(static_cast<std::size_t>(N + 1), T(0));
    const T inv0 = T(1) / gf.den[0];
    for (long long n = 0; n <= N; ++n) {
        T s = n < static_cast<long long>(gf.num.size()) ? gf.num[static_cast<std::size_t>(n)] : T(0);
        const long long top = std::min<long long>(n, gf.den_degree());
        for (long long i = 1; i <= top; ++i) s -= gf.den[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(n - i)];
        a[static_cast<std::size_t>(n)] = s * inv0;
    }
    return a;
}

namespace detail {

// Product of a and b reduced modulo x^m - sum_{i=1}^m rec[i-1] x^{m-i}.
template <class U>
std::vector<U> mulmod(const std::vector<U>& a, const std::vector<U>& b, const std::vector<U>& rec) {
    const std::size_t m = rec.size();
    std::vector<U> prod(2 * m - 1, U(0));
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i] == U(0)) continue;
        for (std::size_t j = 0; j < m; ++j) prod[i + j] += a[i] * b[j];
    }
    for (std::size_t k = 2 * m - 2; k >= m; --k) {
        const U top = prod[k];
        if (top == U(0)) continue;
        prod[k] = U(0);
        for (std::size_t i = 1; i <= m; ++i) prod[k - i] += top * rec[i - 1];
    }
    prod.resize(m);
    return prod;
}

} // namespace detail

/// [z^n] of a rational GF in O(d^2 log n): x^n reduced modulo the characteristic
/// polynomial of the denominator recurrence, combined with the initial terms.
template <class T>
T coeff_extract(const RationalGF<T>& gf, long long n) {
    RESETWALKS_REQUIRE(n >= 0, ErrorCode::InvalidArgument, "n must be nonnegative");
    RESETWALKS_REQUIRE(!gf.den.empty() && gf.den[0] != T(0), ErrorCode::InvalidArgument,
                       "denominator constant term must be nonzero");
    // Float mode accumulates in extended precision.
    using U = std::conditional_t<is_exact_v<T>, T, long double>;
    auto den = gf.den;
    while (den.size() > 1 && den.back() == T(0)) den.pop_back();
    const long long m = static_cast<long long>(den.size()) - 1;
    const long long n0 = std::max<long long>(gf.num_degree() + 1, m);
    if (n < n0 || m == 0) {
        if (m == 0) return n < static_cast<long long>(gf.num.size()) ? T(gf.num[static_cast<std::size_t>(n)] / den[0]) : T(0);
        return series_prefix(gf, n)[static_cast<std::size_t>(n)];
    }
    const auto head = series_prefix(gf, n0 - 1);
    const long long s = n0 - m;
    std::vector<U> rec(static_cast<std::size_t>(m));
    const U d0 = U(den[0]);
    for (long long i = 1; i <= m; ++i) rec[static_cast<std::size_t>(i - 1)] = -U(den[static_cast<std::size_t>(i)]) / d0;

    // x^(n - s) mod charpoly by binary powering
    std::vector<U> result(static_cast<std::size_t>(m), U(0)), base(static_cast<std::size_t>(m), U(0));
    result[0] = U(1);
    if (m == 1) {
        base[0] = rec[0];
    } else {
        base[1] = U(1);
    }
    for (long long e = n - s; e > 0; e >>= 1) {
        if (e & 1) result = detail::mulmod(result, base, rec);
        if (e > 1) base = detail::mulmod(base, base, rec);
    }
    U acc(0);
    for (long long j = 0; j < m; ++j) acc += result[static_cast<std::size_t>(j)] * U(head[static_cast<std::size_t>(s + j)]);
    if constexpr (!is_exact_v<T>) {
        RESETWALKS_REQUIRE(std::isfinite(static_cast<double>(acc)), ErrorCode::ResidualTooLarge,
                           "coefficient extraction overflowed");
    }
    return T(acc);
}

namespace detail {

inline BigInt binomial(long long m, long long k) {
    if (m < 0 || k < 0 || k > m) return BigInt(0);
    k = std::min(k, m - k);
    BigInt r(1);
    for (long long i = 1; i <= k; ++i) {
        r *= BigInt(m - k + i);
        r /= BigInt(i);
    }
    return r;
}

} // namespace detail

/// Alternating binomial sum for Pr(H_n <= h) of Moran walks.
template <class T>
T pippenger_sum(const T& p, long long h, long long n) {
    RESETWALKS_REQUIRE(n >= 0 && h >= 0, ErrorCode::InvalidArgument, "n and h must be nonnegative");
    const T ph1 = ipow(p, h + 1);
    const T x = -(T(1) - p) * ph1;
    T s(0), xk(1);
    for (long long k = 0; k <= n / (h + 1); ++k) {
        const BigInt b1 = detail::binomial(n - k * (h + 1), k);
        const BigInt b2 = detail::binomial(n - (k + 1) * (h + 1), k);
        if constexpr (is_exact_v<T>) {
            s += xk * (Rational(b1) - ph1 * Rational(b2));
        } else {
            s += xk * (b1.template convert_to<T>() - ph1 * b2.template convert_to<T>());
        }
        xk *= x;
    }
    return s;
}

/// Exact Pr(H_n <= h) for Moran walks.
template <class T>
T moran_height_cdf(const T& p, long long h, long long n) {
    if (h < 0) return T(0);
    if (n <= h) return T(1);
    return coeff_extract(moran_height_gf(p, h), n);
}

/// Pr(H_n = h) for Moran walks.
template <class T>
T moran_height_pmf(const T& p, long long h, long long n) {
    return moran_height_cdf(p, h, n) - moran_height_cdf(p, h - 1, n);
}

/// Pr(H_n > h) = [z^n] (pz)^{h+1}(1 - pz) / ((1 - z)(1 - z + q p^{h+1} z^{h+2})), free of cancellation.
template <class T>
RationalGF<T> moran_height_tail_gf(const T& p, long long h) {
    auto g = moran_height_gf(p, h);
    const T ph1 = ipow(p, h + 1);
    RationalGF<T> t;
    t.num.assign(static_cast<std::size_t>(h + 3), T(0));
    t.num[static_cast<std::size_t>(h + 1)] = ph1;
    t.num[static_cast<std::size_t>(h + 2)] = -p * ph1;
    t.den.assign(g.den.size() + 1, T(0));
    for (std::size_t i = 0; i < g.den.size(); ++i) {
        t.den[i] += g.den[i];
        t.den[i + 1] -= g.den[i];
    }
    return t;
}

template <class T>
T moran_height_tail(const T& p, long long h, long long n) {
    if (h < 0) return T(1);
    if (n <= h) return T(0);
    if constexpr (!is_exact_v<T>) {
        // The factor (1 - z) sits next to the root of D near 1; the rounding error of that
        // recurrence grows like n^2, so long walks go through the CDF instead.
        if (n > 4096) return std::max(T(0), T(1) - moran_height_cdf(p, h, n));
    }
    return coeff_extract(moran_height_tail_gf(p, h), n);
}

template <class T>
struct HeightMoments {
    T mean;
    T variance;
    long long hmax; // first height whose tail fell below the cutoff
};

/// E[H_n] and Var[H_n] from sum_h Pr(H_n > h) and sum_h (2h+1) Pr(H_n > h).
inline HeightMoments<double> moran_height_moments(double p, long long n, double cutoff = 1e-18) {
    long double s1 = 0, s2 = 0;
    long long h = 0;
    for (; h < n; ++h) {
        const long double tail = moran_height_tail(p, h, n);
        if (tail <= cutoff) break;
        s1 += tail;
        s2 += (2.0L * h + 1.0L) * tail;
    }
    return {static_cast<double>(s1), static_cast<double>(s2 - s1 * s1), h};
}

} // namespace resetwalks
