#pragma once

// Ground-truth engines: exhaustive enumeration, dynamic programming and the
// exact finite-n formulas for the final altitude.

#include "core_model.hpp"
#include "errors.hpp"
#include "numeric.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace resetwalks {

struct OracleLimits {
    std::size_t max_width = std::size_t{1} << 24;
    double max_branches = 1e8;
};

/// Distribution of Y_n by iterating f_{n+1} = P f_n + q f_n(1).
template <class T>
DistVector<T> altitude_dist_dp(const StepModel<T>& model, long long n, const OracleLimits& lim = {}) {
    RESETWALKS_REQUIRE(n >= 0, ErrorCode::InvalidArgument, "n must be nonnegative");
    const auto P = step_polynomial(model);
    const std::size_t width = static_cast<std::size_t>(std::max(model.d(), 0) - std::min(model.c(), 0)) *
                                  static_cast<std::size_t>(n) + 1;
    RESETWALKS_REQUIRE(width <= lim.max_width, ErrorCode::ResourceLimit,
                       "altitude window of " + std::to_string(width) + " exceeds limit");
    auto f = LaurentPoly<T>::constant(T(1));
    for (long long t = 0; t < n; ++t) f = P * f + LaurentPoly<T>::constant(model.q() * f.sum());
    return DistVector<T>::from_poly(f);
}

/// Pr(Y_n = k) from [u^k]P^n + q [u^k] sum_{j<n} P^j.
template <class T>
T altitude_dist_formula(const StepModel<T>& model, long long n, long long k, const OracleLimits& lim = {}) {
    RESETWALKS_REQUIRE(n >= 0, ErrorCode::InvalidArgument, "n must be nonnegative");
    if (k < std::min<long long>(0, model.c() * n) || k > std::max<long long>(0, model.d() * n)) return T(0);
    const std::size_t width = static_cast<std::size_t>(model.d() - model.c()) * static_cast<std::size_t>(n) + 1;
    RESETWALKS_REQUIRE(width <= lim.max_width, ErrorCode::ResourceLimit, "power width exceeds limit");
    const auto P = step_polynomial(model);
    auto power = LaurentPoly<T>::constant(T(1));
    T acc(0);
    for (long long j = 0; j < n; ++j) {
        acc += power[k];
        power = power * P;
    }
    return power[k] + model.q() * acc;
}

/// Whole distribution from the same formula, sharing the powers of P.
template <class T>
DistVector<T> altitude_dist_formula_all(const StepModel<T>& model, long long n, const OracleLimits& lim = {}) {
    const std::size_t width = static_cast<std::size_t>(model.d() - model.c()) * static_cast<std::size_t>(n) + 1;
    RESETWALKS_REQUIRE(width <= lim.max_width, ErrorCode::ResourceLimit, "power width exceeds limit");
    const auto P = step_polynomial(model);
    auto power = LaurentPoly<T>::constant(T(1));
    LaurentPoly<T> acc;
    for (long long j = 0; j < n; ++j) {
        acc += power;
        power = power * P;
    }
    return DistVector<T>::from_poly(power + acc * model.q());
}

template <class T>
struct Moments {
    T mean;
    T variance;
};

/// Closed-form mean and variance of Y_n.
template <class T>
Moments<T> altitude_mean_var(const StepModel<T>& model, long long n) {
    const T q = model.q();
    if (n == 0) return {T(0), T(0)};
    if (model.is_moran()) {
        const T p = model.prob(1);
        const T pn = ipow(p, n);
        return {p / q * (T(1) - pn), p / (q * q) * (T(1) - pn * (pn * p + T(1 + 2 * n) * q))};
    }
    const auto [delta, V] = drift_moments(model);
    const T r = T(1) - q;
    const T rn = ipow(r, n);
    const T mean = delta / q + ipow(r, n - 1) * (delta - delta / q);
    const T var = ((V + delta) * q + delta * delta) / (q * q) +
                  rn * (T(2) * delta * delta * T(n) / ((q - T(1)) * q) - (V + delta) / q) -
                  rn * rn * delta * delta / (q * q);
    return {mean, var};
}

template <class T>
struct HeightDist {
    DistVector<T> heights; // Pr(H_n = h), h = 0..hmax
    T tail;                // Pr(H_n > hmax)
};

/// Exact law of H_n = max(Y_0..Y_n) by DP over (altitude, running max).
template <class T>
HeightDist<T> height_dist_dp(const StepModel<T>& model, long long n, long long hmax, const OracleLimits& lim = {}) {
    RESETWALKS_REQUIRE(n >= 0 && hmax >= 0, ErrorCode::InvalidArgument, "n and hmax must be nonnegative");
    const long long lo = std::min<long long>(0, static_cast<long long>(model.c()) * n);
    const long long alts = hmax - lo + 1;
    const long long H = hmax + 1;
    RESETWALKS_REQUIRE(static_cast<double>(alts) * static_cast<double>(H) <= static_cast<double>(lim.max_width),
                       ErrorCode::ResourceLimit, "height DP table exceeds limit");
    const auto idx = [&](long long a, long long m) { return static_cast<std::size_t>((a - lo) * H + m); };
    std::vector<T> cur(static_cast<std::size_t>(alts * H), T(0)), next(cur.size(), T(0));
    cur[idx(0, 0)] = T(1);
    T tail(0);
    for (long long t = 0; t < n; ++t) {
        std::fill(next.begin(), next.end(), T(0));
        for (long long m = 0; m <= hmax; ++m) {
            T reset_mass(0);
            for (long long a = lo; a <= m; ++a) {
                const T& w = cur[idx(a, m)];
                if (w == T(0)) continue;
                reset_mass += w;
                for (const auto& [k, pk] : model.steps()) {
                    const long long b = a + k;
                    const long long mm = std::max(m, b);
                    if (mm > hmax) {
                        tail += w * pk;
                    } else {
                        next[idx(b, mm)] += w * pk;
                    }
                }
            }
            if (reset_mass != T(0)) next[idx(0, m)] += reset_mass * model.q();
        }
        std::swap(cur, next);
    }
    HeightDist<T> out{{0, std::vector<T>(static_cast<std::size_t>(H), T(0))}, tail};
    for (long long m = 0; m <= hmax; ++m)
        for (long long a = lo; a <= m; ++a) out.heights.masses[static_cast<std::size_t>(m)] += cur[idx(a, m)];
    return out;
}

/// Altitude and height laws for every length 0..N, from brute-force enumeration of all branches.
template <class T>
struct Enumeration {
    std::vector<DistVector<T>> altitude;
    std::vector<DistVector<T>> height;
};

namespace detail {

template <class T>
struct EnumEvent {
    bool reset;
    int step;
    T weight;
};

template <class W>
void enumerate_dfs(const std::vector<EnumEvent<W>>& events, int N, int depth, long long alt, long long hgt,
                   const W& weight, long long lo, std::vector<std::vector<W>>& alt_hist,
                   std::vector<std::vector<W>>& hgt_hist) {
    alt_hist[static_cast<std::size_t>(depth)][static_cast<std::size_t>(alt - lo)] += weight;
    hgt_hist[static_cast<std::size_t>(depth)][static_cast<std::size_t>(hgt)] += weight;
    if (depth == N) return;
    for (const auto& e : events) {
        const long long a = e.reset ? 0 : alt + e.step;
        enumerate_dfs(events, N, depth + 1, a, std::max(hgt, a), W(weight * e.weight), lo, alt_hist, hgt_hist);
    }
}

inline BigInt to_bigint(__int128 v) {
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    BigInt r = BigInt(static_cast<std::uint64_t>(u >> 64));
    r <<= 64;
    r += BigInt(static_cast<std::uint64_t>(u));
    return neg ? BigInt(-r) : r;
}

} // namespace detail

template <class T>
Enumeration<T> enumerate_walks(const StepModel<T>& model, int N, const OracleLimits& lim = {}) {
    RESETWALKS_REQUIRE(N >= 0, ErrorCode::InvalidArgument, "N must be nonnegative");
    const double branches = std::pow(static_cast<double>(model.steps().size() + 1), N);
    RESETWALKS_REQUIRE(branches <= lim.max_branches, ErrorCode::ResourceLimit,
                       "enumeration needs " + std::to_string(branches) + " branches");
    const long long lo = std::min<long long>(0, static_cast<long long>(model.c()) * N);
    const long long hi = std::max<long long>(0, static_cast<long long>(model.d()) * N);
    const auto width = static_cast<std::size_t>(hi - lo + 1);
    const auto hwidth = static_cast<std::size_t>(std::max(0, model.d()) * N + 1);

    Enumeration<T> out;
    const auto finish = [&](auto&& alt_hist, auto&& hgt_hist, auto&& convert) {
        for (int t = 0; t <= N; ++t) {
            DistVector<T> a{lo, {}}, h{0, {}};
            for (const auto& w : alt_hist[static_cast<std::size_t>(t)]) a.masses.push_back(convert(w, t));
            for (const auto& w : hgt_hist[static_cast<std::size_t>(t)]) h.masses.push_back(convert(w, t));
            out.altitude.push_back(std::move(a));
            out.height.push_back(std::move(h));
        }
    };

    if constexpr (is_exact_v<T>) {
        // Integer weights over a common denominator keep the inner loop free of GMP.
        BigInt D = boost::multiprecision::denominator(model.q());
        for (const auto& [k, p] : model.steps()) D = boost::multiprecision::lcm(D, boost::multiprecision::denominator(p));
        const double bits = std::log2(D.template convert_to<double>()) * N;
        if (bits < 120.0) {
            std::vector<detail::EnumEvent<__int128>> events;
            events.push_back({true, 0, static_cast<__int128>((model.q() * Rational(D)).template convert_to<long long>())});
            for (const auto& [k, p] : model.steps())
                events.push_back({false, k, static_cast<__int128>((p * Rational(D)).template convert_to<long long>())});
            std::vector<std::vector<__int128>> ah(static_cast<std::size_t>(N + 1), std::vector<__int128>(width, 0));
            std::vector<std::vector<__int128>> hh(static_cast<std::size_t>(N + 1), std::vector<__int128>(hwidth, 0));
            detail::enumerate_dfs<__int128>(events, N, 0, 0, 0, __int128{1}, lo, ah, hh);
            finish(ah, hh, [&](__int128 w, int t) { return Rational(detail::to_bigint(w), boost::multiprecision::pow(D, static_cast<unsigned>(t))); });
            return out;
        }
    }
    std::vector<detail::EnumEvent<T>> events;
    events.push_back({true, 0, model.q()});
    for (const auto& [k, p] : model.steps()) events.push_back({false, k, p});
    std::vector<std::vector<T>> ah(static_cast<std::size_t>(N + 1), std::vector<T>(width, T(0)));
    std::vector<std::vector<T>> hh(static_cast<std::size_t>(N + 1), std::vector<T>(hwidth, T(0)));
    detail::enumerate_dfs<T>(events, N, 0, 0, 0, T(1), lo, ah, hh);
    finish(ah, hh, [](const T& w, int) { return w; });
    return out;
}

/// Result of the large-n final altitude analysis.
template <class T>
struct LimitCheck {
    char regime = 'a';         // 'a': one-sided support, 'b': two-sided
    long long k = 0;
    T limit{};                 // lim Pr(Y_n = k)
    bool reachable = true;
    long long terms = 0;       // number of powers of P summed
    T lower{};                 // q (min p)^|k|
    double upper = 0;          // q (max p)^(|k|/d)
    bool lower_ok = true;
    bool upper_ok = true;
    bool bounds_ok = true;
    double tau = std::numeric_limits<double>::quiet_NaN();
    double finite_n = std::numeric_limits<double>::quiet_NaN(); // Pr(Y_n = k) at the requested n
};

namespace detail {

struct NormalizedSupport {
    std::vector<std::pair<long long, double>> steps; // after dropping 0, dividing by gcd, flipping sign
    long long g = 1;
    bool flipped = false;
};

template <class T>
NormalizedSupport normalize_support(const StepModel<T>& model) {
    NormalizedSupport ns;
    long long g = 0;
    for (const auto& [k, p] : model.steps())
        if (k != 0) g = std::gcd(g, static_cast<long long>(k < 0 ? -k : k));
    RESETWALKS_REQUIRE(g > 0, ErrorCode::NormalizationFailed, "support reduces to the zero step");
    ns.g = g;
    ns.flipped = model.d() <= 0;
    for (const auto& [k, p] : model.steps()) {
        if (k == 0) continue;
        ns.steps.emplace_back((ns.flipped ? -k : k) / g, to_double(p));
    }
    return ns;
}

} // namespace detail

/// Unique positive zero of u P'(u) for a two-sided step set, by bisection.
inline double saddle_tau(const std::vector<std::pair<long long, double>>& steps, double tol = 1e-14) {
    const auto g = [&](double u) {
        double s = 0;
        for (const auto& [k, p] : steps) s += static_cast<double>(k) * p * std::pow(u, static_cast<double>(k));
        return s;
    };
    double a = 1.0, b = 1.0;
    while (g(a) > 0) a *= 0.5;
    while (g(b) < 0) b *= 2.0;
    for (int it = 0; it < 400 && (b - a) > tol * b; ++it) {
        const double m = 0.5 * (a + b);
        (g(m) < 0 ? a : b) = m;
    }
    return 0.5 * (a + b);
}

template <class T>
LimitCheck<T> limit_altitude_check(const StepModel<T>& model, long long k, long long n = 0, const OracleLimits& lim = {}) {
    const auto ns = detail::normalize_support(model);
    LimitCheck<T> r;
    r.k = k;
    long long cmin = ns.steps.front().first, cmax = cmin;
    for (const auto& [s, p] : ns.steps) {
        cmin = std::min(cmin, s);
        cmax = std::max(cmax, s);
    }
    r.regime = cmin > 0 ? 'a' : 'b';
    const auto P = step_polynomial(model);
    const bool zero_step = model.prob(0) != T(0);
    // Sum q [u^k] P^j over j; the tail beyond J is at most (1-q)^J.
    long long J;
    if (r.regime == 'a' && !zero_step) {
        J = k < 0 ? -k : k;
    } else {
        J = static_cast<long long>(std::ceil(std::log(1e-12) / std::log(1.0 - to_double(model.q())))) + 1;
        if (r.regime == 'a') J = std::max(J, k < 0 ? -k : k);
    }
    const std::size_t width = static_cast<std::size_t>(model.d() - model.c()) * static_cast<std::size_t>(J) + 1;
    RESETWALKS_REQUIRE(width <= lim.max_width, ErrorCode::ResourceLimit, "limit truncation too wide");
    auto power = LaurentPoly<T>::constant(T(1));
    T acc(0);
    for (long long j = 0; j <= J; ++j) {
        acc += power[k];
        if (j < J) power = power * P;
    }
    r.terms = J + 1;
    r.limit = model.q() * acc;
    r.reachable = r.limit != T(0);

    if (r.regime == 'a') {
        T pmin = model.steps().begin()->second, pmax = pmin;
        int dmax = 0;
        for (const auto& [s, p] : model.steps()) {
            if (s == 0) continue;
            pmin = std::min(pmin, p);
            pmax = std::max(pmax, p);
            dmax = std::max(dmax, s < 0 ? -s : s);
        }
        const long long ak = k < 0 ? -k : k;
        r.lower = model.q() * ipow(pmin, ak);
        r.upper = to_double(model.q()) * std::pow(to_double(pmax), static_cast<double>(ak) / dmax);
        if (r.reachable) {
            r.lower_ok = r.lower <= r.limit;
            r.upper_ok = to_double(r.limit) <= r.upper * (1 + 1e-12);
        }
        r.bounds_ok = r.lower_ok && r.upper_ok;
    } else {
        r.tau = saddle_tau(ns.steps);
    }
    if (n > 0) {
        const auto md = model_cast<double>(model);
        const auto dist = altitude_dist_dp(md, n, lim);
        r.finite_n = dist.at(k);
    }
    return r;
}

/// Geometric decay of lim Pr(Y_n = k) in k, fitted by least squares on log-masses of reachable k.
struct DecayFit {
    double ratio_pos = std::numeric_limits<double>::quiet_NaN(); // k -> +inf
    double ratio_neg = std::numeric_limits<double>::quiet_NaN(); // k -> -inf (two-sided only)
    bool geometric = false;
};

template <class T>
DecayFit limit_decay_fit(const StepModel<T>& model, long long kmax = 30) {
    const auto md = model_cast<double>(model);
    const auto fit = [&](long long from, long long to, long long dir) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (long long k = from; k <= to; ++k) {
            const double v = to_double(limit_altitude_check(md, dir * k).limit);
            if (!(v > 0)) continue;
            const double y = std::log(v);
            sx += k;
            sy += y;
            sxx += double(k) * k;
            sxy += k * y;
            ++cnt;
        }
        if (cnt < 3) return std::numeric_limits<double>::quiet_NaN();
        return std::exp((cnt * sxy - sx * sy) / (cnt * sxx - sx * sx));
    };
    DecayFit out;
    out.ratio_pos = fit(kmax / 2, kmax, 1);
    bool ok = out.ratio_pos < 1;
    if (md.c() < 0) {
        out.ratio_neg = fit(kmax / 2, kmax, -1);
        ok = ok && out.ratio_neg < 1;
    }
    out.geometric = ok;
    return out;
}

} // namespace resetwalks
