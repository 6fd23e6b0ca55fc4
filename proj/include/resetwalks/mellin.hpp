#pragma once

// Fourier series Q and R produced by the Mellin analysis of the height, and
// the asymptotic mean and variance of H_n built from them.

#include "errors.hpp"
#include "special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>
#include <vector>

namespace resetwalks {

enum class SeriesKind { Q, R };

/// Coefficients c_k = Gamma(s_k) (kind Q) or Gamma'(s_k) (kind R) for s_k = 2ik pi / ln p, k = 1..K.
/// The series value is 2 Re sum_k c_k exp(-s_k x).
struct FluctuationSeries {
    double p = 0.5;
    SeriesKind kind = SeriesKind::Q;
    std::vector<std::complex<double>> coeffs;

    double period() const { return -std::log(p); }
    /// t_k = |s_k|
    double t(int k) const { return 2.0 * std::numbers::pi * k / period(); }
    int K() const { return static_cast<int>(coeffs.size()); }

    double operator()(double x) const {
        double s = 0;
        for (int k = 1; k <= K(); ++k) {
            // exp(-s_k x) = exp(i t_k x)
            s += (coeffs[static_cast<std::size_t>(k - 1)] * std::polar(1.0, t(k) * x)).real();
        }
        return 2.0 * s;
    }
};

namespace detail {

// Gamma(s_k) and psi(s_k) at s_k = -i t_k: conjugates of the values at +i t_k.
inline std::complex<double> gamma_at(double tk) { return std::conj(gamma_imag(tk)); }
inline std::complex<double> psi_at(double tk) { return std::conj(digamma_imag(tk)); }

inline double coefficient_size(SeriesKind kind, double tk) {
    const double g = std::exp(log_abs_gamma_imag(tk));
    return kind == SeriesKind::Q ? g : g * std::abs(digamma_imag(tk));
}

} // namespace detail

inline constexpr int kAutoK = 0;

/// Builds the series; K = kAutoK stops once |Gamma(s_k)| (1 + |psi(s_k)|) < 1e-25.
inline FluctuationSeries make_series(double p, SeriesKind kind, int K = kAutoK) {
    RESETWALKS_REQUIRE(p > 0 && p < 1, ErrorCode::InvalidArgument, "p must lie in (0,1)");
    FluctuationSeries s;
    s.p = p;
    s.kind = kind;
    const int cap = K > 0 ? K : 100000;
    for (int k = 1; k <= cap; ++k) {
        const double tk = s.t(k);
        const auto g = detail::gamma_at(tk);
        if (K == kAutoK) {
            const double size = std::exp(log_abs_gamma_imag(tk)) * (1 + std::abs(digamma_imag(tk)));
            if (size < 1e-25 && k > 1) break;
        }
        s.coeffs.push_back(kind == SeriesKind::Q ? g : detail::psi_at(tk) * g);
    }
    return s;
}

/// Process-wide cache of auto-truncated series; readers share, the first writer builds.
inline const FluctuationSeries& cached_series(double p, SeriesKind kind) {
    static std::shared_mutex mutex;
    static std::map<std::pair<double, int>, std::unique_ptr<FluctuationSeries>> cache;
    const auto key = std::make_pair(p, static_cast<int>(kind));
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return *it->second;
    }
    std::unique_lock lock(mutex);
    auto& slot = cache[key];
    if (!slot) slot = std::make_unique<FluctuationSeries>(make_series(p, kind));
    return *slot;
}

inline double eval_Q(double p, double x, int K = kAutoK) {
    return K == kAutoK ? cached_series(p, SeriesKind::Q)(x) : make_series(p, SeriesKind::Q, K)(x);
}

inline double eval_R(double p, double x, int K = kAutoK) {
    return K == kAutoK ? cached_series(p, SeriesKind::R)(x) : make_series(p, SeriesKind::R, K)(x);
}

/// Upper bound on |series - truncated series| after K terms, from the exact |Gamma(it)| and the digamma bound.
inline double tail_bound(double p, SeriesKind kind, int K) {
    const double L = -std::log(p);
    double s = 0;
    for (int k = K + 1;; ++k) {
        const double tk = 2.0 * std::numbers::pi * k / L;
        double term = 2.0 * std::exp(log_abs_gamma_imag(tk));
        if (kind == SeriesKind::R) term *= digamma_imag_bound(tk);
        s += term;
        if (term < 1e-40 || term < s * 1e-18) break;
    }
    return s;
}

struct PeriodExtremum {
    double x = 0;     // location in [0, period)
    double value = 0; // series value there
    double sup = 0;   // |value|
};

/// sup over one period: dense grid followed by golden-section refinement around the best cell.
inline PeriodExtremum sup_over_period(const FluctuationSeries& s, int grid = 4096) {
    const double L = s.period();
    const auto absf = [&](double x) { return std::abs(s(x)); };
    int best = 0;
    double bestv = -1;
    for (int i = 0; i < grid; ++i) {
        const double v = absf(L * i / grid);
        if (v > bestv) {
            bestv = v;
            best = i;
        }
    }
    double a = L * (best - 1) / grid, b = L * (best + 1) / grid;
    const double r = (std::sqrt(5.0) - 1) / 2;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = absf(c), fd = absf(d);
    for (int it = 0; it < 200 && (b - a) > 1e-15 * L; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = absf(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = absf(d);
        }
    }
    PeriodExtremum e;
    e.x = std::fmod(0.5 * (a + b) + L, L);
    e.value = s(e.x);
    e.sup = std::abs(e.value);
    return e;
}

/// (1/L) * integral over one period, by the trapezoid rule (exact for trigonometric polynomials of degree < M).
inline double period_mean(const FluctuationSeries& s, int M = 0) {
    if (M <= 0) M = 4 * s.K() + 16;
    const double L = s.period();
    long double acc = 0;
    for (int i = 0; i < M; ++i) acc += s(L * i / M);
    return static_cast<double>(acc / M);
}

/// integral of the series over one period.
inline double period_integral(const FluctuationSeries& s, int M = 0) { return period_mean(s, M) * s.period(); }

/// lnexp(p, beta) = ln(1 - exp(beta / ln p)).
inline double lnexp(double p, double beta) { return std::log1p(-std::exp(beta / std::log(p))); }

/// Closed-form uniform bound on |Q|.
inline double closed_bound_Q(double p) {
    const double pi = std::numbers::pi;
    return std::log(p) / pi * lnexp(p, 0.8 * pi * pi);
}

/// Closed-form uniform bound on |R|.
inline double closed_bound_R(double p) {
    const double pi = std::numbers::pi;
    const double lp = std::log(p);
    return lp / pi * (lnexp(p, 0.8 * pi * pi) + (pi / 2 + 1 - kEulerGamma - lp / (2 * pi)) * lnexp(p, 114.0 / 155.0 * pi * pi));
}

/// The same bounds with the factor 2 of 2 sum_k |Gamma(s_k)| kept; the uncorrected forms drop it
/// and fall below sup|Q| for small p (e.g. p = 0.2).
inline double closed_bound_Q_corrected(double p) { return 2.0 * closed_bound_Q(p); }
inline double closed_bound_R_corrected(double p) { return 2.0 * closed_bound_R(p); }

/// 2 sum_k |Gamma(s_k)|, the bound before the sinh estimate.
inline double sinh_bound_Q(double p) {
    const double L = -std::log(p);
    double s = 0;
    for (int k = 1; k < 100000; ++k) {
        const double term = 2.0 * std::exp(log_abs_gamma_imag(2.0 * std::numbers::pi * k / L));
        s += term;
        if (term < s * 1e-18) break;
    }
    return s;
}

struct DecayReport {
    std::vector<double> magnitudes;   // |c_k|
    std::vector<double> ratios;       // |c_{k+1} / c_k|
    double fitted_ratio = 0;          // exp(slope) of least squares on log|c_k|
    double predicted_ratio = 0;       // exp(-pi^2 / ln(1/p)), the decay of |Gamma(i t_k)|
    double reference_tail_ratio = 0;  // last ratio for the k^{-1.5} reference sequence
    bool geometric = false;           // series coefficients decay geometrically
    bool reference_geometric = true;  // must be false: the reference decays polynomially
};

namespace detail {

// residual sum of squares of the least squares line through (x_i, y_i)
inline double line_fit(const std::vector<double>& x, const std::vector<double>& y, double* slope = nullptr) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double a = (sy - b * sx) / n;
    if (slope) *slope = b;
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) rss += (y[i] - a - b * x[i]) * (y[i] - a - b * x[i]);
    return rss;
}

// log|c_k| is closer to linear in k than to linear in ln k, with a negative slope
inline bool is_geometric(const std::vector<double>& mags, double* fitted = nullptr) {
    std::vector<double> k, lk, y;
    for (std::size_t i = 0; i < mags.size(); ++i) {
        k.push_back(static_cast<double>(i + 1));
        lk.push_back(std::log(static_cast<double>(i + 1)));
        y.push_back(std::log(mags[i]));
    }
    double slope = 0;
    const double geo = line_fit(k, y, &slope);
    const double poly = line_fit(lk, y);
    if (fitted) *fitted = std::exp(slope);
    return slope < 0 && geo < poly;
}

} // namespace detail

inline DecayReport coefficient_decay_report(const FluctuationSeries& s) {
    RESETWALKS_REQUIRE(s.K() >= 5, ErrorCode::InvalidArgument, "decay report needs at least 5 coefficients");
    DecayReport r;
    for (const auto& c : s.coeffs) r.magnitudes.push_back(std::abs(c));
    for (std::size_t i = 0; i + 1 < r.magnitudes.size(); ++i) r.ratios.push_back(r.magnitudes[i + 1] / r.magnitudes[i]);
    r.geometric = detail::is_geometric(r.magnitudes, &r.fitted_ratio);
    r.predicted_ratio = std::exp(-std::numbers::pi * std::numbers::pi / s.period());
    std::vector<double> ref;
    for (int k = 1; k <= s.K(); ++k) ref.push_back(std::pow(static_cast<double>(k), -1.5));
    r.reference_geometric = detail::is_geometric(ref);
    r.reference_tail_ratio = ref.back() / ref[ref.size() - 2];
    return r;
}

struct AsymptoticMoment {
    long long n = 0;
    double value = 0;
    double leading = 0;     // ln n / ln(1/p) for the mean, pi^2/(6 ln^2 p) for the variance
    double constant = 0;    // remaining non-oscillating constants
    double fluctuation = 0; // contribution of Q (and R)
    double error_order = 0; // (ln n)^4/n for the mean, (ln n)^5/n for the variance
};

/// E[H_n] ~ ln n/ln(1/p) - gamma/ln p - 1/2 - ln q/ln p + Q(ln(qn))/ln p, with x = ln(qn) overridable.
inline AsymptoticMoment mean_asymptotic(double p, double n) {
    RESETWALKS_REQUIRE(n >= 2, ErrorCode::InvalidArgument, "n must be at least 2");
    const double q = 1 - p, lp = std::log(p);
    AsymptoticMoment m;
    m.n = static_cast<long long>(n);
    m.leading = std::log(n) / -lp;
    m.constant = -kEulerGamma / lp - 0.5 - std::log(q) / lp;
    m.fluctuation = eval_Q(p, std::log(q * n)) / lp;
    m.value = m.leading + m.constant + m.fluctuation;
    m.error_order = std::pow(std::log(n), 4) / n;
    return m;
}

/// Var[H_n] ~ (Q^2 + 2 gamma Q + 2R + pi^2/6)/ln^2 p + 1/12 at x = ln(qn).
inline AsymptoticMoment variance_asymptotic(double p, double n) {
    RESETWALKS_REQUIRE(n >= 2, ErrorCode::InvalidArgument, "n must be at least 2");
    const double q = 1 - p, lp2 = std::log(p) * std::log(p);
    const double x = std::log(q * n);
    const double Q = eval_Q(p, x), R = eval_R(p, x);
    AsymptoticMoment m;
    m.n = static_cast<long long>(n);
    m.leading = std::numbers::pi * std::numbers::pi / 6 / lp2;
    m.constant = 1.0 / 12;
    m.fluctuation = (Q * Q + 2 * kEulerGamma * Q + 2 * R) / lp2;
    m.value = m.leading + m.constant + m.fluctuation;
    m.error_order = std::pow(std::log(n), 5) / n;
    return m;
}

/// phi(t) = sum_{h>=0} (1 - exp(-t q p^{h+1})) summed directly, with the geometric tail added.
inline double harmonic_sum_direct(double p, double t) {
    RESETWALKS_REQUIRE(t > 0, ErrorCode::InvalidArgument, "t must be positive");
    const long double q = 1.0L - p;
    long double s = 0, x = t * q * p;
    for (int h = 0; h < 100000; ++h, x *= p) {
        if (x < 1e-22L) {
            s += x / (1.0L - p); // remaining terms are x p^j to first order
            break;
        }
        s += -std::expm1(-x);
    }
    return static_cast<double>(s);
}

/// The inverse-Mellin expansion of phi(t).
inline double harmonic_sum_expansion(double p, double t) {
    const double q = 1 - p, lp = std::log(p);
    return std::log(t) / -lp - (kEulerGamma / lp + 0.5 + std::log(q) / lp) + eval_Q(p, std::log(q * t)) / lp;
}

} // namespace resetwalks
