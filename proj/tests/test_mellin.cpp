#include <resetwalks/kernel_gf.hpp>
#include <resetwalks/mellin.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace resetwalks;

TEST(SpecialFunctions, GammaAtI) { EXPECT_NEAR(std::abs(gamma_imag(1.0)), 0.521564, 1e-6); }

TEST(SpecialFunctions, LogGammaMatchesSinhIdentity) {
    for (double t = 1e-2; t <= 1e3; t *= 1.37) {
        const double lhs = 2.0 * static_cast<double>(log_gamma(cplxl(0, t)).real());
        const double rhs = std::log(std::numbers::pi) - std::log(t) - log_sinh(std::numbers::pi * t);
        EXPECT_NEAR(lhs - rhs, 0.0, 1e-12) << t;
    }
}

TEST(SpecialFunctions, LogGammaRealAxis) {
    EXPECT_NEAR(static_cast<double>(log_gamma(cplxl(5, 0)).real()), std::log(24.0), 1e-14);
    EXPECT_NEAR(static_cast<double>(log_gamma(cplxl(0.5, 0)).real()), 0.5 * std::log(std::numbers::pi), 1e-14);
}

TEST(SpecialFunctions, DigammaImaginaryPart) {
    for (double t : {0.01, 0.3, 1.0, 9.06, 50.0, 400.0}) {
        const auto psi = digamma_imag(t);
        const double exact = 1 / (2 * t) + std::numbers::pi / 2 / std::tanh(std::numbers::pi * t);
        EXPECT_NEAR(psi.imag(), exact, 1e-12 * exact) << t;
    }
}

TEST(SpecialFunctions, DigammaRealValues) {
    EXPECT_NEAR(digamma({1.0, 0.0}).real(), -kEulerGamma, 1e-14);
    EXPECT_NEAR(digamma({0.5, 0.0}).real(), -kEulerGamma - 2 * std::numbers::ln2, 1e-14);
    // psi(z+1) = psi(z) + 1/z
    const std::complex<double> z(0.3, 2.7);
    EXPECT_LT(std::abs(digamma(z + 1.0) - digamma(z) - 1.0 / z), 1e-13);
}

TEST(SpecialFunctions, DigammaImaginaryRecurrence) {
    for (double t : {0.1, 1.0, 30.0}) {
        const std::complex<double> it(0, t);
        EXPECT_LT(std::abs(digamma(1.0 + it) - digamma_imag(t) - 1.0 / it), 1e-13);
    }
    EXPECT_NEAR(digamma_imag(100).real() / std::log(100.0), 1.0, 0.05);
}

TEST(SpecialFunctions, DigammaBoundHolds) {
    for (double t = 1e-3; t < 1e4; t *= 1.1) {
        const double m = std::abs(digamma_imag(t));
        EXPECT_LE(m, digamma_imag_bound(t)) << t;
        EXPECT_LE(digamma_imag_bound(t), digamma_imag_bound_relaxed(t) + 1e-12) << t;
    }
}

TEST(Fluctuations, FirstHarmonicHalf) {
    const auto s = make_series(0.5, SeriesKind::Q, 1);
    EXPECT_NEAR(std::abs(s.coeffs[0]), 5.45e-7, 0.01e-7);
    EXPECT_NEAR(s.t(1), 2 * std::numbers::pi / std::numbers::ln2, 1e-12);
}

TEST(Fluctuations, SupValuesHalf) {
    const auto Q = sup_over_period(cached_series(0.5, SeriesKind::Q));
    const auto R = sup_over_period(cached_series(0.5, SeriesKind::R));
    EXPECT_NEAR(Q.sup, 1.0904301769e-6, 1e-12);
    EXPECT_NEAR(R.sup, 2.9877681204e-6, 1e-12);
    EXPECT_LE(Q.sup, closed_bound_Q(0.5));
    EXPECT_LE(R.sup, closed_bound_R(0.5));
    EXPECT_LE(Q.sup, sinh_bound_Q(0.5));
    EXPECT_LE(sinh_bound_Q(0.5), closed_bound_Q(0.5));
}

TEST(Fluctuations, BoundsAcrossP) {
    for (double p = 0.05; p < 0.96; p += 0.05) {
        const auto Q = sup_over_period(cached_series(p, SeriesKind::Q), 1024);
        const auto R = sup_over_period(cached_series(p, SeriesKind::R), 1024);
        EXPECT_LE(Q.sup, closed_bound_Q_corrected(p)) << p;
        EXPECT_LE(R.sup, closed_bound_R_corrected(p)) << p;
        EXPECT_LE(Q.sup, sinh_bound_Q(p) * (1 + 1e-12)) << p;
    }
}

TEST(Fluctuations, UncorrectedQBoundTooSmallForSmallP) {
    const auto Q = sup_over_period(cached_series(0.2, SeriesKind::Q));
    EXPECT_GT(Q.sup, closed_bound_Q(0.2));
}

TEST(Fluctuations, RealOnRealAxis) {
    const auto& s = cached_series(0.5, SeriesKind::R);
    for (double x : {0.1, 0.37}) {
        std::complex<double> full = 0;
        for (int k = 1; k <= s.K(); ++k) {
            const auto c = s.coeffs[static_cast<std::size_t>(k - 1)];
            full += c * std::polar(1.0, s.t(k) * x) + std::conj(c) * std::polar(1.0, -s.t(k) * x);
        }
        EXPECT_LT(std::abs(full.imag()), 1e-18);
    }
}

TEST(Fluctuations, RCoefficientsGeometricToo) {
    EXPECT_TRUE(coefficient_decay_report(make_series(0.5, SeriesKind::R, 8)).geometric);
    EXPECT_TRUE(coefficient_decay_report(make_series(0.05, SeriesKind::R, 20)).geometric);
}

TEST(Fluctuations, ZeroMeanOverPeriod) {
    for (double p : {0.1, 0.5, 0.8}) {
        EXPECT_LT(std::abs(period_integral(cached_series(p, SeriesKind::Q))), 1e-14);
        EXPECT_LT(std::abs(period_integral(cached_series(p, SeriesKind::R))), 1e-14);
    }
}

TEST(Fluctuations, Periodic) {
    const auto& s = cached_series(0.3, SeriesKind::R);
    for (double x : {0.0, 0.4, 2.2}) EXPECT_NEAR(s(x), s(x + s.period()), 1e-15);
}

TEST(Fluctuations, TruncationWithinTailBound) {
    const double p = 0.05;
    const auto full = make_series(p, SeriesKind::R);
    for (int K : {1, 2, 4}) {
        const auto cut = make_series(p, SeriesKind::R, K);
        const double tb = tail_bound(p, SeriesKind::R, K);
        for (double x = 0; x < full.period(); x += 0.1) EXPECT_LE(std::abs(full(x) - cut(x)), tb + 1e-18);
    }
}

TEST(Fluctuations, GeometricDecayVersusReference) {
    const auto s = make_series(0.5, SeriesKind::Q, 12);
    const auto r = coefficient_decay_report(s);
    EXPECT_TRUE(r.geometric);
    EXPECT_FALSE(r.reference_geometric);
    EXPECT_GT(r.fitted_ratio, 0.1 * r.predicted_ratio);
    EXPECT_LT(r.fitted_ratio, 10 * r.predicted_ratio);
}

TEST(HarmonicSum, ExpansionMatchesDirect) {
    for (double p : {0.2, 0.5, 0.7})
        for (double t : {1e3, 1e5, 1e9}) EXPECT_NEAR(harmonic_sum_direct(p, t), harmonic_sum_expansion(p, t), 1e-8);
}

TEST(HarmonicSum, LimitsAndMonotone) {
    EXPECT_LT(harmonic_sum_direct(0.5, 1e-12), 1e-11);
    double prev = 0;
    for (double t = 0.01; t < 1e6; t *= 3) {
        const double v = harmonic_sum_direct(0.5, t);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(HeightMean, FluctuationIsActiveNearResonance) {
    const double p = 0.5;
    for (int m : {22, 24, 26}) {
        const long long n = 3LL << m;
        const auto exact = moran_height_moments(p, n);
        const auto a = mean_asymptotic(p, static_cast<double>(n));
        EXPECT_LT(std::abs(exact.mean - a.value), std::abs(exact.mean - (a.value - a.fluctuation))) << m;
    }
}

TEST(HeightMean, BreakdownSumsAndNoFluctuationVariance) {
    const auto v = variance_asymptotic(0.5, 1e6);
    EXPECT_DOUBLE_EQ(v.value, v.leading + v.constant + v.fluctuation);
    EXPECT_NEAR(v.leading + v.constant, 3.507, 1e-3);
    const auto m = mean_asymptotic(0.5, 1e6);
    EXPECT_LE(std::abs(m.fluctuation), 1.6e-6);
}

TEST(HeightMean, AsymptoticAgreesWithExactSums) {
    for (double p : {0.5, 0.25}) {
        for (long long n : {1LL << 12, 1LL << 16, 1LL << 20}) {
            const auto exact = moran_height_moments(p, n);
            const auto m = mean_asymptotic(p, static_cast<double>(n));
            const auto v = variance_asymptotic(p, static_cast<double>(n));
            const double scale = std::pow(std::log(static_cast<double>(n)), 5) / static_cast<double>(n);
            EXPECT_LT(std::abs(exact.mean - m.value), 3 * scale) << p << " " << n;
            EXPECT_LT(std::abs(exact.variance - v.value), 3 * scale) << p << " " << n;
        }
    }
}
