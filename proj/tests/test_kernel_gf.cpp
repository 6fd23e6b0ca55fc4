#include "test_support.hpp"

#include <resetwalks/kernel_gf.hpp>
#include <resetwalks/oracle.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace resetwalks;
using R = Rational;

namespace {

auto thirds_model() { return validate_model<R>({{1, R(1, 3)}, {2, R(1, 2)}}, R(1, 6)); }

} // namespace

TEST(BoundedSeries, WorkedExampleCoefficients) {
    auto t = bounded_gf_series(thirds_model(), 3, 8);
    EXPECT_EQ(t.W[0], LaurentPoly<R>::constant(R(1)));
    EXPECT_EQ(t.W[1], LaurentPoly<R>(1, {R(1, 3), R(1, 2)}));
    EXPECT_EQ(t.W[2], LaurentPoly<R>(2, {R(1, 9), R(1, 3)}));
    EXPECT_EQ(t.W[3], LaurentPoly<R>(3, {R(1, 27)}));
    for (int n = 4; n <= 8; ++n) EXPECT_TRUE(t.W[static_cast<std::size_t>(n)].is_zero());
    // W(z,1) = 1 + 5z/6 + 4z^2/9 + z^3/27
    EXPECT_EQ(t.W[1].sum(), R(5, 6));
    EXPECT_EQ(t.W[2].sum(), R(4, 9));
}

TEST(BoundedSeries, ResetPartMatchesQuotient) {
    // F = W / (1 - zqW(z,1)) as power series
    auto m = thirds_model();
    auto t = bounded_gf_series(m, 3, 15);
    std::vector<R> w1;
    for (auto& w : t.W) w1.push_back(w.sum());
    std::vector<LaurentPoly<R>> expect;
    for (std::size_t n = 0; n < t.F.size(); ++n) {
        LaurentPoly<R> acc = t.W[n];
        for (std::size_t j = 1; j <= n; ++j) acc += expect[n - j] * (m.q() * w1[j - 1]);
        expect.push_back(acc);
    }
    for (std::size_t n = 0; n < t.F.size(); ++n) EXPECT_EQ(t.F[n], expect[n]) << n;
}

TEST(BoundedSeries, EmptyWalk) {
    auto t = bounded_gf_series(thirds_model(), 2, 0);
    ASSERT_EQ(t.F.size(), 1u);
    EXPECT_EQ(t.f(0, 0), R(1));
    EXPECT_EQ(t.cdf(0), R(1));
}

TEST(BoundedSeries, MoranMatchesHeightDP) {
    auto m = moran_model(R(1, 2));
    auto t = bounded_gf_series(m, 5, 12);
    for (int n = 0; n <= 12; ++n) EXPECT_EQ(t.cdf(n), height_dist_dp(m, n, 5).heights.total());
}

TEST(BoundedSeries, RandomModelsMatchHeightDP) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = testing_support::random_model(rng);
        for (int h : {0, 2, 5}) {
            auto t = bounded_gf_series(m, h, 12);
            for (int n = 0; n <= 12; ++n) EXPECT_EQ(t.cdf(n), height_dist_dp(m, n, h).heights.total());
        }
    }
}

TEST(BoundedSeries, RejectsOversizedTables) {
    auto m = validate_model<R>({{-3, R(1, 4)}, {1, R(1, 4)}}, R(1, 2));
    EXPECT_THROW(bounded_gf_series(m, 3, 5000, 1000), Error);
}

TEST(KernelRoots, WorkedExampleQuadratic) {
    auto m = thirds_model();
    const double z = 0.1;
    auto kr = kernel_roots_at(m, z);
    ASSERT_EQ(kr.large_roots.size(), 2u);
    const double s = std::sqrt(z * z + 18 * z);
    const double u1 = (-z + s) / (3 * z), u2 = (-z - s) / (3 * z);
    std::vector<double> got{kr.large_roots[0].real(), kr.large_roots[1].real()};
    std::sort(got.begin(), got.end());
    EXPECT_NEAR(got[0], u2, 1e-10);
    EXPECT_NEAR(got[1], u1, 1e-10);
    EXPECT_NEAR(std::abs(kr.large_roots[0] + kr.large_roots[1] - (-2.0 / 3)), 0, 1e-10);
    EXPECT_NEAR(std::abs(kr.large_roots[0] * kr.large_roots[1] - (-2.0 / z)), 0, 1e-9);
}

TEST(KernelRoots, MoranSingleRoot) {
    auto kr = kernel_roots_at(moran_model(0.3), cplx(0.2, 0.1));
    ASSERT_EQ(kr.large_roots.size(), 1u);
    EXPECT_NEAR(std::abs(kr.large_roots[0] - 1.0 / (0.3 * cplx(0.2, 0.1))), 0, 1e-10);
}

TEST(KernelRoots, RefusesOutsideTrustedRadius) {
    auto m = validate_model<double>({{-1, 0.25}, {1, 0.25}}, 0.5);
    try {
        kernel_roots_at(m, cplx(0.9));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BranchPointProximity);
    }
    KernelOptions loose;
    loose.max_abs_z = 10;
    // near the branch point z = 1/(2 sqrt(p_-1 p_1)) = 2 both roots have modulus 1
    EXPECT_THROW(kernel_roots_at(m, cplx(1.999), loose), Error);
}

TEST(ClosedForm, MatchesSeriesAcrossRandomModels) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> rz(0.02, 0.1), ru(0.7, 1.3), ang(0, 2 * M_PI);
    std::uniform_int_distribution<int> hd(0, 6);
    int points = 0;
    for (int model = 0; model < 20; ++model) {
        auto m = model_cast<double>(testing_support::random_model(rng));
        const int h = hd(rng);
        auto t = bounded_gf_series(m, h, 45);
        for (int i = 0; i < 5; ++i, ++points) {
            const cplx z = std::polar(rz(rng), ang(rng));
            const cplx u = std::polar(ru(rng), ang(rng));
            auto v = bounded_gf_closed_form(m, h, z, u);
            EXPECT_LT(std::abs(v.W - eval_series(t.W, z, u)), 1e-9);
            EXPECT_LT(std::abs(v.F - eval_series(t.F, z, u)), 1e-9);
        }
    }
    EXPECT_EQ(points, 100);
}

TEST(ClosedForm, MoranAgreesWithBivariateForm) {
    auto m = moran_model(0.5);
    for (double zr : {0.05, 0.2, 0.4})
        for (double ur : {0.0, 0.5, 1.0, 1.7}) {
            const cplx z(zr, 0.1), u(ur, -0.2);
            auto v = bounded_gf_closed_form(m, 3, z, u);
            EXPECT_LT(std::abs(v.F - moran_bivariate(0.5, 3, z, u)), 1e-12);
        }
}

TEST(ClosedForm, UAtZeroCountsWalksEndingAtZero) {
    auto m = thirds_model();
    auto md = model_cast<double>(m);
    auto t = bounded_gf_series(m, 4, 40);
    const double z = 0.15;
    double w0 = 0, f0 = 0, zn = 1;
    for (std::size_t n = 0; n < t.W.size(); ++n, zn *= z) {
        w0 += to_double(t.w(static_cast<long long>(n), 0)) * zn;
        f0 += to_double(t.f(static_cast<long long>(n), 0)) * zn;
    }
    auto v = bounded_gf_closed_form(md, 4, z, 0.0);
    EXPECT_NEAR(v.W.real(), w0, 1e-12);
    EXPECT_NEAR(v.F.real(), f0, 1e-12);
}

TEST(ClosedForm, DegenerateAndKernelZero) {
    auto m = validate_model<double>({{1, 0.25}, {2, 0.25}}, 0.5);
    // u with 1 - zP(u) = 0: a root of the kernel itself
    const cplx z = 0.1;
    auto kr = kernel_roots_at(m, z);
    try {
        bounded_gf_closed_form(m, 2, z, kr.all_roots.back());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::KernelZero);
    }
}

TEST(ClosedForm, LagrangeIdentityResidual) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> rz(0.03, 0.1), ru(0.8, 1.2), ang(0, 2 * M_PI);
    for (int model = 0; model < 10; ++model) {
        auto m = model_cast<double>(testing_support::random_model(rng));
        const int h = 3;
        auto t = bounded_gf_series(m, h, 45);
        const auto P = step_polynomial(m);
        for (int i = 0; i < 5; ++i) {
            const cplx z = std::polar(rz(rng), ang(rng)), u = std::polar(ru(rng), ang(rng));
            auto kr = kernel_roots_at(m, z);
            const cplx lhs = eval_series(t.W, z, u) * (1.0 - z * P.evaluate<cplx>(u));
            const cplx rhs = 1.0 - std::pow(u, h + 1.0) * interpolation_sum(kr.large_roots, h, u);
            EXPECT_LT(std::abs(lhs - rhs), 1e-9);
            // G_k from the linear system reproduce the interpolation sum
            auto G = kernel_unknowns(kr.large_roots, h);
            cplx s = 0;
            for (std::size_t k = 0; k < G.size(); ++k) s += G[k] * std::pow(u, static_cast<double>(k));
            EXPECT_LT(std::abs(s - interpolation_sum(kr.large_roots, h, u)), 1e-9 * std::max(1.0, std::abs(s)));
        }
    }
}

TEST(MoranGF, Shape) {
    auto g = moran_height_gf(R(1, 2), 2);
    EXPECT_EQ(g.num, (std::vector<R>{R(1), R(0), R(0), R(-1, 8)}));
    EXPECT_EQ(g.den, (std::vector<R>{R(1), R(-1), R(0), R(0), R(1, 16)}));
    auto g0 = moran_height_gf(R(1, 3), 0);
    auto a = series_prefix(g0, 1);
    EXPECT_EQ(a[0], R(1));
    EXPECT_EQ(a[1], R(2, 3));
}

TEST(MoranGF, PrefixMatchesHeightDP) {
    auto m = moran_model(R(1, 2));
    auto a = series_prefix(moran_height_gf(R(1, 2), 3), 12);
    for (int n = 0; n <= 12; ++n) EXPECT_EQ(a[static_cast<std::size_t>(n)], height_dist_dp(m, n, 3).heights.total());
}

TEST(CoeffExtract, MatchesUnrollingSmall) {
    for (int h = 0; h <= 8; ++h) {
        auto g = moran_height_gf(R(1, 2), h);
        auto a = series_prefix(g, 64);
        for (int n = 0; n <= 64; ++n) EXPECT_EQ(coeff_extract(g, n), a[static_cast<std::size_t>(n)]);
    }
    RationalGF<R> c{{R(3)}, {R(2)}};
    EXPECT_EQ(coeff_extract(c, 0), R(3, 2));
    EXPECT_EQ(coeff_extract(c, 5), R(0));
}

TEST(CoeffExtract, BitIdenticalUpTo10k) {
    auto g = moran_height_gf(R(2, 3), 3);
    auto a = series_prefix(g, 10000);
    for (int n : {100, 1000, 4321, 9999, 10000}) EXPECT_EQ(coeff_extract(g, n), a[static_cast<std::size_t>(n)]);
    auto w = waiting_time_gf(R(1, 4), 2);
    auto b = series_prefix(w, 3000);
    EXPECT_EQ(coeff_extract(w, 3000), b[3000]);
}

TEST(CoeffExtract, FloatTracksExact) {
    for (int h : {3, 10, 20}) {
        auto ge = moran_height_gf(R(1, 2), h);
        auto gf = moran_height_gf(0.5, h);
        for (int n : {50, 500, 2000}) {
            const double ex = to_double(coeff_extract(ge, n));
            EXPECT_NEAR(coeff_extract(gf, n), ex, 1e-14) << h << " " << n;
        }
    }
}

TEST(CoeffExtract, TailFormMatchesComplement) {
    for (int h : {2, 6}) {
        for (int n : {5, 40, 300}) {
            EXPECT_EQ(moran_height_tail(R(1, 3), h, n), R(1) - moran_height_cdf(R(1, 3), h, n));
        }
    }
}

TEST(Pippenger, EqualsGFCoefficientExactly) {
    for (const R& p : {R(1, 4), R(1, 2), R(2, 3)})
        for (int h = 0; h <= 10; h += 5)
            for (int n = 0; n <= 100; n += 7) EXPECT_EQ(pippenger_sum(p, h, n), moran_height_cdf(p, h, n));
    EXPECT_EQ(pippenger_sum(R(1, 2), 0, 2), R(1, 4));
    for (int n = 0; n <= 5; ++n) EXPECT_EQ(pippenger_sum(R(1, 3), 5, n), R(1));
}

TEST(WaitingTime, StraightRunAndNormalization) {
    for (int h = 1; h <= 6; ++h) {
        auto g = waiting_time_gf(R(1, 2), h);
        auto a = series_prefix(g, 200);
        EXPECT_EQ(a[static_cast<std::size_t>(h)], ipow(R(1, 2), h));
        for (int n = 0; n < h; ++n) EXPECT_EQ(a[static_cast<std::size_t>(n)], R(0));
        R partial(0);
        for (int n = 0; n <= 200; ++n) {
            partial += a[static_cast<std::size_t>(n)];
            if (n % 25 == 0) EXPECT_EQ(partial, R(1) - moran_height_cdf(R(1, 2), h - 1, n));
        }
    }
}

TEST(WaitingTime, FirstPassageFromHeightDP) {
    auto m = moran_model(R(1, 3));
    for (int h = 1; h <= 6; ++h) {
        auto a = series_prefix(waiting_time_gf(R(1, 3), h), 40);
        for (int n = 1; n <= 40; ++n) {
            // Pr(H_n = h, H_{n-1} < h) = Pr(H_{n-1} <= h-1) - Pr(H_n <= h-1)
            const R lhs = height_dist_dp(m, n - 1, h - 1).heights.total() - height_dist_dp(m, n, h - 1).heights.total();
            EXPECT_EQ(a[static_cast<std::size_t>(n)], lhs);
        }
    }
}

TEST(HeightMomentsOracle, MatchesDirectDistribution) {
    const long long n = 300;
    auto hd = height_dist_dp(moran_model(0.5), n, 80);
    auto mo = moran_height_moments(0.5, n);
    EXPECT_NEAR(mo.mean, hd.heights.mean(), 1e-12);
    EXPECT_NEAR(mo.variance, hd.heights.variance(), 1e-11);
}
