#include "test_support.hpp"

#include <resetwalks/oracle.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace resetwalks;
using R = Rational;

namespace {

auto two_sided() { return validate_model<R>({{-1, R(1, 4)}, {2, R(1, 4)}}, R(1, 2)); }

} // namespace

TEST(AltitudeDP, MoranSmallN) {
    auto d = altitude_dist_dp(moran_model(R(1, 2)), 3);
    EXPECT_EQ(d.at(0), R(1, 2));
    EXPECT_EQ(d.at(1), R(1, 4));
    EXPECT_EQ(d.at(2), R(1, 8));
    EXPECT_EQ(d.at(3), R(1, 8));
    EXPECT_EQ(d.total(), R(1));
}

TEST(AltitudeDP, PointMassAtZero) {
    auto d = altitude_dist_dp(two_sided(), 0);
    EXPECT_EQ(d.lo(), 0);
    EXPECT_EQ(d.hi(), 0);
    EXPECT_EQ(d.at(0), R(1));
}

TEST(AltitudeDP, TwoSidedMatchesEnumeration) {
    auto m = two_sided();
    auto e = enumerate_walks(m, 2);
    auto d = altitude_dist_dp(m, 2);
    for (long long k = -2; k <= 4; ++k) EXPECT_EQ(d.at(k), e.altitude[2].at(k)) << k;
}

TEST(AltitudeDP, ResourceLimit) {
    OracleLimits lim;
    lim.max_width = 100;
    try {
        altitude_dist_dp(two_sided(), 1000, lim);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ResourceLimit);
    }
}

TEST(AltitudeFormula, Examples) {
    EXPECT_EQ(altitude_dist_formula(moran_model(R(1, 2)), 3, 1), R(1, 4));
    EXPECT_EQ(altitude_dist_formula(two_sided(), 3, 7), R(0));
    EXPECT_EQ(altitude_dist_formula(two_sided(), 3, -4), R(0));
}

TEST(AltitudeFormula, AgreesWithDPOnRandomTriples) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> nd(0, 12);
    for (int trial = 0; trial < 200; ++trial) {
        auto m = testing_support::random_model(rng);
        const int n = nd(rng);
        auto d = altitude_dist_dp(m, n);
        std::uniform_int_distribution<long long> kd(std::min(0, m.c() * n) - 1, std::max(0, m.d() * n) + 1);
        const long long k = kd(rng);
        EXPECT_EQ(altitude_dist_formula(m, n, k), d.at(k));
    }
}

TEST(AltitudeMoments, MoranTwoSteps) {
    auto mv = altitude_mean_var(moran_model(R(1, 2)), 2);
    EXPECT_EQ(mv.mean, R(3, 4));
    auto d = altitude_dist_dp(moran_model(R(1, 2)), 2);
    EXPECT_EQ(mv.variance, d.variance());
}

TEST(AltitudeMoments, ZeroLength) {
    auto mv = altitude_mean_var(two_sided(), 0);
    EXPECT_EQ(mv.mean, R(0));
    EXPECT_EQ(mv.variance, R(0));
}

TEST(AltitudeMoments, GeneralFormulaMatchesDP) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto m = testing_support::random_model(rng);
        for (int n : {1, 2, 5, 12}) {
            auto d = altitude_dist_dp(m, n);
            auto mv = altitude_mean_var(m, n);
            EXPECT_EQ(mv.mean, d.mean());
            EXPECT_EQ(mv.variance, d.variance());
        }
    }
}

TEST(AltitudeMoments, MeanMatchesDPUpTo200) {
    auto m = validate_model<R>({{-1, R(1, 3)}, {2, R(1, 6)}}, R(1, 2));
    auto P = step_polynomial(m);
    auto f = LaurentPoly<R>::constant(R(1));
    for (int n = 0; n <= 200; ++n) {
        if (n % 20 == 0) EXPECT_EQ(altitude_mean_var(m, n).mean, DistVector<R>::from_poly(f).mean()) << n;
        f = P * f + LaurentPoly<R>::constant(m.q() * f.sum());
    }
}

TEST(HeightDP, MoranExamples) {
    auto m = moran_model(R(1, 2));
    auto h = height_dist_dp(m, 2, 4);
    EXPECT_EQ(h.heights.at(0), R(1, 4));
    EXPECT_EQ(h.heights.at(1), R(1, 2));
    EXPECT_EQ(h.heights.at(2), R(1, 4));
    EXPECT_EQ(h.tail, R(0));
    for (int n = 0; n <= 6; ++n) {
        auto hd = height_dist_dp(m, n, n);
        EXPECT_EQ(hd.heights.cdf(n), R(1));
    }
}

TEST(HeightDP, TruncationTailAndMonotonicity) {
    auto m = two_sided();
    R prev_cdf3(1);
    for (int n = 0; n <= 10; ++n) {
        auto full = height_dist_dp(m, n, 2 * n);
        auto cut = height_dist_dp(m, n, 3);
        EXPECT_EQ(full.tail, R(0));
        EXPECT_EQ(full.heights.total(), R(1));
        EXPECT_EQ(cut.heights.total() + cut.tail, R(1));
        for (int h = 0; h <= 3; ++h) EXPECT_EQ(cut.heights.at(h), full.heights.at(h));
        R cdf3 = full.heights.cdf(3);
        EXPECT_LE(cdf3, prev_cdf3);
        prev_cdf3 = cdf3;
    }
}

TEST(HeightDP, TwoSidedMatchesEnumeration) {
    auto m = two_sided();
    auto e = enumerate_walks(m, 10);
    for (int n = 0; n <= 10; ++n) {
        auto h = height_dist_dp(m, n, 2 * n);
        for (int k = 0; k <= 2 * n; ++k) EXPECT_EQ(h.heights.at(k), e.height[static_cast<std::size_t>(n)].at(k));
    }
}

TEST(Enumeration, CapIsEnforced) {
    OracleLimits lim;
    lim.max_branches = 1e3;
    EXPECT_THROW(enumerate_walks(two_sided(), 10, lim), Error);
}

TEST(Enumeration, ExactAndFloatAgree) {
    auto m = two_sided();
    auto e = enumerate_walks(m, 6);
    auto f = enumerate_walks(model_cast<double>(m), 6);
    for (long long k = -6; k <= 12; ++k) EXPECT_NEAR(to_double(e.altitude[6].at(k)), f.altitude[6].at(k), 1e-15);
}

TEST(Limit, MoranGeometric) {
    auto r = limit_altitude_check(moran_model(R(1, 2)), 3);
    EXPECT_EQ(r.regime, 'a');
    EXPECT_EQ(r.limit, R(1, 16));
    EXPECT_TRUE(r.bounds_ok);
}

TEST(Limit, FrobeniusUnreachable) {
    auto m = validate_model<R>({{2, R(1, 4)}, {3, R(1, 4)}}, R(1, 2));
    auto r = limit_altitude_check(m, 1);
    EXPECT_EQ(r.limit, R(0));
    EXPECT_FALSE(r.reachable);
    EXPECT_TRUE(limit_altitude_check(m, 5).reachable);
}

TEST(Limit, LowerBoundHoldsUpperBoundCanFail) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = testing_support::random_positive_model(rng);
        for (int k = 0; k <= 20; ++k) {
            auto r = limit_altitude_check(m, k);
            if (r.reachable) EXPECT_TRUE(r.lower_ok) << k;
        }
    }
    auto m = validate_model<R>({{1, R(9, 20)}, {2, R(9, 20)}}, R(1, 10));
    auto r = limit_altitude_check(m, 2);
    EXPECT_EQ(r.limit, R(1, 10) * (R(9, 20) + R(81, 400)));
    EXPECT_TRUE(r.lower_ok);
    EXPECT_FALSE(r.upper_ok);
}

TEST(Limit, MatchesLargeNDistribution) {
    auto m = validate_model<R>({{1, R(1, 3)}, {2, R(1, 6)}}, R(1, 2));
    for (int k = 0; k < 8; ++k) {
        auto r = limit_altitude_check(m, k, 200);
        EXPECT_NEAR(to_double(r.limit), r.finite_n, 1e-12);
    }
}

TEST(Limit, TwoSidedSaddleAndDecay) {
    auto r = limit_altitude_check(two_sided(), 0, 300);
    EXPECT_EQ(r.regime, 'b');
    EXPECT_NEAR(r.tau, std::pow(2.0, -1.0 / 3.0), 1e-13);
    EXPECT_NEAR(to_double(r.limit), r.finite_n, 1e-10);
    auto fit = limit_decay_fit(two_sided(), 30);
    EXPECT_TRUE(fit.geometric);
    EXPECT_LT(fit.ratio_pos, 1.0);
    EXPECT_LT(fit.ratio_neg, 1.0);
}

TEST(Limit, ZeroStepUsesOriginalLaw) {
    auto m = validate_model<R>({{0, R(1, 4)}, {1, R(1, 4)}}, R(1, 2));
    auto r = limit_altitude_check(m, 2, 200);
    EXPECT_NEAR(to_double(r.limit), r.finite_n, 1e-12);
}

TEST(Limit, NormalizationFailure) {
    auto m = validate_model<R>({{0, R(1, 2)}}, R(1, 2));
    try {
        limit_altitude_check(m, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NormalizationFailed);
    }
}
