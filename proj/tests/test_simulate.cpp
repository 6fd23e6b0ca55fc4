#include <resetwalks/oracle.hpp>
#include <resetwalks/simulate.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace resetwalks;
using R = Rational;

TEST(Simulate, TraceStructure) {
    auto tr = sample_trace(moran_model(0.5), 30, 1);
    ASSERT_EQ(tr.altitudes.size(), 31u);
    EXPECT_EQ(tr.altitudes.front(), 0);
    for (std::size_t t = 1; t < tr.altitudes.size(); ++t) {
        const bool reset = std::find(tr.resets.begin(), tr.resets.end(), static_cast<long long>(t)) != tr.resets.end();
        if (reset) EXPECT_EQ(tr.altitudes[t], 0);
        else EXPECT_EQ(tr.altitudes[t], tr.altitudes[t - 1] + 1);
    }
    EXPECT_GE(tr.height(), tr.final_altitude());
}

TEST(Simulate, DeterministicAndThreadIndependent) {
    auto m = validate_model<double>({{-1, 0.25}, {2, 0.25}}, 0.5);
    auto a = simulate(m, 15, 20000, 42, 1);
    auto b = simulate(m, 15, 20000, 42, 1);
    auto c = simulate(m, 15, 20000, 42, 4);
    EXPECT_EQ(a.altitude, b.altitude);
    EXPECT_EQ(a.height, c.height);
    EXPECT_EQ(a.altitude, c.altitude);
    EXPECT_EQ(a.resets, c.resets);
    auto d = simulate(m, 15, 20000, 43, 1);
    EXPECT_NE(a.altitude, d.altitude);
}

TEST(Simulate, MoranZeroWithinFiveSigma) {
    const int n = 20;
    const std::uint64_t reps = 1000000;
    auto exact = altitude_dist_dp(moran_model(R(1, 2)), n);
    const double p0 = to_double(exact.at(0));
    auto sim = simulate(moran_model(0.5), n, reps, 2024, 2);
    const double phat = static_cast<double>(sim.altitude[0]) / reps;
    EXPECT_LT(std::abs(phat - p0), 5 * std::sqrt(p0 * (1 - p0) / reps));
    EXPECT_NEAR(static_cast<double>(sim.resets) / reps, 0.5 * n, 0.05);
}

TEST(Simulate, ChiSquareAgainstDP) {
    auto mr = validate_model<R>({{-1, R(1, 4)}, {2, R(1, 4)}}, R(1, 2));
    const int n = 12;
    const std::uint64_t reps = 200000;
    auto sim = simulate(model_cast<double>(mr), n, reps, 7, 1);
    auto alt = altitude_dist_dp(mr, n);
    std::map<long long, double> pa;
    for (long long k = alt.lo(); k <= alt.hi(); ++k) pa[k] = to_double(alt.at(k));
    EXPECT_GT(chi_square_gof(sim.altitude, pa, reps).p_value, 1e-3);
    auto hd = height_dist_dp(mr, n, 2 * n);
    std::map<long long, double> ph;
    for (long long h = 0; h <= 2 * n; ++h) ph[h] = to_double(hd.heights.at(h));
    EXPECT_GT(chi_square_gof(sim.height, ph, reps).p_value, 1e-3);
}

TEST(Simulate, ChiSquareDetectsWrongLaw) {
    auto sim = simulate(moran_model(0.5), 10, 100000, 3, 1);
    auto wrong = altitude_dist_dp(moran_model(R(1, 3)), 10);
    std::map<long long, double> pw;
    for (long long k = wrong.lo(); k <= wrong.hi(); ++k) pw[k] = to_double(wrong.at(k));
    EXPECT_LT(chi_square_gof(sim.altitude, pw, 100000).p_value, 1e-6);
}
