#include "herdsim/stats.hpp"

#include <gtest/gtest.h>

#include <vector>

namespace {

namespace stats = herdsim::stats;

TEST(Moments, MeanAndVariance) {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    EXPECT_DOUBLE_EQ(stats::mean(v), 2.5);
    EXPECT_DOUBLE_EQ(stats::sample_variance(v), 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(stats::standard_error(v), std::sqrt(5.0 / 12.0));
}

TEST(Moments, DegenerateInputs) {
    EXPECT_DOUBLE_EQ(stats::mean({}), 0.0);
    const std::vector<double> one{3.0};
    EXPECT_DOUBLE_EQ(stats::sample_variance(one), 0.0);
    EXPECT_TRUE(std::isinf(stats::standard_error(one)));
}

// Reference survival values computed with an independent implementation.
TEST(ChiSquare, SurvivalMatchesReference) {
    EXPECT_NEAR(stats::chi_square_sf(3.84, 1), 0.05004352124870519, 1e-12);
    EXPECT_NEAR(stats::chi_square_sf(0.5, 1), 0.47950012218695337, 1e-12);
    EXPECT_NEAR(stats::chi_square_sf(10.0, 4), 0.04042768199451279, 1e-12);
    EXPECT_NEAR(stats::chi_square_sf(25.0, 10), 0.005345505487134069, 1e-12);
    EXPECT_NEAR(stats::chi_square_sf(1e-3, 1), 0.9747728793699604, 1e-12);
    EXPECT_NEAR(stats::chi_square_sf(123.4, 100), 0.05625009243581586, 1e-11);
    EXPECT_NEAR(stats::chi_square_sf(5.0, 2), 0.0820849986238988, 1e-12);
    EXPECT_DOUBLE_EQ(stats::chi_square_sf(0.0, 3), 1.0);
}

TEST(ChiSquare, SurvivalIsMonotoneInStatistic) {
    double prev = 1.0;
    for (double s = 0.5; s < 40.0; s += 0.5) {
        const double p = stats::chi_square_sf(s, 5);
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(ChiSquare, RejectsZeroDof) {
    EXPECT_THROW(stats::chi_square_sf(1.0, 0), herdsim::ValidationError);
}

TEST(GammaQ, RejectsBadArguments) {
    EXPECT_THROW(stats::gamma_q(0.0, 1.0), herdsim::ValidationError);
    EXPECT_THROW(stats::gamma_q(1.0, -1.0), herdsim::ValidationError);
}

TEST(Wilson, MatchesReference) {
    EXPECT_NEAR(stats::wilson_halfwidth(0.3, 5000), 0.016684322345481492, 1e-15);
    EXPECT_NEAR(stats::wilson_halfwidth(0.5, 2000), 0.02875099662020251, 1e-15);
    EXPECT_NEAR(stats::wilson_halfwidth(0.0, 100), 0.031110343857911487, 1e-15);
    EXPECT_NEAR(stats::wilson_halfwidth(0.9, 2000), 0.017301224788318696, 1e-15);
}

TEST(Wilson, EmptySampleGivesFullWidth) {
    EXPECT_DOUBLE_EQ(stats::wilson_halfwidth(0.5, 0), 1.0);
}

TEST(Wilson, ShrinksWithSampleSize) {
    EXPECT_GT(stats::wilson_halfwidth(0.4, 100), stats::wilson_halfwidth(0.4, 10000));
}

TEST(ChiSquareGof, PerfectFitHasZeroStatistic) {
    const std::vector<double> o{100.0, 200.0, 300.0};
    const auto r = stats::chi_square_gof(o, o);
    EXPECT_DOUBLE_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.dof, 2u);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(ChiSquareGof, HandComputedStatistic) {
    const std::vector<double> obs{90.0, 110.0};
    const std::vector<double> exp{100.0, 100.0};
    const auto r = stats::chi_square_gof(obs, exp);
    EXPECT_DOUBLE_EQ(r.statistic, 2.0);
    EXPECT_EQ(r.dof, 1u);
    EXPECT_NEAR(r.p_value, 0.15729920705028105, 1e-12);
}

TEST(ChiSquareGof, PoolsSmallBins) {
    // bins with expected < 10 collapse into one pooled bin
    const std::vector<double> obs{50.0, 3.0, 4.0, 43.0};
    const std::vector<double> exp{48.0, 2.0, 5.0, 45.0};
    const auto r = stats::chi_square_gof(obs, exp);
    // pooled: {48: 50, 45: 43, 7: 7}
    EXPECT_EQ(r.bins_used, 3u);
    EXPECT_EQ(r.dof, 2u);
    const double want = 4.0 / 48.0 + 4.0 / 45.0 + 0.0;
    EXPECT_NEAR(r.statistic, want, 1e-12);
}

TEST(ChiSquareGof, AllBinsTinyStillYieldsOneDof) {
    const std::vector<double> obs{1.0, 2.0};
    const std::vector<double> exp{1.5, 1.5};
    const auto r = stats::chi_square_gof(obs, exp);
    EXPECT_EQ(r.bins_used, 1u);
    EXPECT_EQ(r.dof, 1u);
}

TEST(ChiSquareGof, RejectsMismatchedSizes) {
    const std::vector<double> a{1.0};
    const std::vector<double> b{1.0, 2.0};
    EXPECT_THROW(stats::chi_square_gof(a, b), herdsim::DimensionMismatchError);
    EXPECT_THROW(stats::chi_square_gof({}, {}), herdsim::DimensionMismatchError);
}

} // namespace
