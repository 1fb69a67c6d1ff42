#include <gtest/gtest.h>

#include <boost/math/special_functions/erf.hpp>
#include <cmath>

#include "catbbm/special_functions.hpp"

using namespace catbbm;

TEST(NormalQuantile, MatchesInverseErfc) {
    for (double p = 1e-300; p < 1.0; p = p < 1e-3 ? p * 7.0 : p + 1e-3) {
        const double expected = -kSqrt2 * boost::math::erfc_inv(2.0 * p);
        EXPECT_NEAR(normal_quantile(p), expected, 1e-12 * std::max(1.0, std::fabs(expected))) << p;
    }
}

TEST(NormalQuantile, InvertsCdf) {
    for (double x = -37.0; x <= 0.0; x += 0.37) {
        EXPECT_NEAR(normal_quantile(normal_cdf(x)), x, 1e-12 * (1 - x));
        EXPECT_NEAR(-normal_quantile(normal_sf(-x)), -x, 1e-12 * (1 - x));
    }
}

TEST(NormalQuantile, EndpointsAndOutOfRange) {
    EXPECT_EQ(normal_quantile(0.0), -INFINITY);
    EXPECT_EQ(normal_quantile(1.0), INFINITY);
    EXPECT_TRUE(std::isnan(normal_quantile(-0.1)));
    EXPECT_TRUE(std::isnan(normal_quantile(1.5)));
    EXPECT_TRUE(std::isnan(normal_quantile(std::nan(""))));
}

TEST(NormalCdf, KnownValuesAndSymmetry) {
    EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    for (double x = 0.0; x < 30.0; x += 0.5) EXPECT_DOUBLE_EQ(normal_sf(x), normal_cdf(-x));
    EXPECT_GT(normal_sf(37.0), 0.0);
}

TEST(ScaledNormalSf, ContinuousAndAsymptotic) {
    for (double x = 0.0; x < 8.0; x += 0.25)
        EXPECT_NEAR(scaled_normal_sf(x), std::exp(x * x / 2) * normal_sf(x), 1e-13 * scaled_normal_sf(x));
    EXPECT_NEAR(scaled_normal_sf(8.0 - 1e-12), scaled_normal_sf(8.0), 1e-13);
    // Mills ratio: e^{x^2/2} Phi^c(x) ~ (1/x - 1/x^3) / sqrt(2 pi)
    for (double x : {50.0, 1e3, 1e8}) {
        const double mills = (1.0 / x - 1.0 / (x * x * x) + 3.0 / std::pow(x, 5)) * kInvSqrt2Pi;
        EXPECT_NEAR(scaled_normal_sf(x) / mills, 1.0, 1e-8);
    }
}
