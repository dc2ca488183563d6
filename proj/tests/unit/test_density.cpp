#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dmrisk/density.hpp"
#include "dmrisk/distributions.hpp"
#include "dmrisk/error.hpp"

using namespace dmrisk;

TEST(Kde, StandardNormal) {
    const auto x = sample(Normal(0.0, 1.0), 1'000'000, 1);
    const auto t = fit_kde(x, 1000);
    EXPECT_NEAR(eval_density(t, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 0.01);
    EXPECT_NEAR(t.integral(), 1.0, 0.02);
    EXPECT_EQ(t.size(), 1000u);
}

TEST(Kde, Uniform) {
    const auto x = sample(Uniform(0.0, 1.0), 1'000'000, 2);
    const auto t = fit_kde(x, 1000);
    EXPECT_NEAR(eval_density(t, 0.5), 1.0, 0.05);
}

TEST(Kde, RejectsDegenerateInput) {
    EXPECT_THROW(fit_kde(std::vector<double>(500, 2.0), 100), DomainError);
    EXPECT_THROW(fit_kde(std::vector<double>(10, 2.0), 100), DomainError);
}

TEST(EvalDensity, GridRule) {
    DensityTable t;
    t.lo = 1.0;
    t.step = 0.5;
    t.values = {0.1, 0.3, 0.7};
    EXPECT_EQ(eval_density(t, 1.5), 0.3);
    EXPECT_NEAR(eval_density(t, 1.25), 0.2, 1e-15);
    EXPECT_EQ(eval_density(t, 2.5), kDensityFloor);
    EXPECT_EQ(eval_density(t, 0.5), kDensityFloor);
    EXPECT_EQ(eval_density(t, 2.0), 0.7);
}

TEST(Kde, ValuesArePositive) {
    const auto x = sample(InverseGaussian(1.0, 0.5), 100'000, 3);
    const auto t = fit_kde(x, 500);
    for (double v : t.values) EXPECT_GE(v, kDensityFloor);
}
