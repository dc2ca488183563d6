#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "dmrisk/distributions.hpp"
#include "dmrisk/error.hpp"
#include "dmrisk/stats.hpp"

using namespace dmrisk;

TEST(Distributions, ConstructorsRejectBadParameters) {
    EXPECT_THROW(InverseGaussian(0.0, 1.0), DomainError);
    EXPECT_THROW(InverseGaussian(1.0, -1.0), DomainError);
    EXPECT_THROW(Gpd(0.1, 0.0), DomainError);
    EXPECT_THROW(Lognormal(0.0, 0.0), DomainError);
    EXPECT_THROW(NegBinomial(1.0, 1.5), DomainError);
    EXPECT_THROW(Uniform(1.0, 1.0), DomainError);
    EXPECT_THROW(StudentT(0.0), DomainError);
}

TEST(Distributions, QuantileExamples) {
    EXPECT_NEAR(quantile(Normal(0, 1), 0.5), 0.0, 1e-15);
    EXPECT_NEAR(quantile(Gpd(0.0, 1.0), 1.0 - std::exp(-2.0)), 2.0, 1e-12);
    EXPECT_THROW(quantile(Normal(0, 1), 1.5), DomainError);
}

TEST(Distributions, CdfExamples) {
    EXPECT_NEAR(cdf(Gpd(0.5, 1.0), 2.0), 0.75, 1e-15);
    EXPECT_EQ(cdf(Gpd(0.0, 1.0), 0.0), 0.0);
    // negative shape: bounded support
    const Gpd g(-0.5, 1.0);
    EXPECT_DOUBLE_EQ(g.upper_endpoint(), 2.0);
    EXPECT_EQ(cdf(g, 2.5), 1.0);
}

TEST(Distributions, LogPdfExamples) {
    EXPECT_NEAR(log_pdf(InverseGaussian(1.0, 0.5), 1.0), std::log(std::sqrt(0.5 / (2.0 * std::numbers::pi))), 1e-14);
    EXPECT_NEAR(log_pdf(Normal(0, 1), 0.0), -0.5 * std::log(2.0 * std::numbers::pi), 1e-14);
    EXPECT_NEAR(log_pdf(Gpd(0.0, 1.0), 1.0), -1.0, 1e-14);
}

TEST(Distributions, QuantileInvertsCdf) {
    const std::vector<Distribution> ds{InverseGaussian(1.0, 0.5), InverseGaussian(2.0, 7.0), Gpd(0.3, 2.0),
                                       Lognormal(1.0, 0.7), Normal(2.0, 3.0), StudentT(3.5), GammaDist(2.5, 1.5),
                                       ChiSquare(4.2), Uniform(-1.0, 3.0)};
    for (const auto& d : ds) {
        for (double u : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-6}) {
            EXPECT_NEAR(cdf(d, quantile(d, u)), u, 1e-10 * std::max(1.0, 1.0 / (1.0 - u)) * u) << describe(d);
        }
    }
}

TEST(Distributions, InverseGaussianTableMatchesExactQuantile) {
    for (auto [mu, lambda] : {std::pair{1.0, 0.5}, {1.0, 1.2}, {3.0, 0.2}, {0.01, 50.0}}) {
        const Distribution cached = InverseGaussian(mu, lambda);
        InverseGaussian plain(mu, lambda);
        plain.cache.reset();
        const Distribution exact = plain;
        for (int k = 1; k < 4000; ++k) {
            const double u = k / 4000.0;
            const double a = quantile(cached, u), b = quantile(exact, u);
            EXPECT_NEAR(a, b, 1e-12 * b) << mu << " " << lambda << " " << u;
        }
        for (double u : {1e-12, 1e-9, 1.0 - 1e-9, 1.0 - 1e-12}) {
            EXPECT_NEAR(quantile(cached, u), quantile(exact, u), 1e-12 * quantile(exact, u));
        }
    }
}

TEST(Distributions, ChiSquareTableMatchesBoost) {
    for (double nu : {0.5, 1.0, 3.6372, 27.5747, 200.0}) {
        const ChiSquare c(nu);
        const boost::math::chi_squared ref(nu);
        for (int k = 1; k < 4000; ++k) {
            const double u = k / 4000.0;
            const double b = boost::math::quantile(ref, u);
            EXPECT_NEAR(chi_square_quantile(c, u), b, 1e-10 * b) << nu << " " << u;
        }
    }
}

TEST(Distributions, StudentTCdfTableMatchesDirect) {
    for (double nu : {0.3, 1.5, 3.6372, 4.2, 11.9, 27.5747, 200.0}) {
        const StudentTCdf F(nu);
        for (int k = -2000; k <= 2000; ++k) {
            const double x = 1e-5 * k * std::abs(k);
            const double ref = student_t_cdf(x, nu);
            EXPECT_NEAR(F(x), ref, 1e-11) << nu << " " << x;
            EXPECT_NEAR(F(x), ref, 1e-8 * std::min(ref, 1.0 - ref)) << nu << " " << x;
        }
    }
}

TEST(Distributions, InverseGaussianSampleMean) {
    const std::size_t n = 1'000'000;
    const auto x = sample(InverseGaussian(1.0, 0.5), n, 7);
    EXPECT_NEAR(mean(x), 1.0, 3.0 * std::sqrt(1.0 / 0.5 / n));
}

TEST(Distributions, UniformSampleKs) {
    const auto x = sample(Uniform(0.0, 1.0), 10'000, 11);
    EXPECT_LT(ks_statistic(x, [](double v) { return v; }), ks_critical(x.size()));
}

TEST(Distributions, CompoundSampleMean) {
    // type 1 of the cyber fixture with sigma read as a variance, in millions
    const double r = 2.8684, p = 0.1209, mu = 9.8543 - std::log(1e6), s2 = 2.4364;
    const CompoundMarginal c(NegBinomial(r, p), Lognormal(mu, std::sqrt(s2)), 200'000, 5);
    const double expected = r * (1.0 - p) / p * std::exp(mu + 0.5 * s2);
    EXPECT_NEAR(c.mean(), expected, 1e-12 * expected);
    Rng rng = make_rng(3, 4);
    std::vector<double> x(400'000);
    for (double& v : x) v = c.draw(rng);
    const double se = std::sqrt(variance(x) / static_cast<double>(x.size()));
    EXPECT_NEAR(mean(x), expected, 3.0 * se);
}

TEST(QuantileTableTest, Examples) {
    EXPECT_EQ(build_quantile_table({3.0, 1.0, 2.0}).quantile(0.5), 2.0);
    const auto single = build_quantile_table({4.5});
    for (double u : {0.01, 0.5, 0.99}) EXPECT_EQ(single.quantile(u), 4.5);
    const auto t = build_quantile_table(sample(Uniform(0.0, 1.0), 1'000'000, 13));
    EXPECT_NEAR(t.quantile(0.95), 0.95, 0.002);
}

namespace {
SplicedMarginal toy_spliced() {
    std::vector<double> central;
    for (int k = 0; k <= 200; ++k) central.push_back(-1.0 + 2.0 * k / 200.0);
    return SplicedMarginal(0.1, 0.1, -1.0, 1.0, Gpd(0.2, 0.3), Gpd(0.25, 0.4), central);
}
}  // namespace

TEST(Spliced, BoundariesAndContinuity) {
    const auto s = toy_spliced();
    EXPECT_DOUBLE_EQ(s.quantile(0.1), -1.0);
    EXPECT_NEAR(s.cdf(-1.0), 0.1, 1e-15);
    EXPECT_NEAR(s.cdf(1.0), 0.9, 1e-15);
    EXPECT_NEAR(s.cdf(1.0 - 1e-12), 0.9, 1e-9);
    EXPECT_NEAR(s.cdf(1.0 + 1e-12), 0.9, 1e-9);
    EXPECT_NEAR(s.cdf(-1.0 - 1e-12), 0.1, 1e-9);
    double prev = 0.0;
    for (double x = -6.0; x <= 6.0; x += 0.01) {
        const double c = s.cdf(x);
        EXPECT_GE(c, prev);
        prev = c;
    }
    EXPECT_LT(s.cdf(-1e6), 1e-6);
    EXPECT_GT(s.cdf(1e6), 1.0 - 1e-6);
    for (double u : {0.01, 0.05, 0.1, 0.3, 0.9, 0.95, 0.999}) EXPECT_NEAR(s.cdf(s.quantile(u)), u, 1e-12);
}

TEST(Spliced, RejectsInconsistentInputs) {
    EXPECT_THROW(SplicedMarginal(0.6, 0.5, -1.0, 1.0, Gpd(0.1, 1.0), Gpd(0.1, 1.0), {-1.0, 1.0}), DomainError);
    EXPECT_THROW(SplicedMarginal(0.1, 0.1, 1.0, -1.0, Gpd(0.1, 1.0), Gpd(0.1, 1.0), {-1.0, 1.0}), DomainError);
    EXPECT_THROW(SplicedMarginal(0.1, 0.1, -1.0, 1.0, Gpd(0.1, 1.0), Gpd(0.1, 1.0), {-2.0, 1.0}), DomainError);
}
