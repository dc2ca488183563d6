#include <gtest/gtest.h>

#include <cmath>

#include "dmrisk/dm_model.hpp"
#include "dmrisk/error.hpp"
#include "dmrisk/stats.hpp"

using namespace dmrisk;

namespace {

DMSpec example1(const DistortionSet& dist = DistortionSet::smooth(0.1)) {
    const auto P = CorrelationMatrix::exchangeable(2, 0.7);
    DMSpec s{dist,
             GaussianCopula(P),
             {StudentTCopula(1.0, P), ClaytonCopula(0.7565, 2), GumbelCopula(1.7095, 2), FrankCopula(1.2, 2),
              IndependenceCopula(2)},
             {"C1", "C2", "C3", "C4", "C5"},
             {InverseGaussian(1.0, 0.5), InverseGaussian(1.0, 1.2)},
             SumAggregation{}};
    return s;
}

std::vector<double> col(const SampleMatrix& x, int k) {
    std::vector<double> c(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) c[static_cast<std::size_t>(r)] = x(r, k);
    return c;
}

}  // namespace

TEST(Distortion, IdentityConstraintBothFamilies) {
    EXPECT_LE(DistortionSet::smooth(0.1).identity_error(10'000), 1e-12);
    EXPECT_LE(DistortionSet::smooth(0.3).identity_error(10'000), 1e-12);
    EXPECT_LE(DistortionSet::region({0.92, 0.04, 0.04}).identity_error(10'000), 1e-12);
    EXPECT_LE(DistortionSet::region({0.5, 0.2, 0.3}).identity_error(10'000), 1e-12);
}

TEST(Distortion, Examples) {
    const auto s = DistortionSet::smooth(0.1);
    EXPECT_DOUBLE_EQ(s.eval(1, 1.0), 1.0);
    EXPECT_NEAR(s.eval(1, 0.5), (0.5 - 0.1 * 0.25) / (0.1 + 0.8 * 0.5), 1e-15);
    EXPECT_NEAR(s.eval(1, 0.5), 0.95, 1e-15);
    const auto r = DistortionSet::region({0.92, 0.04, 0.04});
    EXPECT_NEAR(r.eval(2, 0.98), 0.5, 1e-12);
}

TEST(Distortion, MonotoneWithFixedEnds) {
    for (const auto& s : {DistortionSet::smooth(0.1), DistortionSet::region({0.92, 0.04, 0.04})}) {
        for (int i = 0; i <= s.m(); ++i) {
            EXPECT_EQ(s.eval(i, 0.0), 0.0);
            EXPECT_EQ(s.eval(i, 1.0), 1.0);
            double prev = 0.0;
            for (int k = 0; k <= 1000; ++k) {
                const double v = s.eval(i, k / 1000.0);
                EXPECT_GE(v, prev);
                prev = v;
            }
            for (double y : {0.1, 0.5, 0.9}) {
                if (s.family() == DistortionSet::Family::Region) continue;
                EXPECT_NEAR(s.eval(i, s.inverse(i, y)), y, 1e-11);
            }
        }
    }
    const auto r = DistortionSet::region({0.92, 0.04, 0.04});
    double sum = 0.0;
    for (double w : r.weights()) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Aggregate, Examples) {
    const std::vector<double> a{1.0, 2.0};
    EXPECT_EQ(aggregate(SumAggregation{}, a), 3.0);
    const std::vector<double> b{0.5, 3.0};
    EXPECT_EQ(aggregate(ExcessOfLossAggregation{{1.0, 1.0}}, b), 2.0);
    const std::vector<double> c(7, -1.0);
    EXPECT_EQ(aggregate(ShiftedSumAggregation{1.0}, c), 0.0);
}

TEST(GammaMatrixTest, ColumnsMustLieOnSimplex) {
    Eigen::MatrixXd g(2, 1);
    g << 0.7, 0.4;
    EXPECT_THROW(GammaMatrix{g}, DomainError);
    const auto u = GammaMatrix::uniform(5, 2);
    EXPECT_NEAR(u(3, 1), 0.2, 1e-15);
    const auto v = GammaMatrix::vertex(3, 2, 1);
    EXPECT_EQ(v(1, 0), 1.0);
    EXPECT_EQ(v(0, 1), 0.0);
}

TEST(DmSample, DegenerateMixtureKeepsMargins) {
    // alpha_0 = 1: the tail slot is never drawn
    const auto s = example1(DistortionSet::identity({1.0, 0.0}));
    const auto x = dm_sample(s, GammaMatrix::uniform(5, 1), 20'000, 3);
    for (int k = 0; k < 2; ++k) {
        const auto c = col(x, k);
        const auto& m = s.marginals[static_cast<std::size_t>(k)];
        EXPECT_LT(ks_statistic(c, [&](double v) { return cdf(m, v); }), ks_critical(c.size()));
    }
}

TEST(DmSample, IdenticalCandidatesCollapseToCentral) {
    auto s = example1(DistortionSet::identity({0.5, 0.3, 0.2}));
    for (auto& c : s.candidates) c = s.central;
    Eigen::MatrixXd g(5, 2);
    g << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0;
    const auto a = dm_losses(s, GammaMatrix(g), 20'000, 5);
    const auto b = dm_losses(s, GammaMatrix::uniform(5, 2), 20'000, 6);
    EXPECT_LT(ks_two_sample(a, b), ks_critical_two_sample(a.size(), b.size()));
}

TEST(DmSample, Example1MarginMeans) {
    const auto s = example1();
    const std::size_t n = 400'000;
    const auto x = dm_sample(s, GammaMatrix::uniform(5, 2), n, 9);
    for (int k = 0; k < 2; ++k) {
        const double lambda = k == 0 ? 0.5 : 1.2;
        EXPECT_NEAR(mean(col(x, k)), 1.0, 3.0 * std::sqrt(1.0 / lambda / n));
    }
}

TEST(DmSample, Deterministic) {
    const auto s = example1();
    EXPECT_EQ(dm_losses(s, GammaMatrix::uniform(5, 2), 50'000, 1), dm_losses(s, GammaMatrix::uniform(5, 2), 50'000, 1));
}

TEST(ComponentBank, DegenerateMarginals) {
    DMSpec s{DistortionSet::smooth(0.1),
             GaussianCopula(CorrelationMatrix::identity(2)),
             {IndependenceCopula(2)},
             {"C1"},
             {build_quantile_table({1.0}), build_quantile_table({1.0})},
             SumAggregation{}};
    const auto bank = component_losses(s, 1000, 3);
    for (int i = 1; i <= 2; ++i) {
        for (double v : bank.tail(i, 0)) EXPECT_EQ(v, 2.0);
    }
}

TEST(ComponentBank, MixtureMatchesDmSample) {
    const auto s = example1();
    Eigen::MatrixXd g(5, 2);
    g << 0.1, 0.5, 0.2, 0.0, 0.3, 0.4, 0.2, 0.0, 0.2, 0.1;
    const GammaMatrix gamma(g);
    const std::size_t n = 200'000;
    const auto bank = component_losses(s, n, 17);
    const auto losses = dm_losses(s, gamma, n, 18);
    const auto& alpha = s.distortions.weights();
    // DKW band for both empirical CDFs at 99%
    const double band = 2.0 * std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
    std::vector<double> sorted = losses;
    std::sort(sorted.begin(), sorted.end());
    for (double q : {0.05, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99}) {
        const double x = sorted[static_cast<std::size_t>(q * n)];
        const double emp = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) / n;
        EXPECT_NEAR(mixture_cdf(gamma, bank, alpha, x), emp, band) << q;
    }
}

TEST(ComponentBank, CentralMeanMatchesDirectSimulation) {
    const auto s = example1();
    const std::size_t n = 200'000;
    const auto bank = component_losses(s, n, 21, {0});
    // Psi^0 draws X from C0 pushed through D_0^{-1}: simulate that directly
    const auto u = copula_sample(s.central, n, 99);
    std::vector<double> direct(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double x0 = quantile(s.marginals[0], s.distortions.inverse(0, u(static_cast<Eigen::Index>(r), 0)));
        const double x1 = quantile(s.marginals[1], s.distortions.inverse(0, u(static_cast<Eigen::Index>(r), 1)));
        direct[r] = x0 + x1;
    }
    const double se = std::sqrt(variance(bank.central) / n + variance(direct) / n);
    EXPECT_NEAR(mean(bank.central), mean(direct), 3.0 * se);
}

TEST(MixtureCdf, LimitsAndConvexity) {
    const auto s = example1();
    const auto bank = component_losses(s, 5000, 4);
    const auto gamma = GammaMatrix::uniform(5, 2);
    const auto& alpha = s.distortions.weights();
    EXPECT_NEAR(mixture_cdf(gamma, bank, alpha, 1e300), 1.0, 1e-15);
    EXPECT_EQ(mixture_cdf(gamma, bank, alpha, -1e300), 0.0);
    auto ecdf = [](const std::vector<double>& v, double x) {
        return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double y) { return y <= x; })) / v.size();
    };
    for (double x : {0.5, 1.5, 2.0, 4.0, 9.0}) {
        double lo = ecdf(bank.central, x), hi = lo;
        for (const auto& t : bank.tails) {
            lo = std::min(lo, ecdf(t, x));
            hi = std::max(hi, ecdf(t, x));
        }
        const double f = mixture_cdf(gamma, bank, alpha, x);
        EXPECT_GE(f, lo - 1e-15);
        EXPECT_LE(f, hi + 1e-15);
        const auto v = GammaMatrix::vertex(5, 2, 2);
        const double expect = alpha[0] * ecdf(bank.central, x) + alpha[1] * ecdf(bank.tail(1, 2), x) +
                              alpha[2] * ecdf(bank.tail(2, 2), x);
        EXPECT_NEAR(mixture_cdf(v, bank, alpha, x), expect, 1e-14);
    }
}

TEST(ComponentBank, SaveLoadRoundTrip) {
    const auto s = example1();
    const auto bank = component_losses(s, 1000, 4, {1, 3});
    const std::string prefix = ::testing::TempDir() + "bank_roundtrip";
    save_bank(bank, prefix, "abc");
    std::string hash;
    const auto back = load_bank(prefix, &hash);
    EXPECT_EQ(hash, "abc");
    EXPECT_EQ(back.central, bank.central);
    EXPECT_EQ(back.tail(2, 3), bank.tail(2, 3));
    EXPECT_FALSE(back.has(1, 0));
    EXPECT_THROW(back.tail(1, 0), StateError);
}
