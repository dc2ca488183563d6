#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dmrisk/copulas.hpp"
#include "dmrisk/error.hpp"
#include "dmrisk/stats.hpp"

using namespace dmrisk;

namespace {

std::vector<double> column(const SampleMatrix& u, int k) {
    std::vector<double> c(static_cast<std::size_t>(u.rows()));
    for (Eigen::Index r = 0; r < u.rows(); ++r) c[static_cast<std::size_t>(r)] = u(r, k);
    return c;
}

void expect_uniform_margins(const CopulaSpec& spec, std::size_t n, std::uint64_t seed, double level) {
    const auto u = copula_sample(spec, n, seed);
    for (int k = 0; k < u.cols(); ++k) {
        const auto c = column(u, k);
        for (double v : c) ASSERT_TRUE(v > 0.0 && v < 1.0);
        EXPECT_LT(ks_statistic(c, [](double v) { return v; }), ks_critical(n, level)) << describe(spec) << " margin " << k;
    }
}

}  // namespace

TEST(Copulas, ParameterDomains) {
    EXPECT_THROW(ClaytonCopula(0.0, 2), DomainError);
    EXPECT_THROW(GumbelCopula(0.99, 2), DomainError);
    EXPECT_THROW(FrankCopula(-0.1, 2), DomainError);
    EXPECT_THROW(StudentTCopula(-1.0, CorrelationMatrix::exchangeable(2, 0.5)), DomainError);
    EXPECT_THROW(GroupedTCopula({0, 2}, {3.0, 4.0}, CorrelationMatrix::identity(2)), DomainError);
}

TEST(Copulas, MarginsAreUniform) {
    const auto P = CorrelationMatrix::exchangeable(3, 0.6);
    const std::vector<CopulaSpec> specs{GaussianCopula(P),           StudentTCopula(1.0, P),
                                        StudentTCopula(4.5, P),      GroupedTCopula({0, 0, 1}, {2.5, 9.0}, P),
                                        ClaytonCopula(0.7565, 3),    GumbelCopula(1.7095, 3),
                                        FrankCopula(1.2, 3),         FrankCopula(0.0, 3),
                                        IndependenceCopula(3)};
    std::uint64_t seed = 100;
    // 1% overall, Bonferroni over all margins
    const double level = 0.01 / (3.0 * static_cast<double>(specs.size()));
    for (const auto& s : specs) expect_uniform_margins(s, 20'000, ++seed, level);
}

TEST(Copulas, GaussianIdentityHasZeroTau) {
    const auto u = copula_sample(GaussianCopula(CorrelationMatrix::identity(2)), 100'000, 1);
    EXPECT_NEAR(kendall_tau(column(u, 0), column(u, 1)), 0.0, 0.01);
}

TEST(Copulas, GaussianTauMatchesArcsine) {
    const auto u = copula_sample(GaussianCopula(CorrelationMatrix::exchangeable(2, 0.7)), 1'000'000, 2);
    EXPECT_NEAR(kendall_tau(column(u, 0), column(u, 1)), 2.0 / std::numbers::pi * std::asin(0.7), 0.003);
}

TEST(Copulas, ArchimedeanTaus) {
    // Clayton theta/(theta+2), Gumbel 1 - 1/theta
    const auto c = copula_sample(ClaytonCopula(2.0, 2), 200'000, 3);
    EXPECT_NEAR(kendall_tau(column(c, 0), column(c, 1)), 0.5, 0.005);
    const auto g = copula_sample(GumbelCopula(2.5, 2), 200'000, 4);
    EXPECT_NEAR(kendall_tau(column(g, 0), column(g, 1)), 0.6, 0.005);
}

TEST(Copulas, FrankTauMatchesDebye) {
    // tau = 1 - 4/theta (1 - D1(theta)), D1 by midpoint quadrature
    const double theta = 5.0;
    double d1 = 0.0;
    const int n = 200'000;
    for (int k = 0; k < n; ++k) {
        const double t = theta * (k + 0.5) / n;
        d1 += t / std::expm1(t);
    }
    d1 /= n;
    const double tau = 1.0 - 4.0 / theta * (1.0 - d1);
    const auto u = copula_sample(FrankCopula(theta, 2), 200'000, 5);
    EXPECT_NEAR(kendall_tau(column(u, 0), column(u, 1)), tau, 0.005);
}

TEST(Copulas, ClaytonLowerTailDependence) {
    const auto u = copula_sample(ClaytonCopula(1.0, 2), 1'000'000, 6);
    const double q = 0.001;
    int both = 0, first = 0;
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
        if (u(r, 0) <= q) {
            ++first;
            both += u(r, 1) <= q;
        }
    }
    EXPECT_NEAR(static_cast<double>(both) / first, 0.5, 0.05);
}

TEST(Copulas, ArchimedeanCdfExamples) {
    const std::vector<double> u{0.3, 0.5};
    EXPECT_NEAR(archimedean_cdf(IndependenceCopula(2), u), 0.15, 1e-15);
    const std::vector<double> w{0.2, 0.7, 0.45};
    EXPECT_NEAR(archimedean_cdf(GumbelCopula(1.0, 3), w), 0.2 * 0.7 * 0.45, 1e-14);
    const std::vector<double> h{0.5, 0.5};
    EXPECT_NEAR(archimedean_cdf(ClaytonCopula(2.0, 2), h), std::pow(7.0, -0.5), 1e-14);
    EXPECT_NEAR(archimedean_cdf(ClaytonCopula(2.0, 2), h), 0.377964, 1e-6);
}

TEST(Copulas, ArchimedeanCdfMatchesSampling) {
    const std::vector<double> at{0.4, 0.7};
    for (const CopulaSpec& s : {CopulaSpec(ClaytonCopula(0.7565, 2)), CopulaSpec(GumbelCopula(1.7095, 2)),
                                CopulaSpec(FrankCopula(1.2, 2))}) {
        const auto u = copula_sample(s, 200'000, 9);
        double hits = 0.0;
        for (Eigen::Index r = 0; r < u.rows(); ++r) hits += u(r, 0) <= at[0] && u(r, 1) <= at[1];
        const double c = archimedean_cdf(s, at);
        EXPECT_NEAR(hits / u.rows(), c, 4.0 * std::sqrt(c * (1 - c) / u.rows())) << describe(s);
    }
}

TEST(Copulas, SamplingIsDeterministic) {
    const CopulaSpec s = StudentTCopula(3.0, CorrelationMatrix::exchangeable(4, 0.3));
    EXPECT_EQ(copula_sample(s, 5000, 42), copula_sample(s, 5000, 42));
    EXPECT_NE(copula_sample(s, 5000, 42), copula_sample(s, 5000, 43));
}

TEST(Correlation, RepairAndValidation) {
    Eigen::MatrixXd bad(3, 3);
    bad << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
    EXPECT_LT(min_eigenvalue(bad), 0.0);
    EXPECT_THROW(CorrelationMatrix{bad}, DomainError);
    const Eigen::MatrixXd fixed = repair_psd(bad);
    EXPECT_GE(min_eigenvalue(fixed), -1e-10);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(fixed(k, k), 1.0, 1e-12);
    EXPECT_NO_THROW(CorrelationMatrix{fixed});
}
