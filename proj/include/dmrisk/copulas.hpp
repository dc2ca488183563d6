#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dmrisk/correlation.hpp"
#include "dmrisk/distributions.hpp"
#include "dmrisk/random.hpp"

namespace dmrisk {

using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GaussianCopula {
    CorrelationMatrix P;
    explicit GaussianCopula(CorrelationMatrix P);
};

struct StudentTCopula {
    double nu;
    CorrelationMatrix P;
    StudentTCdf cdf;
    StudentTCopula(double nu, CorrelationMatrix P);
};

/// t copula whose coordinates are split into groups with their own degrees
/// of freedom; all groups share one uniform driving the chi-square mixing.
struct GroupedTCopula {
    std::vector<int> group;  // group index (0-based) of each coordinate
    std::vector<double> nu;  // degrees of freedom per group
    CorrelationMatrix P;
    std::vector<ChiSquare> mixing;  // one per group
    std::vector<StudentTCdf> cdf;
    GroupedTCopula(std::vector<int> group, std::vector<double> nu, CorrelationMatrix P);
};

struct ClaytonCopula {
    double theta;
    int d;
    ClaytonCopula(double theta, int d);
};

struct GumbelCopula {
    double theta;
    int d;
    GumbelCopula(double theta, int d);
};

struct FrankCopula {
    double theta;
    int d;
    FrankCopula(double theta, int d);
};

struct IndependenceCopula {
    int d;
    explicit IndependenceCopula(int d);
};

/// Law of (Phi(Z_1 + s_1), ..., Phi(Z_d + s_d)) with Z ~ N(0, P). Not a
/// copula unless s = 0; used as an importance-sampling replacement of a
/// Gaussian copula.
struct ShiftedGaussianCopula {
    CorrelationMatrix P;
    Eigen::VectorXd shift;
    ShiftedGaussianCopula(CorrelationMatrix P, Eigen::VectorXd shift);
};

using CopulaSpec = std::variant<GaussianCopula, StudentTCopula, GroupedTCopula, ClaytonCopula,
                                GumbelCopula, FrankCopula, IndependenceCopula,
                                ShiftedGaussianCopula>;

int dimension(const CopulaSpec& spec);
std::string describe(const CopulaSpec& spec);

/// One draw written to out[0..d). Values lie in the open unit interval.
void copula_draw(const CopulaSpec& spec, Rng& rng, std::span<double> out);

/// n x d sample, reproducible from seed irrespective of thread count.
SampleMatrix copula_sample(const CopulaSpec& spec, std::size_t n, std::uint64_t seed);

/// Closed-form CDF of the Archimedean families and the independence copula.
double archimedean_cdf(const CopulaSpec& spec, std::span<const double> u);

}  // namespace dmrisk
