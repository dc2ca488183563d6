#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dmrisk/copulas.hpp"
#include "dmrisk/distortion.hpp"
#include "dmrisk/distributions.hpp"

namespace dmrisk {

struct SumAggregation {};
struct ShiftedSumAggregation {
    double shift = 1.0;  // sum of (x_i + shift)
};
struct ExcessOfLossAggregation {
    std::vector<double> retention;  // sum of (x_i - k_i)^+
};
using Aggregation = std::variant<SumAggregation, ShiftedSumAggregation, ExcessOfLossAggregation>;

double aggregate(const Aggregation& agg, std::span<const double> x);
std::string describe(const Aggregation& agg);

/// K x m matrix whose column i holds the weights of the candidates for tail
/// component i+1. Columns lie on the probability simplex.
class GammaMatrix {
public:
    GammaMatrix() = default;
    explicit GammaMatrix(Eigen::MatrixXd values);
    static GammaMatrix uniform(int K, int m);
    /// All mass of every column on candidate j.
    static GammaMatrix vertex(int K, int m, int j);

    int K() const { return static_cast<int>(g_.rows()); }
    int m() const { return static_cast<int>(g_.cols()); }
    double operator()(int j, int i) const { return g_(j, i); }
    const Eigen::MatrixXd& values() const { return g_; }
    Eigen::VectorXd column(int i) const { return g_.col(i); }
    void set_column(int i, const Eigen::VectorXd& c);

    double l1_distance(const GammaMatrix& other) const;

private:
    Eigen::MatrixXd g_;
};

struct DMSpec {
    DistortionSet distortions;
    CopulaSpec central;
    std::vector<CopulaSpec> candidates;
    std::vector<std::string> candidate_names;
    std::vector<Distribution> marginals;
    Aggregation aggregation;

    int d() const { return static_cast<int>(marginals.size()); }
    int K() const { return static_cast<int>(candidates.size()); }
    int m() const { return distortions.m(); }
    /// Throws DomainError on dimension mismatches.
    void validate() const;
};

/// DM draws of X (n x d): region, then copula, then inverse distortion and
/// marginal quantile. Reproducible from seed.
SampleMatrix dm_sample(const DMSpec& spec, const GammaMatrix& gamma, std::size_t n,
                       std::uint64_t seed);
/// Aggregate losses Psi(X) for the same draws as dm_sample.
std::vector<double> dm_losses(const DMSpec& spec, const GammaMatrix& gamma, std::size_t n,
                              std::uint64_t seed);

/// N draws of Psi^0 (central component) and Psi^{ij} (tail component i,
/// candidate j).
struct ComponentSampleBank {
    std::size_t N = 0;
    std::uint64_t seed = 0;
    int m = 0;
    int K = 0;
    std::vector<double> central;
    std::vector<std::vector<double>> tails;  // index (i-1)*K + j, j 0-based; empty if skipped

    const std::vector<double>& tail(int i, int j) const;
    bool has(int i, int j) const;
};

/// Draws the component arrays. If candidates is non-empty only those
/// candidate columns are drawn; every array depends only on (seed, i, j),
/// so subsets reproduce the matching arrays of a full bank.
ComponentSampleBank component_losses(const DMSpec& spec, std::size_t N, std::uint64_t seed,
                                     const std::vector<int>& candidates = {});

/// Draws of Psi for one component: i = 0 is the central component.
std::vector<double> component_draws(const DMSpec& spec, int i, int j, std::size_t N,
                                    std::uint64_t seed);

/// alpha_0 G_0(s) + sum_ij alpha_i gamma_j^i G_ij(s) with empirical CDFs.
double mixture_cdf(const GammaMatrix& gamma, const ComponentSampleBank& bank,
                   std::span<const double> alpha, double s);

/// Binary persistence: little-endian float64 arrays in <prefix>.bin and a
/// JSON sidecar <prefix>.json (N, seed, m, K, spec hash, array layout).
void save_bank(const ComponentSampleBank& bank, const std::string& prefix,
               const std::string& spec_hash);
ComponentSampleBank load_bank(const std::string& prefix, std::string* spec_hash = nullptr);

}  // namespace dmrisk
