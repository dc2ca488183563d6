#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmrisk/density.hpp"
#include "dmrisk/dm_model.hpp"

namespace dmrisk {

struct SAConfig {
    double p = 0.95;
    double a = 0.6;                      // step size t^{-a}
    std::size_t samples = 1'000'000;     // N_t
    int t_min = 10;
    int t_max = 50;
    double threshold = 0.01;             // on ||gamma_t - gamma_{t-1}||_1
    std::uint64_t seed = 0;
    std::size_t kde_points = 1000;
    std::size_t kde_samples = 1'000'000; // bank size used to fit g_0, g_ij
    double kde_bandwidth = 0.0;          // 0 selects Silverman

    void validate() const;
};

struct VarAvar {
    double var;
    double avar;
};

/// v = L_{ceil(Np):N}, c = v + sum (L - v)^+ / (N (1-p)).
VarAvar empirical_var_avar(std::span<const double> losses, double p);

/// Densities g_0 and g_ij of the component losses, fitted once.
struct ComponentDensities {
    int m = 0;
    int K = 0;
    DensityTable central;
    std::vector<DensityTable> tails;  // index (i-1)*K + j

    const DensityTable& tail(int i, int j) const;
    /// alpha_0 g_0(x) + sum alpha_i gamma_j^i g_ij(x).
    double mixture(const GammaMatrix& gamma, std::span<const double> alpha, double x) const;
};

ComponentDensities fit_component_densities(const ComponentSampleBank& bank, std::size_t G,
                                           double bandwidth = 0.0);

/// Likelihood-ratio gradient, m x K:
/// Delta_ij = 1/(N(1-p)) sum alpha_i g_ij(L)/f(L) (L - v)^+.
/// weights (optional) multiply each summand, as for importance sampling.
Eigen::MatrixXd lr_gradient(std::span<const double> losses, double v,
                            const ComponentDensities& dens, const GammaMatrix& gamma,
                            std::span<const double> alpha, double p,
                            std::span<const double> weights = {});

/// Euclidean projection onto the probability simplex (sort-based).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& y);

struct SAIteration {
    int t;
    GammaMatrix gamma;
    double var;
    double avar;
    Eigen::MatrixXd gradient;  // m x K
};

struct SATrace {
    std::vector<SAIteration> iterations;
    int t_star = 0;
    bool converged = false;  // stopped by the threshold rather than t_max

    const SAIteration& final() const { return iterations.back(); }
    /// Sample SD of the AV@R estimates over the last `window` iterations.
    double avar_sd(int window = 10) const;
};

/// Projected stochastic gradient ascent on gamma.
SATrace sa_solve(const DMSpec& spec, const SAConfig& cfg, const GammaMatrix& init,
                 const ComponentDensities& dens);

/// Copula selection by iterative row/column elimination of gamma (K x m).
/// Ties in gamma go to the larger gradient (gradient is m x K), then to the
/// larger row sum of gamma, then to the lower index. Returns 0-based indices
/// in order of selection.
std::vector<int> select_copulas(const GammaMatrix& gamma, const Eigen::MatrixXd& gradient, int k_star);

void write_trace_csv(const SATrace& trace, const std::string& path);

}  // namespace dmrisk
