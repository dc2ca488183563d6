#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmrisk/dm_model.hpp"

namespace dmrisk {

struct SAAConfig {
    double p = 0.95;
    double epsilon = 0.0;          // bisection tolerance on probabilities
    double h = 0.1;                // grid step
    int refinement_rounds = 0;
    double shrink = 0.5;           // neighborhood radius factor per round
    std::size_t samples = 10'000'000;
    std::size_t max_grid = 2'000'000;

    void validate() const;
};

/// Sorted component arrays with suffix sums, so that empirical CDFs and
/// tail expectations cost O(log N).
class PreparedBank {
public:
    explicit PreparedBank(const ComponentSampleBank& bank);

    int m() const { return m_; }
    int K() const { return K_; }
    std::size_t N() const { return N_; }
    bool has(int i, int j) const;

    /// Fraction of draws <= u (strict: < u) of component c.
    double cdf(int c, double u, bool strict = false) const;
    /// E(Psi - u)^+ of component c.
    double excess(int c, double u) const;
    double min_value() const { return min_; }
    double max_value() const { return max_; }

    static int central_index() { return 0; }
    int tail_index(int i, int j) const { return 1 + (i - 1) * K_ + j; }

private:
    int m_, K_;
    std::size_t N_;
    std::vector<std::vector<double>> sorted_;
    std::vector<std::vector<double>> suffix_;  // suffix_[c][k] = sum of sorted_[c][k..N)
    double min_, max_;
};

/// Mixture weights per prepared component: alpha_0 and alpha_i gamma_j^i.
std::vector<double> component_weights(const PreparedBank& bank, const GammaMatrix& gamma,
                                      const std::vector<double>& alpha);

/// Weighted empirical CDF p_N(u); strict selects P(Psi < u).
double pbar(const PreparedBank& bank, const std::vector<double>& weights, double u, bool strict = false);

/// Bisection for the sampled first-order condition p_N(u) = p.
double bisect_u(const PreparedBank& bank, const std::vector<double>& weights, double p, double epsilon);

/// u + sum_c w_c E(Psi_c - u)^+ / (1 - p).
double saa_avar(const PreparedBank& bank, const std::vector<double>& weights, double u, double p);

/// All points of the (K-1)-simplex with coordinates in {0, h, ..., 1}.
std::vector<Eigen::VectorXd> simplex_grid(int K, double h);

struct SAAGridPoint {
    GammaMatrix gamma;
    double u;
    double avar;
    int round;
};

struct SAAResult {
    GammaMatrix best;
    double best_u = 0.0;
    double best_avar = 0.0;
    std::vector<SAAGridPoint> table;
    std::vector<int> selected;
};

/// Grid search over gamma restricted to the selected candidates (0-based),
/// one simplex per tail component, followed by optional refinement rounds
/// around the incumbent with halved step.
SAAResult saa_search(const PreparedBank& bank, const std::vector<double>& alpha, double p,
                     const std::vector<int>& selected, const SAAConfig& cfg);

void write_grid_csv(const SAAResult& result, const std::string& path);

}  // namespace dmrisk
