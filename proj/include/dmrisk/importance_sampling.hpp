#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dmrisk/dm_model.hpp"
#include "dmrisk/solver_sa.hpp"

namespace dmrisk {

/// Change of measure on the marginals (Esscher tilt of inverse Gaussian
/// margins) and on the central Gaussian copula (mean shift). Candidates are
/// left unchanged.
struct ISSpec {
    std::vector<double> tilt;  // w_i per margin; empty means no tilt
    Eigen::VectorXd shift;     // mean shift of C_0; empty means no shift
    bool tilt_marginals = true;
    bool shift_central = true;

    bool active() const;
};

/// IG(mu sqrt(lambda) / sqrt(lambda - 2 mu^2 w), lambda). Requires
/// w <= lambda / (2 mu^2) and returns the input unchanged for w = 0.
InverseGaussian esscher_ig(double mu, double lambda, double w);

/// The DM specification sampled under h.
DMSpec is_spec(const DMSpec& spec, const ISSpec& is);

struct ISSample {
    std::vector<double> losses;
    std::vector<double> log_ratio;  // log f(y)/h(y)
    double floor_fraction = 0.0;    // share of draws where h hit the density floor
};

/// n draws from the h-mixture for gamma with log likelihood ratios evaluated
/// from the f and h tables.
ISSample is_sample(const DMSpec& spec, const ISSpec& is, const GammaMatrix& gamma,
                   const ComponentDensities& f_dens, const ComponentDensities& h_dens,
                   std::size_t n, std::uint64_t seed);

struct ISEstimate {
    double var;
    double avar;
    Eigen::MatrixXd gradient;  // m x K
};

/// Weighted-ECDF VaR, AV@R and likelihood-ratio gradient.
ISEstimate is_var_avar_gradient(std::span<const double> losses, std::span<const double> log_ratio,
                                const ComponentDensities& f_dens, const GammaMatrix& gamma,
                                std::span<const double> alpha, double p);

/// Component densities of the h-mixture, from a bank drawn under is_spec.
ComponentDensities fit_is_densities(const DMSpec& spec, const ISSpec& is, std::size_t bank_size,
                                    std::size_t grid_points, std::uint64_t seed, double bandwidth = 0.0);

struct ISComparison {
    std::vector<double> crude;  // AV@R per replication
    std::vector<double> is;
    double crude_variance = 0.0;
    double is_variance = 0.0;
    double ratio = 0.0;           // crude / IS
    double max_floor_fraction = 0.0;
};

/// Paired replications: replication r uses the same seed for the crude and
/// the IS estimator.
ISComparison is_compare(const DMSpec& spec, const ISSpec& is, const GammaMatrix& gamma,
                        const ComponentDensities& f_dens, const ComponentDensities& h_dens, double p,
                        std::size_t n, int replications, std::uint64_t seed);

}  // namespace dmrisk
