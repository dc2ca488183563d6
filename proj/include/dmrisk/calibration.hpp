#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmrisk/correlation.hpp"
#include "dmrisk/distributions.hpp"
#include "dmrisk/dm_model.hpp"

namespace dmrisk {

/// T x d observations with column labels and an optional date index.
struct PanelData {
    Eigen::MatrixXd values;
    std::vector<std::string> labels;
    std::vector<std::string> dates;

    int rows() const { return static_cast<int>(values.rows()); }
    int cols() const { return static_cast<int>(values.cols()); }
};

/// Reads a CSV panel: header row, optional leading date column, one numeric
/// column per series. Throws InputError with line and column on bad cells.
PanelData read_panel_csv(const std::string& path);

/// x_t = -Price_{t+horizon} / Price_t.
PanelData returns_transform(const PanelData& prices, int horizon = 10);

struct RowPartition {
    std::vector<int> extreme;
    std::vector<int> upper;
    std::vector<int> center;
};

/// Rows sorted by aggregate loss (descending, ties by row index): the top
/// floor(cut_extreme D) are extreme, ranks up to floor(cut_upper D) upper,
/// the rest center. Each set is returned in ascending row order.
RowPartition partition_by_aggregate(const Eigen::MatrixXd& x, const Aggregation& agg,
                                    double cut_extreme = 0.04, double cut_upper = 0.08);

struct GpdFit {
    double xi = 0.0;
    double scale = 0.0;
    double se_xi = 0.0;
    double se_scale = 0.0;
    double loglik = 0.0;
    std::size_t n = 0;
    bool at_boundary = false;  // xi pinned to an end of (-0.5, 1)
};

double gpd_loglik(std::span<const double> excess, double xi, double scale);

/// Maximum likelihood on positive excesses (at least 30). With fixed_xi the
/// scale alone is fitted.
GpdFit fit_gpd_mle(std::span<const double> excess, std::optional<double> fixed_xi = std::nullopt);

struct SplicedFit {
    SplicedMarginal marginal;
    GpdFit lower;
    GpdFit upper;
};

/// x_l = x_(floor(D p_l)), x_u = x_(ceil(D (1 - p_u))) with GPD tails fitted
/// to the excesses beyond them.
SplicedFit build_spliced(std::span<const double> column, double p_lower = 0.1, double p_upper = 0.1);

/// Pairwise Kendall tau of the columns.
Eigen::MatrixXd kendall_tau_matrix(const Eigen::MatrixXd& x);

/// sin(pi tau / 2) entrywise, repaired to a correlation matrix when not PSD.
CorrelationMatrix to_correlation(const Eigen::MatrixXd& tau, bool* repaired = nullptr);

/// Pseudo-observations rank/(n+1) per column.
Eigen::MatrixXd column_pseudo_observations(const Eigen::MatrixXd& x);

double t_copula_loglik(const Eigen::MatrixXd& U, const CorrelationMatrix& P, double nu);

struct NuFit {
    double nu = 0.0;
    double loglik = 0.0;
    double ci_lower = 0.0;  // profile-likelihood 95% interval
    double ci_upper = 0.0;
    bool at_boundary = false;
};

/// Profile ML of the t-copula degrees of freedom over [0.5, 200] with P fixed.
NuFit fit_t_nu_profile(const Eigen::MatrixXd& U, const CorrelationMatrix& P);

enum class GumbelMethod { MLE, CvM };

struct GumbelFit {
    double theta = 1.0;
    double objective = 0.0;  // log-likelihood or CvM distance
    bool at_boundary = false;
};

double gumbel_copula_log_density(std::span<const double> u, double theta);
double gumbel_copula_loglik(const Eigen::MatrixXd& U, double theta);

/// Exchangeable Gumbel fit over theta in [1, 50].
GumbelFit fit_gumbel(const Eigen::MatrixXd& U, GumbelMethod method);

struct FreqSevFit {
    NegBinomial frequency;
    Lognormal severity;
    double nb_loglik = 0.0;
    bool nb_at_boundary = false;
};

/// Negative binomial by maximum likelihood, lognormal from the mean and
/// unbiased variance of the log losses.
FreqSevFit fit_frequency_severity(std::span<const int> counts, std::span<const double> losses);

/// Replaces zero entries by Uniform(0, 1) draws from the given seed.
std::size_t replace_zeros_uniform(std::vector<double>& losses, std::uint64_t seed);

/// mu = mean, 1/lambda = mean(1/x - 1/mu).
InverseGaussian fit_inverse_gaussian(std::span<const double> x);

}  // namespace dmrisk
