#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dmrisk/random.hpp"

namespace dmrisk {

namespace detail {
struct QuantileCache;
struct HermiteTable;
}

// Parametric laws. Constructors validate the parameter domain.

struct InverseGaussian {
    double mu;
    double lambda;
    InverseGaussian(double mu, double lambda);
    // interpolation table for the quantile, built on first use and shared by copies
    std::shared_ptr<detail::QuantileCache> cache;
};

/// Generalized Pareto with shape xi and scale; support [0, inf) for xi >= 0
/// and [0, -scale/xi] for xi < 0.
struct Gpd {
    double xi;
    double scale;
    Gpd(double xi, double scale);
    double upper_endpoint() const;
};

struct Lognormal {
    double mu;
    double sigma;
    Lognormal(double mu, double sigma);
};

/// Number of failures before the r-th success with success probability p;
/// mean r(1-p)/p.
struct NegBinomial {
    double r;
    double p;
    NegBinomial(double r, double p);
    double mean() const { return r * (1.0 - p) / p; }
};

struct Normal {
    double mu;
    double sigma;
    Normal(double mu = 0.0, double sigma = 1.0);
};

struct StudentT {
    double nu;
    explicit StudentT(double nu);
};

struct GammaDist {
    double shape;
    double scale;
    GammaDist(double shape, double scale);
};

/// Positive stable law with Laplace transform exp(-s^alpha); frailty of the
/// Gumbel copula. Sampling only.
struct PositiveStable {
    double alpha;
    explicit PositiveStable(double alpha);
};

/// Logarithmic series law on {1, 2, ...}: P(k) = -theta^k / (k log(1 - theta)).
struct LogSeries {
    double theta;
    explicit LogSeries(double theta);
};

struct ChiSquare {
    double nu;
    explicit ChiSquare(double nu);
    std::shared_ptr<detail::QuantileCache> cache;
};

struct Uniform {
    double a;
    double b;
    Uniform(double a = 0.0, double b = 1.0);
};

/// Sorted sample with a linear-interpolation quantile (R type 7) and the
/// matching piecewise-linear CDF.
class QuantileTable {
public:
    QuantileTable() = default;
    explicit QuantileTable(std::vector<double> samples);

    double quantile(double u) const;
    double cdf(double x) const;
    double log_pdf(double x) const;

    bool empty() const { return sorted_.empty(); }
    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& values() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

/// Semi-parametric marginal: GPD below x_l, linearly interpolated empirical
/// distribution on [x_l, x_u], GPD above x_u.
class SplicedMarginal {
public:
    SplicedMarginal(double p_lower, double p_upper, double x_lower, double x_upper,
                    Gpd lower_tail, Gpd upper_tail, std::vector<double> central);

    double cdf(double x) const;
    double quantile(double u) const;
    double log_pdf(double x) const;

    double p_lower() const { return p_l_; }
    double p_upper() const { return p_u_; }
    double x_lower() const { return x_l_; }
    double x_upper() const { return x_u_; }
    const Gpd& lower_tail() const { return lower_; }
    const Gpd& upper_tail() const { return upper_; }
    // Interpolation knots, x_l first and x_u last.
    const std::vector<double>& knots() const { return knots_; }

private:
    double central_cdf(double x) const;

    double p_l_;
    double p_u_;
    double x_l_;
    double x_u_;
    Gpd lower_;
    Gpd upper_;
    std::vector<double> knots_;
};

/// Random sum of NegBinomial-many Lognormal severities. Quantiles come from
/// a stored Monte Carlo table.
class CompoundMarginal {
public:
    static constexpr std::size_t kDefaultTableSize = 10'000'000;

    CompoundMarginal(NegBinomial frequency, Lognormal severity,
                     std::size_t table_size = kDefaultTableSize, std::uint64_t seed = 0);

    const NegBinomial& frequency() const { return frequency_; }
    const Lognormal& severity() const { return severity_; }
    const QuantileTable& table() const { return table_; }
    std::uint64_t seed() const { return seed_; }

    double mean() const;
    double draw(Rng& rng) const;

private:
    NegBinomial frequency_;
    Lognormal severity_;
    std::uint64_t seed_;
    QuantileTable table_;
};

using Distribution =
    std::variant<InverseGaussian, Gpd, Lognormal, NegBinomial, Normal, StudentT, GammaDist,
                 PositiveStable, LogSeries, ChiSquare, Uniform, SplicedMarginal,
                 CompoundMarginal, QuantileTable>;

/// inf{x : F(x) >= u}; u must lie in (0, 1).
double quantile(const Distribution& dist, double u);
double cdf(const Distribution& dist, double x);
/// Log density (log mass for discrete laws); -inf outside the support.
double log_pdf(const Distribution& dist, double x);

double draw(const Distribution& dist, Rng& rng);
/// n i.i.d. draws, reproducible from seed irrespective of thread count.
std::vector<double> sample(const Distribution& dist, std::size_t n, std::uint64_t seed);

QuantileTable build_quantile_table(std::vector<double> samples);

std::string describe(const Distribution& dist);

// Scalar helpers shared by other modules.
double uniform01(Rng& rng);  // open interval (0, 1)
double standard_normal(Rng& rng);
double normal_cdf(double z);
double normal_quantile(double u);
double log_normal_cdf(double z);
double student_t_cdf(double x, double nu);
double student_t_quantile(double u, double nu);

/// Student t CDF at fixed nu, tabulated on first call. Copies share the table.
class StudentTCdf {
public:
    explicit StudentTCdf(double nu);
    double operator()(double x) const;
    double nu() const { return nu_; }

private:
    double nu_;
    double edge_ = 0.0;  // table covers asinh|x| < edge_
    std::shared_ptr<detail::HermiteTable> table_;
};

double chi_square_quantile(double u, double nu);
/// Interpolated through the cached table when present.
double chi_square_quantile(const ChiSquare& d, double u);
double gpd_cdf(const Gpd& g, double x);
double gpd_quantile(const Gpd& g, double u);
double gpd_log_pdf(const Gpd& g, double x);

}  // namespace dmrisk
