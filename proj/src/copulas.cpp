#include "dmrisk/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dmrisk/distributions.hpp"
#include "dmrisk/error.hpp"

namespace dmrisk {

namespace {

constexpr double kUnitLow = 0x1.0p-60;
constexpr double kUnitHigh = 1.0 - 0x1.0p-53;

double clamp_unit(double u) { return std::clamp(u, kUnitLow, kUnitHigh); }

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void correlated_normals(const CorrelationMatrix& P, Rng& rng, std::span<double> out) {
    const int d = P.dim();
    double eps[64];
    for (int k = 0; k < d; ++k) eps[k] = standard_normal(rng);
    const Eigen::MatrixXd& L = P.cholesky();
    for (int r = 0; r < d; ++r) {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += L(r, c) * eps[c];
        out[r] = s;
    }
}

double exp1(Rng& rng) { return -std::log(uniform01(rng)); }

}  // namespace

GaussianCopula::GaussianCopula(CorrelationMatrix P_) : P(std::move(P_)) {
    require(P.dim() >= 2 && P.dim() <= 64, "Gaussian copula dimension must lie in [2, 64]");
}

StudentTCopula::StudentTCopula(double nu_, CorrelationMatrix P_) : nu(nu_), P(std::move(P_)), cdf(nu_) {
    require(nu > 0.0, "t copula requires nu > 0");
    require(P.dim() >= 2 && P.dim() <= 64, "t copula dimension must lie in [2, 64]");
}

GroupedTCopula::GroupedTCopula(std::vector<int> group_, std::vector<double> nu_, CorrelationMatrix P_)
    : group(std::move(group_)), nu(std::move(nu_)), P(std::move(P_)) {
    require(P.dim() >= 2 && P.dim() <= 64, "grouped t copula dimension must lie in [2, 64]");
    require(static_cast<int>(group.size()) == P.dim(), "grouped t: group vector length must equal d");
    require(!nu.empty(), "grouped t: at least one group");
    for (double v : nu) require(v > 0.0, "grouped t: degrees of freedom must be positive");
    for (int g : group) {
        require(g >= 0 && g < static_cast<int>(nu.size()), "grouped t: group index out of range");
    }
    for (double v : nu) {
        mixing.emplace_back(v);
        cdf.emplace_back(v);
    }
}

ClaytonCopula::ClaytonCopula(double theta_, int d_) : theta(theta_), d(d_) {
    require(theta > 0.0 && std::isfinite(theta), "Clayton copula requires 0 < theta < inf");
    require(d >= 2, "copula dimension must be at least 2");
}

GumbelCopula::GumbelCopula(double theta_, int d_) : theta(theta_), d(d_) {
    require(theta >= 1.0 && std::isfinite(theta), "Gumbel copula requires 1 <= theta < inf");
    require(d >= 2, "copula dimension must be at least 2");
}

FrankCopula::FrankCopula(double theta_, int d_) : theta(theta_), d(d_) {
    require(theta >= 0.0 && std::isfinite(theta), "Frank copula requires theta >= 0");
    require(d >= 2, "copula dimension must be at least 2");
}

IndependenceCopula::IndependenceCopula(int d_) : d(d_) {
    require(d >= 2, "copula dimension must be at least 2");
}

ShiftedGaussianCopula::ShiftedGaussianCopula(CorrelationMatrix P_, Eigen::VectorXd shift_)
    : P(std::move(P_)), shift(std::move(shift_)) {
    require(P.dim() >= 2 && P.dim() <= 64, "shifted Gaussian dimension must lie in [2, 64]");
    require(shift.size() == P.dim(), "shift vector length must equal d");
}

int dimension(const CopulaSpec& spec) {
    return std::visit(Overloaded{
                          [](const GaussianCopula& c) { return c.P.dim(); },
                          [](const StudentTCopula& c) { return c.P.dim(); },
                          [](const GroupedTCopula& c) { return c.P.dim(); },
                          [](const ClaytonCopula& c) { return c.d; },
                          [](const GumbelCopula& c) { return c.d; },
                          [](const FrankCopula& c) { return c.d; },
                          [](const IndependenceCopula& c) { return c.d; },
                          [](const ShiftedGaussianCopula& c) { return c.P.dim(); },
                      },
                      spec);
}

std::string describe(const CopulaSpec& spec) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const GaussianCopula& c) { os << "Gaussian(d=" << c.P.dim() << ")"; },
                   [&](const StudentTCopula& c) { os << "t(nu=" << c.nu << ", d=" << c.P.dim() << ")"; },
                   [&](const GroupedTCopula& c) {
                       os << "GroupedT(nu=";
                       for (std::size_t g = 0; g < c.nu.size(); ++g) os << (g ? "/" : "") << c.nu[g];
                       os << ", d=" << c.P.dim() << ")";
                   },
                   [&](const ClaytonCopula& c) { os << "Clayton(" << c.theta << ")"; },
                   [&](const GumbelCopula& c) { os << "Gumbel(" << c.theta << ")"; },
                   [&](const FrankCopula& c) { os << "Frank(" << c.theta << ")"; },
                   [&](const IndependenceCopula& c) { os << "Independence(d=" << c.d << ")"; },
                   [&](const ShiftedGaussianCopula& c) { os << "ShiftedGaussian(d=" << c.P.dim() << ")"; },
               },
               spec);
    return os.str();
}

void copula_draw(const CopulaSpec& spec, Rng& rng, std::span<double> out) {
    std::visit(
        Overloaded{
            [&](const GaussianCopula& c) {
                correlated_normals(c.P, rng, out);
                for (int k = 0; k < c.P.dim(); ++k) out[k] = clamp_unit(normal_cdf(out[k]));
            },
            [&](const StudentTCopula& c) {
                correlated_normals(c.P, rng, out);
                std::chi_squared_distribution<double> chi(c.nu);
                const double w = std::sqrt(c.nu / chi(rng));
                for (int k = 0; k < c.P.dim(); ++k) out[k] = clamp_unit(c.cdf(out[k] * w));
            },
            [&](const GroupedTCopula& c) {
                correlated_normals(c.P, rng, out);
                const double u = uniform01(rng);
                double w[64];
                for (std::size_t g = 0; g < c.nu.size(); ++g) {
                    w[g] = std::sqrt(c.nu[g] / chi_square_quantile(c.mixing[g], u));
                }
                for (int k = 0; k < c.P.dim(); ++k) {
                    const int g = c.group[k];
                    out[k] = clamp_unit(c.cdf[g](out[k] * w[g]));
                }
            },
            [&](const ClaytonCopula& c) {
                std::gamma_distribution<double> gamma(1.0 / c.theta, 1.0);
                const double v = gamma(rng);
                for (int k = 0; k < c.d; ++k) {
                    // (1 + E/V)^(-1/theta) evaluated in log space
                    out[k] = clamp_unit(std::exp(-std::log1p(exp1(rng) / v) / c.theta));
                }
            },
            [&](const GumbelCopula& c) {
                const double alpha = 1.0 / c.theta;
                const double v = draw(Distribution{PositiveStable(alpha)}, rng);
                for (int k = 0; k < c.d; ++k) {
                    out[k] = clamp_unit(std::exp(-std::pow(exp1(rng) / v, alpha)));
                }
            },
            [&](const FrankCopula& c) {
                if (c.theta < 1e-10) {
                    for (int k = 0; k < c.d; ++k) out[k] = uniform01(rng);
                    return;
                }
                const double q = -std::expm1(-c.theta);  // 1 - e^{-theta}
                const double v = draw(Distribution{LogSeries(q)}, rng);
                for (int k = 0; k < c.d; ++k) {
                    const double t = std::exp(-exp1(rng) / v);
                    out[k] = clamp_unit(-std::log1p(-q * t) / c.theta);
                }
            },
            [&](const IndependenceCopula& c) {
                for (int k = 0; k < c.d; ++k) out[k] = uniform01(rng);
            },
            [&](const ShiftedGaussianCopula& c) {
                correlated_normals(c.P, rng, out);
                for (int k = 0; k < c.P.dim(); ++k) out[k] = clamp_unit(normal_cdf(out[k] + c.shift[k]));
            },
        },
        spec);
}

SampleMatrix copula_sample(const CopulaSpec& spec, std::size_t n, std::uint64_t seed) {
    require(n >= 1, "copula_sample: n must be at least 1");
    const int d = dimension(spec);
    SampleMatrix out(static_cast<Eigen::Index>(n), d);
    parallel_chunks(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, 0x636f70, chunk);
        for (std::size_t i = begin; i < end; ++i) {
            copula_draw(spec, rng, std::span<double>(out.row(static_cast<Eigen::Index>(i)).data(), d));
        }
    });
    return out;
}

double archimedean_cdf(const CopulaSpec& spec, std::span<const double> u) {
    require(static_cast<int>(u.size()) == dimension(spec), "archimedean_cdf: dimension mismatch");
    for (double v : u) require(v > 0.0 && v <= 1.0, "archimedean_cdf: arguments must lie in (0, 1]");
    return std::visit(
        Overloaded{
            [&](const ClaytonCopula& c) {
                double s = 0.0;
                for (double v : u) s += std::pow(v, -c.theta);
                return std::pow(s - c.d + 1.0, -1.0 / c.theta);
            },
            [&](const GumbelCopula& c) {
                double s = 0.0;
                for (double v : u) s += std::pow(-std::log(v), c.theta);
                return std::exp(-std::pow(s, 1.0 / c.theta));
            },
            [&](const FrankCopula& c) {
                if (c.theta < 1e-10) {
                    double prod = 1.0;
                    for (double v : u) prod *= v;
                    return prod;
                }
                double logprod = 0.0;
                for (double v : u) logprod += std::log(-std::expm1(-c.theta * v));
                const double denom = std::log(-std::expm1(-c.theta)) * (c.d - 1);
                // prod(e^{-theta u} - 1) / (e^{-theta} - 1)^{d-1} is always negative
                return -std::log1p(-std::exp(logprod - denom)) / c.theta;
            },
            [&](const IndependenceCopula&) {
                double prod = 1.0;
                for (double v : u) prod *= v;
                return prod;
            },
            [&](const auto&) -> double {
                throw DomainError("archimedean_cdf: closed form only for Archimedean families");
            },
        },
        spec);
}

}  // namespace dmrisk
