#include "dmrisk/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <tuple>
#include <utility>
#include <sstream>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "dmrisk/error.hpp"

namespace dmrisk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

void check_probability(double u) {
    if (!(u > 0.0 && u < 1.0)) {
        std::ostringstream os;
        os << "quantile level must lie in (0,1), got " << u;
        throw DomainError(os.str());
    }
}

// --- inverse Gaussian -------------------------------------------------------

double ig_cdf(const InverseGaussian& d, double x) {
    if (x <= 0.0) return 0.0;
    const double s = std::sqrt(d.lambda / x);
    const double a = s * (x / d.mu - 1.0);
    const double b = -s * (x / d.mu + 1.0);
    const double second = std::exp(2.0 * d.lambda / d.mu + log_normal_cdf(b));
    return std::clamp(normal_cdf(a) + second, 0.0, 1.0);
}

double ig_survival(const InverseGaussian& d, double x) {
    if (x <= 0.0) return 1.0;
    const double s = std::sqrt(d.lambda / x);
    const double a = s * (x / d.mu - 1.0);
    const double b = -s * (x / d.mu + 1.0);
    const double second = std::exp(2.0 * d.lambda / d.mu + log_normal_cdf(b));
    return std::clamp(normal_cdf(-a) - second, 0.0, 1.0);
}

double ig_log_pdf(const InverseGaussian& d, double x) {
    if (x <= 0.0) return kNegInf;
    const double z = x - d.mu;
    return 0.5 * std::log(d.lambda / (2.0 * std::numbers::pi * x * x * x)) -
           d.lambda * z * z / (2.0 * d.mu * d.mu * x);
}

// Safeguarded Newton iteration on log x, started from the lognormal with
// the same mean and variance. With upper set, q is the survival level, so
// levels close to one keep full relative precision.
double ig_quantile_exact(const InverseGaussian& d, double q, bool upper) {
    auto residual = [&](double x) { return upper ? ig_survival(d, x) - q : ig_cdf(d, x) - q; };
    const double sign = upper ? -1.0 : 1.0;  // residual increases with x on the lower branch
    const double s2 = std::log1p(d.mu / d.lambda);
    const double z = upper ? -normal_quantile(q) : normal_quantile(q);
    double y = std::log(d.mu) - 0.5 * s2 + std::sqrt(s2) * z;
    double lo = kNegInf, hi = kPosInf;
    for (int it = 0; it < 300; ++it) {
        const double x = std::exp(y);
        const double r = residual(x);
        if (r == 0.0) return x;
        if (sign * r < 0.0) lo = y; else hi = y;
        const double slope = sign * std::exp(ig_log_pdf(d, x)) * x;
        // steps capped at one unit of log x; the tails are far from linear
        double next = (slope > 0.0 && std::isfinite(slope)) ? y - std::clamp(r / slope, -1.0, 1.0) : kPosInf;
        if (!(next > lo && next < hi)) {
            if (std::isfinite(lo) && std::isfinite(hi)) next = 0.5 * (lo + hi);
            else next = std::isfinite(lo) ? lo + 1.0 : hi - 1.0;
        }
        if (std::abs(next - y) < 1e-14 * std::max(1.0, std::abs(y)) ||
            (std::isfinite(lo) && std::isfinite(hi) && hi - lo < 1e-15)) {
            return std::exp(next);
        }
        y = next;
    }
    return std::exp(y);
}

}  // namespace

namespace detail {

// Cubic Hermite interpolant on an equispaced grid, filled once from a
// callback returning value and derivative at each node.
struct HermiteTable {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    std::once_flag once;
    std::vector<double> y;
    std::vector<double> slope;

    template <class F>
    void build(double lo_, double hi_, int n_, F&& f) {
        std::call_once(once, [&] {
            lo = lo_, hi = hi_, n = n_;
            const double h = (hi - lo) / n;
            y.resize(n + 1);
            slope.resize(n + 1);
            for (int k = 0; k <= n; ++k) std::tie(y[k], slope[k]) = f(lo + h * k);
        });
    }

    // NaN outside the table
    double operator()(double t) const {
        if (!(t > lo && t < hi)) return std::numeric_limits<double>::quiet_NaN();
        const double h = (hi - lo) / n;
        const double s = (t - lo) / h;
        const int k = std::min(static_cast<int>(s), n - 1);
        const double r = s - k;
        const double r2 = r * r, r3 = r2 * r;
        return (2 * r3 - 3 * r2 + 1) * y[k] + (r3 - 2 * r2 + r) * h * slope[k] + (-2 * r3 + 3 * r2) * y[k + 1] +
               (r3 - r2) * h * slope[k + 1];
    }
};

// log Q(Phi(z)) on |z| < 8.25, slope phi(z) / (f(x) x) at x = Q(Phi(z)).
struct QuantileCache : HermiteTable {
    template <class LogQ, class LogPdf>
    void build(LogQ&& log_q, LogPdf&& log_pdf) {
        HermiteTable::build(-8.25, 8.25, 2048, [&](double z) {
            const double v = log_q(z);
            return std::pair{v, std::exp(-0.5 * z * z - kLogSqrt2Pi - log_pdf(std::exp(v)) - v)};
        });
    }
    double log_quantile(double z) const { return (*this)(z); }
};

}  // namespace detail

namespace {

double ig_quantile(const InverseGaussian& d, double u) {
    if (!d.cache) return u > 0.5 ? ig_quantile_exact(d, 1.0 - u, true) : ig_quantile_exact(d, u, false);
    d.cache->build(
        [&](double z) {
            return std::log(z > 0.0 ? ig_quantile_exact(d, normal_cdf(-z), true) : ig_quantile_exact(d, normal_cdf(z), false));
        },
        [&](double x) { return ig_log_pdf(d, x); });
    const double z = normal_quantile(u);
    const double y = d.cache->log_quantile(z);
    if (std::isnan(y)) return u > 0.5 ? ig_quantile_exact(d, 1.0 - u, true) : ig_quantile_exact(d, u, false);
    // one Newton step from the interpolated value
    const double x = std::exp(y);
    const double r = u > 0.5 ? (1.0 - u) - ig_survival(d, x) : ig_cdf(d, x) - u;
    const double step = r / std::exp(ig_log_pdf(d, x));
    return std::abs(step) < 1e-6 * x ? x - step : x;
}

double ig_draw(const InverseGaussian& d, Rng& rng) {
    // Michael, Schucany and Haas transformation.
    const double nu = standard_normal(rng);
    const double y = nu * nu;
    const double mu = d.mu;
    const double x = mu + mu * mu * y / (2.0 * d.lambda) -
                     mu / (2.0 * d.lambda) * std::sqrt(4.0 * mu * d.lambda * y + mu * mu * y * y);
    const double z = uniform01(rng);
    return z <= mu / (mu + x) ? x : mu * mu / x;
}

// --- positive stable and log-series frailties --------------------------------

double positive_stable_draw(const PositiveStable& d, Rng& rng) {
    // Chambers-Mallows-Stuck (Kanter) representation, Laplace transform exp(-s^alpha).
    const double a = d.alpha;
    if (a == 1.0) return 1.0;
    const double u = std::numbers::pi * uniform01(rng);
    const double w = -std::log(uniform01(rng));
    return std::sin(a * u) / std::pow(std::sin(u), 1.0 / a) *
           std::pow(std::sin((1.0 - a) * u) / w, (1.0 - a) / a);
}

double log_series_draw(const LogSeries& d, Rng& rng) {
    // Kemp's LK algorithm.
    const double v = uniform01(rng);
    if (v >= d.theta) return 1.0;
    const double q = -std::expm1(std::log1p(-d.theta) * uniform01(rng));
    if (v <= q * q) return std::floor(1.0 + std::log(v) / std::log(q));
    return v > q ? 1.0 : 2.0;
}

double log_series_log_pmf(const LogSeries& d, double x) {
    if (x < 1.0 || x != std::floor(x)) return kNegInf;
    return x * std::log(d.theta) - std::log(x) - std::log(-std::log1p(-d.theta));
}

double log_series_cdf(const LogSeries& d, double x) {
    if (x < 1.0) return 0.0;
    const double kmax = std::floor(x);
    double total = 0.0;
    for (double k = 1.0; k <= kmax; k += 1.0) {
        const double term = std::exp(log_series_log_pmf(d, k));
        total += term;
        if (term < 1e-18 * total) break;
    }
    return std::min(total, 1.0);
}

double log_series_quantile(const LogSeries& d, double u) {
    double total = 0.0;
    for (double k = 1.0;; k += 1.0) {
        total += std::exp(log_series_log_pmf(d, k));
        if (total >= u || k > 1e7) return k;
    }
}

// --- negative binomial -------------------------------------------------------

double negbin_log_pmf(const NegBinomial& d, double x) {
    if (x < 0.0 || x != std::floor(x)) return kNegInf;
    return std::lgamma(x + d.r) - std::lgamma(d.r) - std::lgamma(x + 1.0) +
           d.r * std::log(d.p) + x * std::log1p(-d.p);
}

double negbin_draw(const NegBinomial& d, Rng& rng) {
    std::gamma_distribution<double> gamma(d.r, (1.0 - d.p) / d.p);
    const double rate = gamma(rng);
    if (rate <= 0.0) return 0.0;
    std::poisson_distribution<long long> poisson(rate);
    return static_cast<double>(poisson(rng));
}

// --- dispatch ----------------------------------------------------------------

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

// --- constructors --------------------------------------------------------------

InverseGaussian::InverseGaussian(double mu_, double lambda_)
    : mu(mu_), lambda(lambda_), cache(std::make_shared<detail::QuantileCache>()) {
    require(mu > 0.0 && lambda > 0.0, "InverseGaussian requires mu > 0 and lambda > 0");
}

Gpd::Gpd(double xi_, double scale_) : xi(xi_), scale(scale_) {
    require(std::isfinite(xi) && scale > 0.0, "GPD requires finite xi and scale > 0");
}

double Gpd::upper_endpoint() const { return xi < 0.0 ? -scale / xi : kPosInf; }

Lognormal::Lognormal(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
    require(std::isfinite(mu) && sigma > 0.0, "Lognormal requires sigma > 0");
}

NegBinomial::NegBinomial(double r_, double p_) : r(r_), p(p_) {
    require(r > 0.0 && p > 0.0 && p < 1.0, "NegBinomial requires r > 0 and p in (0,1)");
}

Normal::Normal(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
    require(std::isfinite(mu) && sigma > 0.0, "Normal requires sigma > 0");
}

StudentT::StudentT(double nu_) : nu(nu_) { require(nu > 0.0, "StudentT requires nu > 0"); }

GammaDist::GammaDist(double shape_, double scale_) : shape(shape_), scale(scale_) {
    require(shape > 0.0 && scale > 0.0, "Gamma requires shape > 0 and scale > 0");
}

PositiveStable::PositiveStable(double alpha_) : alpha(alpha_) {
    require(alpha > 0.0 && alpha <= 1.0, "PositiveStable requires alpha in (0,1]");
}

LogSeries::LogSeries(double theta_) : theta(theta_) {
    require(theta > 0.0 && theta < 1.0, "LogSeries requires theta in (0,1)");
}

ChiSquare::ChiSquare(double nu_) : nu(nu_), cache(std::make_shared<detail::QuantileCache>()) {
    require(nu > 0.0, "ChiSquare requires nu > 0");
}

Uniform::Uniform(double a_, double b_) : a(a_), b(b_) {
    require(a < b, "Uniform requires a < b");
}

// --- scalar helpers ------------------------------------------------------------

double uniform01(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
    // Marsaglia polar method; the spare variate is discarded to keep draws
    // a pure function of the generator state.
    for (;;) {
        const double x = 2.0 * uniform01(rng) - 1.0;
        const double y = 2.0 * uniform01(rng) - 1.0;
        const double s = x * x + y * y;
        if (s > 0.0 && s < 1.0) return x * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0); }

double normal_quantile(double u) {
    check_probability(u);
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

double log_normal_cdf(double z) {
    if (z > -30.0) return std::log(normal_cdf(z));
    // Asymptotic expansion of the Mills ratio.
    const double z2 = z * z;
    return -0.5 * z2 - std::log(-z) - kLogSqrt2Pi +
           std::log1p(-1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2));
}

double student_t_cdf(double x, double nu) {
    if (nu == 1.0) return 0.5 + std::atan(x) / std::numbers::pi;
    if (nu == 2.0) return 0.5 + x / (2.0 * std::sqrt(2.0 + x * x));
    if (!std::isfinite(x)) return x > 0 ? 1.0 : 0.0;
    return boost::math::cdf(boost::math::students_t(nu), x);
}

StudentTCdf::StudentTCdf(double nu) : nu_(nu), table_(std::make_shared<detail::HermiteTable>()) {
    require(nu > 0.0, "StudentTCdf requires nu > 0");
    edge_ = std::asinh(-boost::math::quantile(boost::math::students_t(nu), normal_cdf(-8.25)));
}

// g(s) = -Phi^{-1}(F(-sinh s)) for s >= 0, odd in s; the table stops where
// F(-sinh s) reaches Phi(-8.25).
double StudentTCdf::operator()(double x) const {
    if (nu_ == 1.0 || nu_ == 2.0 || !std::isfinite(x)) return student_t_cdf(x, nu_);
    const boost::math::students_t t(nu_);
    const int n = std::max(2048, static_cast<int>(std::ceil(edge_ / 0.005)));
    table_->build(0.0, edge_, n, [&](double s) {
        if (s == 0.0) return std::pair{0.0, std::exp(std::log(boost::math::pdf(t, 0.0)) + kLogSqrt2Pi)};
        const double g = -normal_quantile(boost::math::cdf(t, -std::sinh(s)));
        return std::pair{g, std::exp(std::log(boost::math::pdf(t, std::sinh(s))) + 0.5 * g * g + kLogSqrt2Pi) * std::cosh(s)};
    });
    const double s = std::asinh(std::abs(x));
    const double g = (*table_)(s);
    if (std::isnan(g)) return s == 0.0 ? 0.5 : boost::math::cdf(t, x);
    return normal_cdf(x < 0.0 ? -g : g);
}

double student_t_quantile(double u, double nu) {
    check_probability(u);
    if (nu == 1.0) return std::tan(std::numbers::pi * (u - 0.5));
    return boost::math::quantile(boost::math::students_t(nu), u);
}

double chi_square_quantile(double u, double nu) {
    check_probability(u);
    return boost::math::quantile(boost::math::chi_squared(nu), u);
}

double chi_square_quantile(const ChiSquare& d, double u) {
    check_probability(u);
    const boost::math::chi_squared chi(d.nu);
    if (!d.cache) return boost::math::quantile(chi, u);
    d.cache->build(
        [&](double z) {
            return std::log(z > 0.0 ? boost::math::quantile(boost::math::complement(chi, normal_cdf(-z)))
                                    : boost::math::quantile(chi, normal_cdf(z)));
        },
        [&](double x) { return std::log(boost::math::pdf(chi, x)); });
    const double y = d.cache->log_quantile(normal_quantile(u));
    return std::isnan(y) ? boost::math::quantile(chi, u) : std::exp(y);
}

double gpd_cdf(const Gpd& g, double x) {
    if (x <= 0.0) return 0.0;
    if (std::abs(g.xi) < 1e-12) return -std::expm1(-x / g.scale);
    const double t = g.xi * x / g.scale;
    if (t <= -1.0) return 1.0;
    return -std::expm1(-std::log1p(t) / g.xi);
}

double gpd_quantile(const Gpd& g, double u) {
    check_probability(u);
    if (std::abs(g.xi) < 1e-12) return -g.scale * std::log1p(-u);
    return g.scale * std::expm1(-g.xi * std::log1p(-u)) / g.xi;
}

double gpd_log_pdf(const Gpd& g, double x) {
    if (x < 0.0) return kNegInf;
    if (std::abs(g.xi) < 1e-12) return -std::log(g.scale) - x / g.scale;
    const double t = g.xi * x / g.scale;
    if (t <= -1.0) return kNegInf;
    return -std::log(g.scale) - (1.0 + 1.0 / g.xi) * std::log1p(t);
}

// --- QuantileTable ---------------------------------------------------------------

QuantileTable::QuantileTable(std::vector<double> samples) : sorted_(std::move(samples)) {
    require(!sorted_.empty(), "quantile table needs at least one sample");
    for (double v : sorted_) require(std::isfinite(v), "quantile table samples must be finite");
    std::sort(sorted_.begin(), sorted_.end());
}

double QuantileTable::quantile(double u) const {
    if (sorted_.empty()) throw StateError("quantile of an empty table");
    check_probability(u);
    const std::size_t n = sorted_.size();
    if (n == 1) return sorted_.front();
    const double h = u * static_cast<double>(n - 1);
    const auto k = static_cast<std::size_t>(h);
    if (k + 1 >= n) return sorted_.back();
    const double frac = h - static_cast<double>(k);
    return sorted_[k] + frac * (sorted_[k + 1] - sorted_[k]);
}

double QuantileTable::cdf(double x) const {
    if (sorted_.empty()) throw StateError("cdf of an empty table");
    const std::size_t n = sorted_.size();
    if (x < sorted_.front()) return 0.0;
    if (x >= sorted_.back()) return 1.0;
    // largest k with sorted_[k] <= x
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    const auto k = static_cast<std::size_t>(it - sorted_.begin()) - 1;
    const double width = sorted_[k + 1] - sorted_[k];
    const double frac = width > 0.0 ? (x - sorted_[k]) / width : 0.0;
    return (static_cast<double>(k) + frac) / static_cast<double>(n - 1);
}

double QuantileTable::log_pdf(double x) const {
    if (sorted_.empty()) throw StateError("density of an empty table");
    const std::size_t n = sorted_.size();
    if (n < 2 || x < sorted_.front() || x >= sorted_.back()) return kNegInf;
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    const auto k = static_cast<std::size_t>(it - sorted_.begin()) - 1;
    const double width = sorted_[k + 1] - sorted_[k];
    if (width <= 0.0) return kPosInf;
    return -std::log(width * static_cast<double>(n - 1));
}

QuantileTable build_quantile_table(std::vector<double> samples) {
    return QuantileTable(std::move(samples));
}

// --- SplicedMarginal ----------------------------------------------------------

SplicedMarginal::SplicedMarginal(double p_lower, double p_upper, double x_lower, double x_upper,
                                 Gpd lower_tail, Gpd upper_tail, std::vector<double> central)
    : p_l_(p_lower),
      p_u_(p_upper),
      x_l_(x_lower),
      x_u_(x_upper),
      lower_(lower_tail),
      upper_(upper_tail) {
    require(p_l_ > 0.0 && p_u_ > 0.0 && p_l_ + p_u_ < 1.0,
            "spliced marginal requires p_l, p_u > 0 and p_l + p_u < 1");
    require(x_l_ < x_u_, "spliced marginal requires x_l < x_u");
    std::sort(central.begin(), central.end());
    knots_.reserve(central.size() + 2);
    knots_.push_back(x_l_);
    for (double v : central) {
        require(v >= x_l_ && v <= x_u_, "central sample must lie in [x_l, x_u]");
        if (v > x_l_ && v < x_u_) knots_.push_back(v);
    }
    knots_.push_back(x_u_);
}

double SplicedMarginal::central_cdf(double x) const {
    const std::size_t m = knots_.size() - 1;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const auto k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    if (k >= m) return 1.0;
    const double width = knots_[k + 1] - knots_[k];
    const double frac = width > 0.0 ? (x - knots_[k]) / width : 0.0;
    return (static_cast<double>(k) + frac) / static_cast<double>(m);
}

double SplicedMarginal::cdf(double x) const {
    if (x <= x_l_) return p_l_ * (1.0 - gpd_cdf(lower_, x_l_ - x));
    if (x <= x_u_) return p_l_ + (1.0 - p_l_ - p_u_) * central_cdf(x);
    return (1.0 - p_u_) + p_u_ * gpd_cdf(upper_, x - x_u_);
}

double SplicedMarginal::quantile(double u) const {
    check_probability(u);
    if (u <= p_l_) {
        if (u == p_l_) return x_l_;
        return x_l_ - gpd_quantile(lower_, 1.0 - u / p_l_);
    }
    if (u <= 1.0 - p_u_) {
        const double s = (u - p_l_) / (1.0 - p_l_ - p_u_);
        const std::size_t m = knots_.size() - 1;
        const double h = s * static_cast<double>(m);
        const auto k = std::min(static_cast<std::size_t>(h), m - 1);
        const double frac = h - static_cast<double>(k);
        return knots_[k] + frac * (knots_[k + 1] - knots_[k]);
    }
    return x_u_ + gpd_quantile(upper_, (u - (1.0 - p_u_)) / p_u_);
}

double SplicedMarginal::log_pdf(double x) const {
    if (x <= x_l_) return std::log(p_l_) + gpd_log_pdf(lower_, x_l_ - x);
    if (x > x_u_) return std::log(p_u_) + gpd_log_pdf(upper_, x - x_u_);
    const std::size_t m = knots_.size() - 1;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    auto k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    k = std::min(k, m - 1);
    const double width = knots_[k + 1] - knots_[k];
    if (width <= 0.0) return kPosInf;
    return std::log((1.0 - p_l_ - p_u_) / (static_cast<double>(m) * width));
}

// --- CompoundMarginal ------------------------------------------------------------

CompoundMarginal::CompoundMarginal(NegBinomial frequency, Lognormal severity,
                                   std::size_t table_size, std::uint64_t seed)
    : frequency_(frequency), severity_(severity), seed_(seed) {
    require(table_size >= 1, "compound table size must be positive");
    std::vector<double> draws(table_size);
    parallel_chunks(table_size, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed_, 0x636f6d70, chunk);
        for (std::size_t i = begin; i < end; ++i) draws[i] = draw(rng);
    });
    table_ = QuantileTable(std::move(draws));
}

double CompoundMarginal::mean() const {
    return frequency_.mean() * std::exp(severity_.mu + 0.5 * severity_.sigma * severity_.sigma);
}

double CompoundMarginal::draw(Rng& rng) const {
    const auto count = static_cast<long long>(negbin_draw(frequency_, rng));
    double total = 0.0;
    for (long long j = 0; j < count; ++j) {
        total += std::exp(severity_.mu + severity_.sigma * standard_normal(rng));
    }
    return total;
}

// --- generic interface -------------------------------------------------------------

double quantile(const Distribution& dist, double u) {
    check_probability(u);
    return std::visit(
        Overloaded{
            [&](const InverseGaussian& d) { return ig_quantile(d, u); },
            [&](const Gpd& d) { return gpd_quantile(d, u); },
            [&](const Lognormal& d) { return std::exp(d.mu + d.sigma * normal_quantile(u)); },
            [&](const NegBinomial& d) {
                // smallest k with F(k) >= u
                const boost::math::negative_binomial nb(d.r, d.p);
                double k = std::floor(boost::math::quantile(nb, u));
                k = std::max(0.0, k - 2.0);
                while (boost::math::cdf(nb, k) < u) k += 1.0;
                return k;
            },
            [&](const Normal& d) { return d.mu + d.sigma * normal_quantile(u); },
            [&](const StudentT& d) { return student_t_quantile(u, d.nu); },
            [&](const GammaDist& d) {
                return boost::math::quantile(boost::math::gamma_distribution<>(d.shape, d.scale), u);
            },
            [&](const PositiveStable&) -> double {
                throw DomainError("positive stable law supports sampling only");
            },
            [&](const LogSeries& d) { return log_series_quantile(d, u); },
            [&](const ChiSquare& d) { return chi_square_quantile(d, u); },
            [&](const Uniform& d) { return d.a + u * (d.b - d.a); },
            [&](const SplicedMarginal& d) { return d.quantile(u); },
            [&](const CompoundMarginal& d) { return d.table().quantile(u); },
            [&](const QuantileTable& d) { return d.quantile(u); },
        },
        dist);
}

double cdf(const Distribution& dist, double x) {
    return std::visit(
        Overloaded{
            [&](const InverseGaussian& d) { return ig_cdf(d, x); },
            [&](const Gpd& d) { return gpd_cdf(d, x); },
            [&](const Lognormal& d) {
                return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - d.mu) / d.sigma);
            },
            [&](const NegBinomial& d) {
                if (x < 0.0) return 0.0;
                return boost::math::cdf(boost::math::negative_binomial(d.r, d.p), std::floor(x));
            },
            [&](const Normal& d) { return normal_cdf((x - d.mu) / d.sigma); },
            [&](const StudentT& d) { return student_t_cdf(x, d.nu); },
            [&](const GammaDist& d) {
                if (x <= 0.0) return 0.0;
                return boost::math::cdf(boost::math::gamma_distribution<>(d.shape, d.scale), x);
            },
            [&](const PositiveStable&) -> double {
                throw DomainError("positive stable law supports sampling only");
            },
            [&](const LogSeries& d) { return log_series_cdf(d, x); },
            [&](const ChiSquare& d) {
                if (x <= 0.0) return 0.0;
                return boost::math::cdf(boost::math::chi_squared(d.nu), x);
            },
            [&](const Uniform& d) { return std::clamp((x - d.a) / (d.b - d.a), 0.0, 1.0); },
            [&](const SplicedMarginal& d) { return d.cdf(x); },
            [&](const CompoundMarginal& d) { return d.table().cdf(x); },
            [&](const QuantileTable& d) { return d.cdf(x); },
        },
        dist);
}

double log_pdf(const Distribution& dist, double x) {
    return std::visit(
        Overloaded{
            [&](const InverseGaussian& d) { return ig_log_pdf(d, x); },
            [&](const Gpd& d) { return gpd_log_pdf(d, x); },
            [&](const Lognormal& d) {
                if (x <= 0.0) return kNegInf;
                const double z = (std::log(x) - d.mu) / d.sigma;
                return -0.5 * z * z - kLogSqrt2Pi - std::log(d.sigma * x);
            },
            [&](const NegBinomial& d) { return negbin_log_pmf(d, x); },
            [&](const Normal& d) {
                const double z = (x - d.mu) / d.sigma;
                return -0.5 * z * z - kLogSqrt2Pi - std::log(d.sigma);
            },
            [&](const StudentT& d) {
                const double nu = d.nu;
                return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                       0.5 * std::log(nu * std::numbers::pi) -
                       0.5 * (nu + 1.0) * std::log1p(x * x / nu);
            },
            [&](const GammaDist& d) {
                if (x <= 0.0) return kNegInf;
                return (d.shape - 1.0) * std::log(x) - x / d.scale - std::lgamma(d.shape) -
                       d.shape * std::log(d.scale);
            },
            [&](const PositiveStable&) -> double {
                throw DomainError("positive stable law supports sampling only");
            },
            [&](const LogSeries& d) { return log_series_log_pmf(d, x); },
            [&](const ChiSquare& d) {
                if (x <= 0.0) return kNegInf;
                const double k = 0.5 * d.nu;
                return (k - 1.0) * std::log(x) - 0.5 * x - std::lgamma(k) - k * std::numbers::ln2;
            },
            [&](const Uniform& d) {
                return (x < d.a || x > d.b) ? kNegInf : -std::log(d.b - d.a);
            },
            [&](const SplicedMarginal& d) { return d.log_pdf(x); },
            [&](const CompoundMarginal& d) { return d.table().log_pdf(x); },
            [&](const QuantileTable& d) { return d.log_pdf(x); },
        },
        dist);
}

double draw(const Distribution& dist, Rng& rng) {
    return std::visit(
        Overloaded{
            [&](const InverseGaussian& d) { return ig_draw(d, rng); },
            [&](const Gpd& d) { return gpd_quantile(d, uniform01(rng)); },
            [&](const Lognormal& d) { return std::exp(d.mu + d.sigma * standard_normal(rng)); },
            [&](const NegBinomial& d) { return negbin_draw(d, rng); },
            [&](const Normal& d) { return d.mu + d.sigma * standard_normal(rng); },
            [&](const StudentT& d) {
                std::chi_squared_distribution<double> chi(d.nu);
                return standard_normal(rng) / std::sqrt(chi(rng) / d.nu);
            },
            [&](const GammaDist& d) {
                std::gamma_distribution<double> g(d.shape, d.scale);
                return g(rng);
            },
            [&](const PositiveStable& d) { return positive_stable_draw(d, rng); },
            [&](const LogSeries& d) { return log_series_draw(d, rng); },
            [&](const ChiSquare& d) {
                std::chi_squared_distribution<double> chi(d.nu);
                return chi(rng);
            },
            [&](const Uniform& d) { return d.a + (d.b - d.a) * uniform01(rng); },
            [&](const SplicedMarginal& d) { return d.quantile(uniform01(rng)); },
            [&](const CompoundMarginal& d) { return d.draw(rng); },
            [&](const QuantileTable& d) { return d.quantile(uniform01(rng)); },
        },
        dist);
}

std::vector<double> sample(const Distribution& dist, std::size_t n, std::uint64_t seed) {
    require(n >= 1, "sample size must be at least 1");
    std::vector<double> out(n);
    parallel_chunks(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, 0x64697374, chunk);
        for (std::size_t i = begin; i < end; ++i) out[i] = draw(dist, rng);
    });
    return out;
}

std::string describe(const Distribution& dist) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const InverseGaussian& d) { os << "IG(" << d.mu << ", " << d.lambda << ")"; },
                   [&](const Gpd& d) { os << "GPD(" << d.xi << ", " << d.scale << ")"; },
                   [&](const Lognormal& d) { os << "LN(" << d.mu << ", " << d.sigma << ")"; },
                   [&](const NegBinomial& d) { os << "NB(" << d.r << ", " << d.p << ")"; },
                   [&](const Normal& d) { os << "N(" << d.mu << ", " << d.sigma << ")"; },
                   [&](const StudentT& d) { os << "t(" << d.nu << ")"; },
                   [&](const GammaDist& d) { os << "Gamma(" << d.shape << ", " << d.scale << ")"; },
                   [&](const PositiveStable& d) { os << "PS(" << d.alpha << ")"; },
                   [&](const LogSeries& d) { os << "Log(" << d.theta << ")"; },
                   [&](const ChiSquare& d) { os << "Chi2(" << d.nu << ")"; },
                   [&](const Uniform& d) { os << "U(" << d.a << ", " << d.b << ")"; },
                   [&](const SplicedMarginal& d) {
                       os << "Spliced(" << d.x_lower() << ", " << d.x_upper() << ")";
                   },
                   [&](const CompoundMarginal& d) {
                       os << "Compound(NB(" << d.frequency().r << ", " << d.frequency().p
                          << "), LN(" << d.severity().mu << ", " << d.severity().sigma << "))";
                   },
                   [&](const QuantileTable& d) { os << "Table(" << d.size() << ")"; },
               },
               dist);
    return os.str();
}

}  // namespace dmrisk
