#include "dmrisk/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "dmrisk/error.hpp"
#include "dmrisk/random.hpp"
#include "dmrisk/stats.hpp"

namespace dmrisk {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    out.push_back(cell);
    for (auto& s : out) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto r = std::from_chars(first, s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

std::string where(const std::string& path, std::size_t line, std::size_t col) {
    return path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": ";
}

}  // namespace

PanelData read_panel_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open file");
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        header = split_csv_line(line);
        break;
    }
    if (header.empty()) throw InputError(path + ": empty file");
    std::string first = header[0];
    std::transform(first.begin(), first.end(), first.begin(), [](unsigned char c) { return std::tolower(c); });
    const bool dated = first == "date" || first == "period" || first == "time";
    const std::size_t skip = dated ? 1 : 0;
    if (header.size() <= skip) throw InputError(where(path, lineno, 1) + "no data columns in header");

    PanelData panel;
    panel.labels.assign(header.begin() + static_cast<std::ptrdiff_t>(skip), header.end());
    const std::size_t d = panel.labels.size();
    std::vector<double> buf;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw InputError(where(path, lineno, std::min(cells.size(), header.size()) + 1) + "expected " +
                             std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
        }
        if (dated) panel.dates.push_back(cells[0]);
        for (std::size_t c = skip; c < cells.size(); ++c) {
            double v = 0.0;
            if (!parse_double(cells[c], v) || !std::isfinite(v)) {
                throw InputError(where(path, lineno, c + 1) + "not a finite number: '" + cells[c] + "'");
            }
            buf.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw InputError(path + ": no data rows");
    panel.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            panel.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = buf[r * d + c];
        }
    }
    return panel;
}

PanelData returns_transform(const PanelData& prices, int horizon) {
    require(horizon >= 1, "returns_transform: horizon must be positive");
    require(prices.rows() > horizon, "returns_transform: need more rows than the horizon");
    if ((prices.values.array() <= 0.0).any()) throw DomainError("returns_transform: prices must be positive");
    const int T = prices.rows();
    PanelData out;
    out.labels = prices.labels;
    out.values.resize(T - horizon, prices.cols());
    for (int t = 0; t + horizon < T; ++t) {
        out.values.row(t) = -(prices.values.row(t + horizon).array() / prices.values.row(t).array()).matrix();
        if (!prices.dates.empty()) out.dates.push_back(prices.dates[static_cast<std::size_t>(t)]);
    }
    return out;
}

RowPartition partition_by_aggregate(const Eigen::MatrixXd& x, const Aggregation& agg, double cut_extreme,
                                    double cut_upper) {
    require(cut_extreme >= 0.0 && cut_extreme <= cut_upper && cut_upper < 1.0,
            "partition_by_aggregate: cuts must satisfy 0 <= extreme <= upper < 1");
    const int D = static_cast<int>(x.rows());
    std::vector<double> loss(static_cast<std::size_t>(D));
    std::vector<double> row(static_cast<std::size_t>(x.cols()));
    for (int t = 0; t < D; ++t) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) row[static_cast<std::size_t>(c)] = x(t, c);
        loss[static_cast<std::size_t>(t)] = aggregate(agg, row);
    }
    std::vector<int> order(static_cast<std::size_t>(D));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return loss[static_cast<std::size_t>(a)] > loss[static_cast<std::size_t>(b)];
    });
    // 0.04 * 100 counts as 4
    const auto n_ext = static_cast<int>(std::floor(cut_extreme * D + 1e-9));
    const auto n_up = static_cast<int>(std::floor(cut_upper * D + 1e-9));
    RowPartition p;
    for (int r = 0; r < D; ++r) {
        const int t = order[static_cast<std::size_t>(r)];
        if (r < n_ext) p.extreme.push_back(t);
        else if (r < n_up) p.upper.push_back(t);
        else p.center.push_back(t);
    }
    std::sort(p.extreme.begin(), p.extreme.end());
    std::sort(p.upper.begin(), p.upper.end());
    std::sort(p.center.begin(), p.center.end());
    return p;
}

// --- GPD ---------------------------------------------------------------------

double gpd_loglik(std::span<const double> y, double xi, double scale) {
    if (!(scale > 0.0)) return -std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(y.size());
    double s = 0.0;
    if (std::abs(xi) < 1e-12) {
        for (double v : y) s += v;
        return -n * std::log(scale) - s / scale;
    }
    for (double v : y) {
        const double z = xi * v / scale;
        if (!(z > -1.0)) return -std::numeric_limits<double>::infinity();
        s += std::log1p(z);
    }
    return -n * std::log(scale) - (1.0 + 1.0 / xi) * s;
}

namespace {

// Unique root of the scale score for fixed xi > -1.
double gpd_profile_scale(std::span<const double> y, double xi, double mean_y, double max_y) {
    if (std::abs(xi) < 1e-12) return mean_y;
    const double n = static_cast<double>(y.size());
    auto score = [&](double sigma) {
        double s = 0.0;
        for (double v : y) s += v / (sigma + xi * v);
        return (1.0 + xi) * s - n;
    };
    double lo = std::max(0.0, -xi * max_y);
    lo = lo > 0.0 ? lo * (1.0 + 1e-12) + 1e-300 : 1e-12 * mean_y;
    double hi = 2.0 * (1.0 + xi) * mean_y + 2.0 * std::abs(xi) * max_y + mean_y;
    if (score(lo) <= 0.0) return lo;
    boost::uintmax_t it = 200;
    const auto r = boost::math::tools::toms748_solve(score, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
    return 0.5 * (r.first + r.second);
}

}  // namespace

GpdFit fit_gpd_mle(std::span<const double> y, std::optional<double> fixed_xi) {
    require(y.size() >= 30, "fit_gpd_mle: need at least 30 excesses");
    double mean_y = 0.0, max_y = 0.0;
    for (double v : y) {
        require(std::isfinite(v) && v >= 0.0, "fit_gpd_mle: excesses must be nonnegative");
        mean_y += v;
        max_y = std::max(max_y, v);
    }
    mean_y /= static_cast<double>(y.size());
    require(max_y > 0.0, "fit_gpd_mle: all excesses are zero");

    constexpr double kLo = -0.5, kHi = 1.0;
    GpdFit fit;
    fit.n = y.size();
    if (fixed_xi) {
        fit.xi = *fixed_xi;
        fit.scale = gpd_profile_scale(y, fit.xi, mean_y, max_y);
    } else {
        auto negprof = [&](double xi) {
            return -gpd_loglik(y, xi, gpd_profile_scale(y, xi, mean_y, max_y));
        };
        boost::uintmax_t it = 200;
        const auto r = boost::math::tools::brent_find_minima(negprof, kLo + 1e-9, kHi - 1e-9, 40, it);
        fit.xi = r.first;
        fit.scale = gpd_profile_scale(y, fit.xi, mean_y, max_y);
        fit.at_boundary = fit.xi < kLo + 1e-4 || fit.xi > kHi - 1e-4;
    }
    fit.loglik = gpd_loglik(y, fit.xi, fit.scale);
    if (!std::isfinite(fit.loglik) || !(fit.scale > 0.0)) {
        std::ostringstream msg;
        msg << "fit_gpd_mle did not converge: xi=" << fit.xi << " scale=" << fit.scale << " n=" << y.size()
            << " mean=" << mean_y << " max=" << max_y;
        throw NumericError(msg.str());
    }

    // observed information by central differences
    const double hx = 1e-4, hs = 1e-4 * fit.scale;
    auto l = [&](double a, double b) { return gpd_loglik(y, a, b); };
    const double f0 = fit.loglik;
    if (fixed_xi) {
        const double d2 = (l(fit.xi, fit.scale + hs) - 2 * f0 + l(fit.xi, fit.scale - hs)) / (hs * hs);
        fit.se_xi = 0.0;
        fit.se_scale = d2 < 0.0 ? std::sqrt(-1.0 / d2) : std::nan("");
    } else {
        const double dxx = (l(fit.xi + hx, fit.scale) - 2 * f0 + l(fit.xi - hx, fit.scale)) / (hx * hx);
        const double dss = (l(fit.xi, fit.scale + hs) - 2 * f0 + l(fit.xi, fit.scale - hs)) / (hs * hs);
        const double dxs = (l(fit.xi + hx, fit.scale + hs) - l(fit.xi + hx, fit.scale - hs) -
                            l(fit.xi - hx, fit.scale + hs) + l(fit.xi - hx, fit.scale - hs)) /
                           (4 * hx * hs);
        Eigen::Matrix2d info;
        info << -dxx, -dxs, -dxs, -dss;
        if (info.determinant() > 0.0 && info(0, 0) > 0.0) {
            const Eigen::Matrix2d cov = info.inverse();
            fit.se_xi = std::sqrt(cov(0, 0));
            fit.se_scale = std::sqrt(cov(1, 1));
        } else {
            fit.se_xi = fit.se_scale = std::nan("");
        }
    }
    return fit;
}

SplicedFit build_spliced(std::span<const double> column, double p_lower, double p_upper) {
    require(column.size() >= 100, "build_spliced: need at least 100 observations");
    require(p_lower > 0.0 && p_upper > 0.0 && p_lower + p_upper < 1.0, "build_spliced: invalid tail probabilities");
    std::vector<double> x(column.begin(), column.end());
    std::sort(x.begin(), x.end());
    const double D = static_cast<double>(x.size());
    auto kl = static_cast<std::size_t>(std::floor(D * p_lower + 1e-9));
    auto ku = static_cast<std::size_t>(std::ceil(D * (1.0 - p_upper) - 1e-9));
    kl = std::max<std::size_t>(kl, 1);
    ku = std::min(ku, x.size());
    const double xl = x[kl - 1];
    const double xu = x[ku - 1];
    require(xl < xu, "build_spliced: lower and upper thresholds coincide");
    std::vector<double> lower_ex, upper_ex, central;
    for (double v : x) {
        if (v < xl) lower_ex.push_back(xl - v);
        else if (v > xu) upper_ex.push_back(v - xu);
        else central.push_back(v);
    }
    const GpdFit lo = fit_gpd_mle(lower_ex);
    const GpdFit up = fit_gpd_mle(upper_ex);
    SplicedMarginal marg(p_lower, p_upper, xl, xu, Gpd(lo.xi, lo.scale), Gpd(up.xi, up.scale), std::move(central));
    return SplicedFit{std::move(marg), lo, up};
}

// --- dependence ----------------------------------------------------------------

Eigen::MatrixXd kendall_tau_matrix(const Eigen::MatrixXd& x) {
    require(x.rows() >= 2 && x.cols() >= 2, "kendall_tau_matrix: need at least 2 rows and 2 columns");
    const auto d = static_cast<int>(x.cols());
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) cols[static_cast<std::size_t>(c)].assign(x.col(c).data(), x.col(c).data() + x.rows());
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) pairs.emplace_back(a, b);
    }
    Eigen::MatrixXd tau = Eigen::MatrixXd::Identity(d, d);
    parallel_for(pairs.size(), [&](std::size_t k) {
        const auto [a, b] = pairs[k];
        const double t = kendall_tau(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
        tau(a, b) = t;
        tau(b, a) = t;
    });
    return tau;
}

CorrelationMatrix to_correlation(const Eigen::MatrixXd& tau, bool* repaired) {
    require(tau.rows() == tau.cols() && tau.rows() >= 2, "to_correlation: square matrix required");
    Eigen::MatrixXd r = tau.unaryExpr([](double t) { return std::sin(std::numbers::pi * t / 2.0); });
    r.diagonal().setOnes();
    const bool fix = min_eigenvalue(r) < 0.0;
    if (fix) r = repair_psd(r);
    if (repaired) *repaired = fix;
    return CorrelationMatrix(r);
}

Eigen::MatrixXd column_pseudo_observations(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd u(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const std::vector<double> col(x.col(c).data(), x.col(c).data() + x.rows());
        const auto po = pseudo_observations(col);
        for (Eigen::Index r = 0; r < x.rows(); ++r) u(r, c) = po[static_cast<std::size_t>(r)];
    }
    return u;
}

namespace {

void check_uniform_matrix(const Eigen::MatrixXd& U, const char* who) {
    require(U.rows() >= 2 && U.cols() >= 2, std::string(who) + ": need at least 2 rows and 2 columns");
    if (!((U.array() > 0.0).all() && (U.array() < 1.0).all())) {
        throw DomainError(std::string(who) + ": observations must lie in (0, 1)");
    }
}

// Deterministic chunked sum over rows.
template <class F>
double sum_rows(Eigen::Index n, F&& f) {
    const auto N = static_cast<std::size_t>(n);
    std::vector<double> part(N / kChunkSize + 1, 0.0);
    parallel_chunks(N, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        double s = 0.0;
        for (std::size_t r = begin; r < end; ++r) s += f(static_cast<Eigen::Index>(r));
        part[chunk] = s;
    });
    return std::accumulate(part.begin(), part.end(), 0.0);
}

}  // namespace

double t_copula_loglik(const Eigen::MatrixXd& U, const CorrelationMatrix& P, double nu) {
    check_uniform_matrix(U, "t_copula_loglik");
    require(P.dim() == U.cols(), "t_copula_loglik: dimension mismatch");
    require(nu > 0.0, "t_copula_loglik: nu must be positive");
    const int d = P.dim();
    const Eigen::LLT<Eigen::MatrixXd> llt(P.matrix());
    if (llt.info() != Eigen::Success) throw NumericError("t_copula_loglik: correlation matrix is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    const double logdet = 2.0 * L.diagonal().array().log().sum();
    const double dd = static_cast<double>(d);
    const double cd = std::lgamma((nu + dd) / 2.0) - std::lgamma(nu / 2.0) - dd / 2.0 * std::log(nu * std::numbers::pi) -
                      0.5 * logdet;
    const double c1 = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) - 0.5 * std::log(nu * std::numbers::pi);
    const double total = sum_rows(U.rows(), [&](Eigen::Index r) {
        Eigen::VectorXd x(d);
        double marg = 0.0;
        for (int c = 0; c < d; ++c) {
            x[c] = student_t_quantile(U(r, c), nu);
            marg += c1 - (nu + 1.0) / 2.0 * std::log1p(x[c] * x[c] / nu);
        }
        const double q = llt.matrixL().solve(x).squaredNorm();
        return cd - (nu + dd) / 2.0 * std::log1p(q / nu) - marg;
    });
    if (!std::isfinite(total)) throw NumericError("t copula log-likelihood is not finite at nu = " + std::to_string(nu));
    return total;
}

NuFit fit_t_nu_profile(const Eigen::MatrixXd& U, const CorrelationMatrix& P) {
    constexpr double kLo = 0.5, kHi = 200.0;
    const double a = std::log(kLo), b = std::log(kHi);
    auto ll = [&](double lnu) { return t_copula_loglik(U, P, std::exp(lnu)); };
    // golden-section search on log nu
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = a, hi = b;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = ll(x1), f2 = ll(x2);
    while (hi - lo > 1e-5) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = ll(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = ll(x1);
        }
    }
    NuFit fit;
    double best = 0.5 * (lo + hi);
    double fbest = ll(best);
    for (double e : {a, b}) {
        const double fe = ll(e);
        if (fe > fbest) {
            best = e;
            fbest = fe;
        }
    }
    fit.nu = std::exp(best);
    fit.loglik = fbest;
    fit.at_boundary = best - a < 1e-3 || b - best < 1e-3;
    // 95% profile interval: loglik drop of chi2_1(0.95)/2
    const double cut = fbest - 1.920729;
    auto edge = [&](double inside, double outside) {
        if (ll(outside) >= cut) return outside;
        for (int k = 0; k < 40; ++k) {
            const double mid = 0.5 * (inside + outside);
            (ll(mid) >= cut ? inside : outside) = mid;
        }
        return 0.5 * (inside + outside);
    };
    fit.ci_lower = std::exp(edge(best, a));
    fit.ci_upper = std::exp(edge(best, b));
    return fit;
}

double gumbel_copula_log_density(std::span<const double> u, double theta) {
    require(theta >= 1.0, "Gumbel density requires theta >= 1");
    const std::size_t d = u.size();
    const double alpha = 1.0 / theta;
    double t = 0.0, rest = 0.0;
    std::vector<double> ls(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double s = -std::log(u[i]);
        ls[i] = std::log(s);
        t += std::exp(theta * ls[i]);
        rest += std::log(theta) + (theta - 1.0) * ls[i] - std::log(u[i]);
    }
    // (-1)^d psi^(d)(t) = psi(t) t^{-d} sum_k b_k t^{k alpha}, b_k >= 0
    std::vector<double> b(d + 1, 0.0), nb(d + 1);
    b[0] = 1.0;
    for (std::size_t n = 0; n < d; ++n) {
        std::fill(nb.begin(), nb.end(), 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (b[k] == 0.0) continue;
            nb[k + 1] += alpha * b[k];
            nb[k] += (static_cast<double>(n) - static_cast<double>(k) * alpha) * b[k];
        }
        b.swap(nb);
    }
    const double lt = std::log(t);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= d; ++k) {
        if (b[k] > 0.0) mx = std::max(mx, std::log(b[k]) + static_cast<double>(k) * alpha * lt);
    }
    double acc = 0.0;
    for (std::size_t k = 1; k <= d; ++k) {
        if (b[k] > 0.0) acc += std::exp(std::log(b[k]) + static_cast<double>(k) * alpha * lt - mx);
    }
    return -std::exp(alpha * lt) - static_cast<double>(d) * lt + mx + std::log(acc) + rest;
}

double gumbel_copula_loglik(const Eigen::MatrixXd& U, double theta) {
    check_uniform_matrix(U, "gumbel_copula_loglik");
    return sum_rows(U.rows(), [&](Eigen::Index r) {
        const Eigen::VectorXd row = U.row(r);
        return gumbel_copula_log_density(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), theta);
    });
}

GumbelFit fit_gumbel(const Eigen::MatrixXd& U, GumbelMethod method) {
    check_uniform_matrix(U, "fit_gumbel");
    constexpr double kLo = 1.0, kHi = 50.0;
    const int d = static_cast<int>(U.cols());
    std::function<double(double)> objective;
    std::vector<double> emp;
    if (method == GumbelMethod::MLE) {
        objective = [&](double th) { return -gumbel_copula_loglik(U, th); };
    } else {
        const auto n = static_cast<std::size_t>(U.rows());
        emp.resize(n);
        parallel_for(n, [&](std::size_t k) {
            std::size_t cnt = 0;
            for (std::size_t l = 0; l < n; ++l) {
                bool below = true;
                for (int c = 0; c < d && below; ++c) below = U(static_cast<Eigen::Index>(l), c) <= U(static_cast<Eigen::Index>(k), c);
                cnt += below ? 1 : 0;
            }
            emp[k] = static_cast<double>(cnt) / static_cast<double>(n);
        });
        objective = [&, n](double th) {
            const CopulaSpec spec = GumbelCopula(th, d);
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const Eigen::VectorXd row = U.row(static_cast<Eigen::Index>(k));
                const double c = archimedean_cdf(spec, std::span<const double>(row.data(), static_cast<std::size_t>(d)));
                s += (c - emp[k]) * (c - emp[k]);
            }
            return s;
        };
    }
    boost::uintmax_t it = 200;
    auto r = boost::math::tools::brent_find_minima(objective, kLo, kHi, 40, it);
    for (double e : {kLo, kHi}) {
        const double fe = objective(e);
        if (fe < r.second) r = {e, fe};
    }
    GumbelFit fit;
    fit.theta = r.first;
    fit.objective = method == GumbelMethod::MLE ? -r.second : r.second;
    fit.at_boundary = fit.theta - kLo < 1e-3 || kHi - fit.theta < 1e-3;
    if (!std::isfinite(fit.objective)) throw NumericError("fit_gumbel: objective is not finite");
    return fit;
}

// --- frequency / severity -------------------------------------------------------------

FreqSevFit fit_frequency_severity(std::span<const int> counts, std::span<const double> losses) {
    require(!counts.empty(), "fit_frequency_severity: no counts");
    require(losses.size() >= 2, "fit_frequency_severity: need at least two losses");
    double kbar = 0.0;
    for (int k : counts) {
        require(k >= 0, "fit_frequency_severity: counts must be nonnegative");
        kbar += k;
    }
    const double n = static_cast<double>(counts.size());
    kbar /= n;
    if (kbar == 0.0) throw DomainError("fit_frequency_severity: all counts are zero");
    double lgk1 = 0.0;
    for (int k : counts) lgk1 += std::lgamma(k + 1.0);
    auto loglik = [&](double r) {
        const double p = r / (r + kbar);
        double s = 0.0;
        for (int k : counts) s += std::lgamma(k + r);
        return s - n * std::lgamma(r) - lgk1 + n * r * std::log(p) + n * kbar * std::log1p(-p);
    };
    const double a = std::log(1e-4), b = std::log(1e6);
    boost::uintmax_t it = 300;
    auto r = boost::math::tools::brent_find_minima([&](double lr) { return -loglik(std::exp(lr)); }, a, b, 40, it);
    const double rhat = std::exp(r.first);

    std::vector<double> logs;
    logs.reserve(losses.size());
    for (double x : losses) {
        require(x > 0.0 && std::isfinite(x), "fit_frequency_severity: losses must be positive");
        logs.push_back(std::log(x));
    }
    FreqSevFit fit{NegBinomial(rhat, rhat / (rhat + kbar)), Lognormal(mean(logs), std::sqrt(variance(logs))),
                   -r.second, r.first - a < 1e-3 || b - r.first < 1e-3};
    return fit;
}

std::size_t replace_zeros_uniform(std::vector<double>& losses, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0x7a65726f);
    std::size_t replaced = 0;
    for (double& x : losses) {
        if (x == 0.0) {
            x = uniform01(rng);
            ++replaced;
        }
    }
    return replaced;
}

InverseGaussian fit_inverse_gaussian(std::span<const double> x) {
    require(x.size() >= 2, "fit_inverse_gaussian: need at least two observations");
    double mu = 0.0;
    for (double v : x) {
        require(v > 0.0 && std::isfinite(v), "fit_inverse_gaussian: observations must be positive");
        mu += v;
    }
    mu /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += 1.0 / v - 1.0 / mu;
    s /= static_cast<double>(x.size());
    if (!(s > 0.0)) throw NumericError("fit_inverse_gaussian: degenerate sample");
    return InverseGaussian(mu, 1.0 / s);
}

}  // namespace dmrisk
