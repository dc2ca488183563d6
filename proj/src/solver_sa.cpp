#include "dmrisk/solver_sa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "dmrisk/error.hpp"

namespace dmrisk {

void SAConfig::validate() const {
    require(p > 0.0 && p < 1.0, "SA: p must lie in (0, 1)");
    require(a > 0.5 && a <= 1.0, "SA: step exponent a must lie in (0.5, 1]");
    require(samples >= 2, "SA: per-iteration sample size must be at least 2");
    require(t_min >= 1 && t_max >= t_min, "SA: need 1 <= t_min <= t_max");
    require(threshold >= 0.0, "SA: threshold must be nonnegative");
    require(kde_points >= 2 && kde_samples >= 100, "SA: KDE needs >= 2 points and >= 100 samples");
}

namespace {

std::size_t order_index(std::size_t n, double p) {
    const double np = static_cast<double>(n) * p;
    double k = std::ceil(np);
    // N p that is an integer up to rounding is treated as that integer
    if (k - np > 1.0 - 1e-9) k -= 1.0;
    return static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(n)));
}

}  // namespace

VarAvar empirical_var_avar(std::span<const double> losses, double p) {
    require(losses.size() >= 2, "empirical_var_avar needs at least two losses");
    require(p > 0.0 && p < 1.0, "empirical_var_avar: p must lie in (0, 1)");
    std::vector<double> v(losses.begin(), losses.end());
    const std::size_t k = order_index(v.size(), p) - 1;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    const double var = v[k];
    double excess = 0.0;
    for (double x : losses) excess += std::max(x - var, 0.0);
    const double avar = var + excess / (static_cast<double>(losses.size()) * (1.0 - p));
    return {var, avar};
}

const DensityTable& ComponentDensities::tail(int i, int j) const {
    require(i >= 1 && i <= m && j >= 0 && j < K, "density index out of range");
    const auto& t = tails[static_cast<std::size_t>((i - 1) * K + j)];
    if (t.values.empty()) throw StateError("density table for this component was not fitted");
    return t;
}

double ComponentDensities::mixture(const GammaMatrix& gamma, std::span<const double> alpha, double x) const {
    double f = alpha[0] * eval_density(central, x);
    for (int i = 1; i <= m; ++i) {
        for (int j = 0; j < K; ++j) {
            const double w = alpha[static_cast<std::size_t>(i)] * gamma(j, i - 1);
            if (w != 0.0) f += w * eval_density(tail(i, j), x);
        }
    }
    return f;
}

ComponentDensities fit_component_densities(const ComponentSampleBank& bank, std::size_t G, double bandwidth) {
    ComponentDensities d;
    d.m = bank.m;
    d.K = bank.K;
    d.central = fit_kde(bank.central, G, bandwidth);
    d.tails.resize(bank.tails.size());
    parallel_for(bank.tails.size(), [&](std::size_t k) {
        if (!bank.tails[k].empty()) d.tails[k] = fit_kde(bank.tails[k], G, bandwidth);
    });
    return d;
}

Eigen::MatrixXd lr_gradient(std::span<const double> losses, double v, const ComponentDensities& dens,
                            const GammaMatrix& gamma, std::span<const double> alpha, double p,
                            std::span<const double> weights) {
    const int m = dens.m, K = dens.K;
    if (m == 0 || dens.central.values.empty()) throw StateError("lr_gradient: density tables missing");
    require(gamma.K() == K && gamma.m() == m, "lr_gradient: gamma dimension mismatch");
    require(static_cast<int>(alpha.size()) == m + 1, "lr_gradient: alpha length must be m + 1");
    require(weights.empty() || weights.size() == losses.size(), "lr_gradient: weight length mismatch");
    require(std::isfinite(v), "lr_gradient: VaR must be finite");
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(m, K);
    std::vector<double> g(static_cast<std::size_t>(m * K));
    for (std::size_t l = 0; l < losses.size(); ++l) {
        const double x = losses[l];
        if (!(x >= v)) continue;
        const double excess = (x - v) * (weights.empty() ? 1.0 : weights[l]);
        if (excess == 0.0) continue;
        double f = alpha[0] * eval_density(dens.central, x);
        for (int i = 1; i <= m; ++i) {
            for (int j = 0; j < K; ++j) {
                const double gij = eval_density(dens.tail(i, j), x);
                g[static_cast<std::size_t>((i - 1) * K + j)] = gij;
                f += alpha[static_cast<std::size_t>(i)] * gamma(j, i - 1) * gij;
            }
        }
        for (int i = 1; i <= m; ++i) {
            for (int j = 0; j < K; ++j) {
                grad(i - 1, j) += alpha[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>((i - 1) * K + j)] / f * excess;
            }
        }
    }
    return grad / (static_cast<double>(losses.size()) * (1.0 - p));
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& y) {
    const Eigen::Index K = y.size();
    require(K >= 1, "project_simplex: empty vector");
    for (Eigen::Index k = 0; k < K; ++k) require(std::isfinite(y[k]), "project_simplex: non-finite input");
    std::vector<double> u(y.data(), y.data() + K);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, lambda = 0.0;
    for (Eigen::Index j = 0; j < K; ++j) {
        cum += u[static_cast<std::size_t>(j)];
        const double cand = (1.0 - cum) / static_cast<double>(j + 1);
        if (u[static_cast<std::size_t>(j)] + cand > 0.0) lambda = cand;
    }
    Eigen::VectorXd x = (y.array() + lambda).max(0.0);
    const double s = x.sum();
    if (s > 0.0) x /= s;
    return x;
}

double SATrace::avar_sd(int window) const {
    const int n = static_cast<int>(iterations.size());
    const int w = std::min(window, n);
    if (w < 2) return 0.0;
    double mean = 0.0;
    for (int k = n - w; k < n; ++k) mean += iterations[static_cast<std::size_t>(k)].avar;
    mean /= w;
    double ss = 0.0;
    for (int k = n - w; k < n; ++k) {
        const double d = iterations[static_cast<std::size_t>(k)].avar - mean;
        ss += d * d;
    }
    return std::sqrt(ss / (w - 1));
}

SATrace sa_solve(const DMSpec& spec, const SAConfig& cfg, const GammaMatrix& init,
                 const ComponentDensities& dens) {
    cfg.validate();
    spec.validate();
    if (dens.central.values.empty() || dens.m != spec.m() || dens.K != spec.K()) {
        throw StateError("sa_solve: component densities missing or inconsistent with the specification");
    }
    require(init.K() == spec.K() && init.m() == spec.m(), "sa_solve: initial gamma dimension mismatch");
    const std::vector<double>& alpha = spec.distortions.weights();
    SATrace trace;
    GammaMatrix gamma = init;
    for (int t = 1; t <= cfg.t_max; ++t) {
        const auto losses = dm_losses(spec, gamma, cfg.samples, derive_seed(cfg.seed, 0x5341, static_cast<std::uint64_t>(t)));
        const VarAvar vc = empirical_var_avar(losses, cfg.p);
        Eigen::MatrixXd grad = lr_gradient(losses, vc.var, dens, gamma, alpha, cfg.p);
        trace.iterations.push_back({t, gamma, vc.var, vc.avar, grad});
        if (t >= cfg.t_min && t >= 2) {
            const auto& prev = trace.iterations[trace.iterations.size() - 2].gamma;
            if (gamma.l1_distance(prev) < cfg.threshold) {
                trace.converged = true;
                trace.t_star = t;
                return trace;
            }
        }
        if (t == cfg.t_max) break;
        const double step = std::pow(static_cast<double>(t), -cfg.a);
        Eigen::MatrixXd next(spec.K(), spec.m());
        for (int i = 0; i < spec.m(); ++i) {
            next.col(i) = project_simplex(gamma.column(i) + step * grad.row(i).transpose());
        }
        gamma = GammaMatrix(next);
    }
    trace.t_star = cfg.t_max;
    return trace;
}

std::vector<int> select_copulas(const GammaMatrix& gamma, const Eigen::MatrixXd& gradient, int k_star) {
    const int K = gamma.K(), m = gamma.m();
    require(k_star >= 1, "select_copulas: K* must be at least 1");
    if (k_star > K) throw DomainError("select_copulas: K* exceeds the number of candidates");
    require(gradient.size() == 0 || (gradient.rows() == m && gradient.cols() == K),
            "select_copulas: gradient must be m x K");
    auto grad = [&](int j, int i) { return gradient.size() == 0 ? 0.0 : gradient(i, j); };
    std::vector<double> row_sum(static_cast<std::size_t>(K));
    for (int j = 0; j < K; ++j) row_sum[static_cast<std::size_t>(j)] = gamma.values().row(j).sum();

    std::vector<bool> row_active(static_cast<std::size_t>(K), true);
    std::vector<bool> col_active(static_cast<std::size_t>(m), true);
    std::vector<int> selected;
    constexpr double tie = 1e-12;
    while (static_cast<int>(selected.size()) < k_star) {
        if (std::none_of(col_active.begin(), col_active.end(), [](bool b) { return b; })) {
            std::fill(col_active.begin(), col_active.end(), true);
        }
        int bj = -1, bi = -1;
        for (int i = 0; i < m; ++i) {
            if (!col_active[static_cast<std::size_t>(i)]) continue;
            for (int j = 0; j < K; ++j) {
                if (!row_active[static_cast<std::size_t>(j)]) continue;
                if (bj < 0) {
                    bj = j;
                    bi = i;
                    continue;
                }
                const double a = gamma(j, i), b = gamma(bj, bi);
                bool better = a > b + tie;
                if (!better && std::abs(a - b) <= tie) {
                    const double ga = grad(j, i), gb = grad(bj, bi);
                    if (ga > gb + tie) {
                        better = true;
                    } else if (std::abs(ga - gb) <= tie) {
                        const double ra = row_sum[static_cast<std::size_t>(j)];
                        const double rb = row_sum[static_cast<std::size_t>(bj)];
                        better = ra > rb + tie || (std::abs(ra - rb) <= tie && j < bj);
                    }
                }
                if (better) {
                    bj = j;
                    bi = i;
                }
            }
        }
        selected.push_back(bj);
        row_active[static_cast<std::size_t>(bj)] = false;
        col_active[static_cast<std::size_t>(bi)] = false;
    }
    return selected;
}

void write_trace_csv(const SATrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path);
    out.precision(12);
    if (trace.iterations.empty()) return;
    const int K = trace.iterations.front().gamma.K();
    const int m = trace.iterations.front().gamma.m();
    out << "t,avar,var";
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= K; ++j) out << ",gamma_" << j << "_" << i;
    }
    out << "\n";
    for (const auto& it : trace.iterations) {
        out << it.t << "," << it.avar << "," << it.var;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < K; ++j) out << "," << it.gamma(j, i);
        }
        out << "\n";
    }
}

}  // namespace dmrisk
