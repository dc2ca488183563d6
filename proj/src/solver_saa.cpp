#include "dmrisk/solver_saa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "dmrisk/error.hpp"

namespace dmrisk {

void SAAConfig::validate() const {
    require(p > 0.0 && p < 1.0, "SAA: p must lie in (0, 1)");
    require(epsilon >= 0.0, "SAA: epsilon must be nonnegative");
    require(h > 0.0 && h <= 1.0, "SAA: grid step must lie in (0, 1]");
    require(refinement_rounds >= 0, "SAA: refinement rounds must be nonnegative");
    require(shrink > 0.0 && shrink <= 1.0, "SAA: shrink factor must lie in (0, 1]");
    require(samples >= 1, "SAA: sample size must be positive");
}

PreparedBank::PreparedBank(const ComponentSampleBank& bank)
    : m_(bank.m), K_(bank.K), N_(bank.N),
      min_(std::numeric_limits<double>::infinity()),
      max_(-std::numeric_limits<double>::infinity()) {
    require(bank.N >= 1 && bank.central.size() == bank.N, "prepared bank needs a non-empty central array");
    sorted_.resize(static_cast<std::size_t>(1 + m_ * K_));
    suffix_.resize(sorted_.size());
    sorted_[0] = bank.central;
    for (int i = 1; i <= m_; ++i) {
        for (int j = 0; j < K_; ++j) {
            if (bank.has(i, j)) sorted_[static_cast<std::size_t>(tail_index(i, j))] = bank.tail(i, j);
        }
    }
    parallel_for(sorted_.size(), [&](std::size_t c) {
        auto& v = sorted_[c];
        if (v.empty()) return;
        std::sort(v.begin(), v.end());
        auto& s = suffix_[c];
        s.assign(v.size() + 1, 0.0);
        for (std::size_t k = v.size(); k-- > 0;) s[k] = s[k + 1] + v[k];
    });
    for (const auto& v : sorted_) {
        if (v.empty()) continue;
        min_ = std::min(min_, v.front());
        max_ = std::max(max_, v.back());
    }
}

bool PreparedBank::has(int i, int j) const {
    return i >= 1 && i <= m_ && j >= 0 && j < K_ && !sorted_[static_cast<std::size_t>(tail_index(i, j))].empty();
}

double PreparedBank::cdf(int c, double u, bool strict) const {
    const auto& v = sorted_[static_cast<std::size_t>(c)];
    if (v.empty()) throw StateError("prepared bank: component not drawn");
    const auto it = strict ? std::lower_bound(v.begin(), v.end(), u) : std::upper_bound(v.begin(), v.end(), u);
    return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}

double PreparedBank::excess(int c, double u) const {
    const auto& v = sorted_[static_cast<std::size_t>(c)];
    if (v.empty()) throw StateError("prepared bank: component not drawn");
    const auto k = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), u) - v.begin());
    const double above = suffix_[static_cast<std::size_t>(c)][k] - static_cast<double>(v.size() - k) * u;
    return std::max(above, 0.0) / static_cast<double>(v.size());
}

std::vector<double> component_weights(const PreparedBank& bank, const GammaMatrix& gamma,
                                      const std::vector<double>& alpha) {
    require(gamma.K() == bank.K() && gamma.m() == bank.m(), "gamma and bank dimensions differ");
    require(static_cast<int>(alpha.size()) == bank.m() + 1, "alpha length must be m + 1");
    std::vector<double> w(static_cast<std::size_t>(1 + bank.m() * bank.K()), 0.0);
    w[0] = alpha[0];
    for (int i = 1; i <= bank.m(); ++i) {
        for (int j = 0; j < bank.K(); ++j) {
            const double x = alpha[static_cast<std::size_t>(i)] * gamma(j, i - 1);
            if (x == 0.0) continue;
            if (!bank.has(i, j)) throw StateError("gamma puts weight on a candidate missing from the bank");
            w[static_cast<std::size_t>(bank.tail_index(i, j))] = x;
        }
    }
    return w;
}

double pbar(const PreparedBank& bank, const std::vector<double>& weights, double u, bool strict) {
    double s = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (weights[c] != 0.0) s += weights[c] * bank.cdf(static_cast<int>(c), u, strict);
    }
    return s;
}

double bisect_u(const PreparedBank& bank, const std::vector<double>& weights, double p, double epsilon) {
    require(p > 0.0 && p < 1.0, "bisect_u: p must lie in (0, 1)");
    double ul = bank.min_value() - std::max(1.0, std::abs(bank.min_value()));
    double uu = bank.max_value();
    double pl = pbar(bank, weights, ul);
    double pu = pbar(bank, weights, uu);
    // Widen geometrically if rounding left p outside the initial bracket.
    for (int k = 0; pl >= p && k < 64; ++k) {
        ul -= std::ldexp(1.0, k) * std::max(1.0, std::abs(ul));
        pl = pbar(bank, weights, ul);
    }
    for (int k = 0; pu < p && k < 64; ++k) {
        uu += std::ldexp(1.0, k) * std::max(1.0, std::abs(uu));
        pu = pbar(bank, weights, uu);
    }
    if (pl >= p || pu < p) throw NumericError("bisect_u: could not bracket the first-order condition");
    for (int it = 0; it < 4096 && std::abs(pu - p) > epsilon && std::abs(pl - p) > epsilon; ++it) {
        const double um = 0.5 * (ul + uu);
        if (um <= ul || um >= uu) break;  // no representable point left in between
        const double pm = pbar(bank, weights, um);
        if (pm > p) {
            uu = um;
            pu = pm;
        } else {
            ul = um;
            pl = pm;
        }
    }
    if (std::abs(pu - p) <= epsilon) return uu;
    if (std::abs(pl - p) <= epsilon) return ul;
    return uu;
}

double saa_avar(const PreparedBank& bank, const std::vector<double>& weights, double u, double p) {
    double s = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (weights[c] != 0.0) s += weights[c] * bank.excess(static_cast<int>(c), u);
    }
    return u + s / (1.0 - p);
}

std::vector<Eigen::VectorXd> simplex_grid(int K, double h) {
    require(K >= 1, "simplex_grid: K must be positive");
    require(h > 0.0 && h <= 1.0, "simplex_grid: step must lie in (0, 1]");
    const double steps_d = 1.0 / h;
    const long steps = std::lround(steps_d);
    if (std::abs(steps_d - static_cast<double>(steps)) > 1e-9) {
        throw DomainError("simplex_grid: 1/h must be an integer");
    }
    std::vector<Eigen::VectorXd> out;
    std::vector<long> c(static_cast<std::size_t>(K), 0);
    // enumerate compositions of `steps` into K nonnegative parts
    auto rec = [&](auto&& self, int k, long left) -> void {
        if (k == K - 1) {
            c[static_cast<std::size_t>(k)] = left;
            Eigen::VectorXd v(K);
            for (int q = 0; q < K; ++q) v[q] = static_cast<double>(c[static_cast<std::size_t>(q)]) / static_cast<double>(steps);
            out.push_back(v);
            return;
        }
        for (long a = left; a >= 0; --a) {
            c[static_cast<std::size_t>(k)] = a;
            self(self, k + 1, left - a);
        }
    };
    rec(rec, 0, steps);
    return out;
}

namespace {

bool lex_less(const GammaMatrix& a, const GammaMatrix& b) {
    const auto& x = a.values();
    const auto& y = b.values();
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        for (Eigen::Index j = 0; j < x.rows(); ++j) {
            if (x(j, i) != y(j, i)) return x(j, i) < y(j, i);
        }
    }
    return false;
}

}  // namespace

SAAResult saa_search(const PreparedBank& bank, const std::vector<double>& alpha, double p,
                     const std::vector<int>& selected, const SAAConfig& cfg) {
    cfg.validate();
    require(p > 0.0 && p < 1.0, "saa_search: p must lie in (0, 1)");
    require(!selected.empty(), "saa_search: no candidates selected");
    const int K = bank.K(), m = bank.m();
    const int ks = static_cast<int>(selected.size());
    for (int j : selected) {
        require(j >= 0 && j < K, "saa_search: selected index out of range");
        for (int i = 1; i <= m; ++i) {
            if (!bank.has(i, j)) throw StateError("saa_search: bank lacks a selected candidate");
        }
    }

    SAAResult res;
    res.selected = selected;

    auto to_gamma = [&](const std::vector<const Eigen::VectorXd*>& cols) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(K, m);
        for (int i = 0; i < m; ++i) {
            for (int q = 0; q < ks; ++q) g(selected[static_cast<std::size_t>(q)], i) = (*cols[static_cast<std::size_t>(i)])[q];
        }
        return GammaMatrix(g);
    };

    auto evaluate = [&](const std::vector<std::vector<Eigen::VectorXd>>& per_col, int round) {
        std::size_t total = 1;
        for (const auto& pc : per_col) {
            if (pc.empty()) return;
            if (total > cfg.max_grid / pc.size() + 1) total = cfg.max_grid + 1;
            else total *= pc.size();
        }
        if (total > cfg.max_grid) {
            throw DomainError("SAA grid has more than " + std::to_string(cfg.max_grid) +
                              " points; use a larger grid step h or a smaller K*");
        }
        std::vector<SAAGridPoint> pts(total, SAAGridPoint{GammaMatrix::uniform(K, m), 0.0, 0.0, round});
        parallel_for(total, [&](std::size_t idx) {
            std::vector<const Eigen::VectorXd*> cols(static_cast<std::size_t>(m));
            std::size_t r = idx;
            for (int i = m - 1; i >= 0; --i) {
                const auto& pc = per_col[static_cast<std::size_t>(i)];
                cols[static_cast<std::size_t>(i)] = &pc[r % pc.size()];
                r /= pc.size();
            }
            GammaMatrix g = to_gamma(cols);
            const auto w = component_weights(bank, g, alpha);
            const double u = bisect_u(bank, w, p, cfg.epsilon);
            pts[idx] = SAAGridPoint{std::move(g), u, saa_avar(bank, w, u, p), round};
        });
        for (auto& pt : pts) {
            const bool better = res.table.empty() || pt.avar > res.best_avar ||
                                (pt.avar == res.best_avar && lex_less(pt.gamma, res.best));
            if (better) {
                res.best = pt.gamma;
                res.best_avar = pt.avar;
                res.best_u = pt.u;
            }
            res.table.push_back(std::move(pt));
        }
    };

    const auto base = simplex_grid(ks, cfg.h);
    evaluate(std::vector<std::vector<Eigen::VectorXd>>(static_cast<std::size_t>(m), base), 0);

    double step = cfg.h;
    double radius = cfg.h;
    for (int round = 1; round <= cfg.refinement_rounds; ++round) {
        step *= 0.5;
        const auto fine = simplex_grid(ks, step);
        std::vector<std::vector<Eigen::VectorXd>> per_col(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            Eigen::VectorXd centre(ks);
            for (int q = 0; q < ks; ++q) centre[q] = res.best(selected[static_cast<std::size_t>(q)], i);
            for (const auto& v : fine) {
                if ((v - centre).cwiseAbs().maxCoeff() <= radius + 1e-12) per_col[static_cast<std::size_t>(i)].push_back(v);
            }
        }
        evaluate(per_col, round);
        radius *= cfg.shrink;
    }
    return res;
}

void write_grid_csv(const SAAResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path);
    out.precision(12);
    out << "round";
    const int m = result.best.m();
    for (int i = 1; i <= m; ++i) {
        for (int j : result.selected) out << ",gamma_" << (j + 1) << "_" << i;
    }
    out << ",u,avar\n";
    for (const auto& pt : result.table) {
        out << pt.round;
        for (int i = 0; i < m; ++i) {
            for (int j : result.selected) out << "," << pt.gamma(j, i);
        }
        out << "," << pt.u << "," << pt.avar << "\n";
    }
}

}  // namespace dmrisk
