#include "dmrisk/importance_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dmrisk/error.hpp"
#include "dmrisk/random.hpp"
#include "dmrisk/stats.hpp"

namespace dmrisk {

bool ISSpec::active() const {
    const bool t = tilt_marginals && std::any_of(tilt.begin(), tilt.end(), [](double w) { return w != 0.0; });
    const bool s = shift_central && shift.size() > 0 && shift.cwiseAbs().maxCoeff() > 0.0;
    return t || s;
}

InverseGaussian esscher_ig(double mu, double lambda, double w) {
    const InverseGaussian base(mu, lambda);
    if (w == 0.0) return base;
    const double bound = lambda / (2.0 * mu * mu);
    if (!(w <= bound)) {
        throw DomainError("Esscher tilt w = " + std::to_string(w) + " exceeds lambda/(2 mu^2) = " +
                          std::to_string(bound));
    }
    const double den = lambda - 2.0 * mu * mu * w;
    if (!(den > 0.0)) throw DomainError("Esscher tilt at the boundary gives an infinite mean");
    return InverseGaussian(mu * std::sqrt(lambda) / std::sqrt(den), lambda);
}

DMSpec is_spec(const DMSpec& spec, const ISSpec& is) {
    spec.validate();
    DMSpec out = spec;
    if (is.tilt_marginals && !is.tilt.empty()) {
        require(static_cast<int>(is.tilt.size()) == spec.d(), "IS tilt vector length must equal d");
        for (int i = 0; i < spec.d(); ++i) {
            const double w = is.tilt[static_cast<std::size_t>(i)];
            if (w == 0.0) continue;
            const auto* ig = std::get_if<InverseGaussian>(&spec.marginals[static_cast<std::size_t>(i)]);
            if (ig == nullptr) throw DomainError("Esscher tilt applies only to inverse Gaussian marginals");
            out.marginals[static_cast<std::size_t>(i)] = esscher_ig(ig->mu, ig->lambda, w);
        }
    }
    if (is.shift_central && is.shift.size() > 0) {
        require(is.shift.size() == spec.d(), "IS shift vector length must equal d");
        const auto* g = std::get_if<GaussianCopula>(&spec.central);
        if (g == nullptr) throw DomainError("mean shift requires a Gaussian central copula");
        out.central = ShiftedGaussianCopula(g->P, is.shift);
    }
    return out;
}

ISSample is_sample(const DMSpec& spec, const ISSpec& is, const GammaMatrix& gamma,
                   const ComponentDensities& f_dens, const ComponentDensities& h_dens,
                   std::size_t n, std::uint64_t seed) {
    const DMSpec hs = is_spec(spec, is);
    ISSample s;
    s.losses = dm_losses(hs, gamma, n, seed);
    s.log_ratio.resize(n);
    const auto& alpha = spec.distortions.weights();
    std::vector<std::size_t> floored(n / kChunkSize + 1, 0);
    parallel_chunks(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        std::size_t hits = 0;
        for (std::size_t l = begin; l < end; ++l) {
            const double y = s.losses[l];
            const double f = f_dens.mixture(gamma, alpha, y);
            const double h = h_dens.mixture(gamma, alpha, y);
            if (h <= 2.0 * kDensityFloor) ++hits;
            s.log_ratio[l] = std::log(f) - std::log(h);
        }
        floored[chunk] = hits;
    });
    const auto hits = std::accumulate(floored.begin(), floored.end(), std::size_t{0});
    s.floor_fraction = n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
    return s;
}

ISEstimate is_var_avar_gradient(std::span<const double> losses, std::span<const double> log_ratio,
                                const ComponentDensities& f_dens, const GammaMatrix& gamma,
                                std::span<const double> alpha, double p) {
    require(p > 0.0 && p < 1.0, "IS estimator: p must lie in (0, 1)");
    require(!losses.empty() && losses.size() == log_ratio.size(), "IS estimator: inputs must be aligned and non-empty");
    const std::size_t n = losses.size();
    const double N = static_cast<double>(n);
    std::vector<double> lr(n);
    for (std::size_t l = 0; l < n; ++l) {
        lr[l] = std::exp(log_ratio[l]);
        if (!std::isfinite(lr[l]) || !std::isfinite(losses[l])) throw NumericError("IS estimator: non-finite input");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return losses[a] < losses[b] || (losses[a] == losses[b] && a < b);
    });
    double cum = 0.0;
    double var = 0.0;
    bool found = false;
    for (std::size_t k = 0; k < n; ++k) {
        cum += lr[order[k]];
        // the ECDF only steps at the last copy of a tied value
        if (k + 1 < n && losses[order[k + 1]] == losses[order[k]]) continue;
        if (cum >= p * N - 1e-9) {
            var = losses[order[k]];
            found = true;
            break;
        }
    }
    if (!found) throw NumericError("IS estimator: weighted CDF reaches only " + std::to_string(cum / N) + " < p");
    double tail = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        if (losses[l] > var) tail += (losses[l] - var) * lr[l];
    }
    ISEstimate e;
    e.var = var;
    e.avar = var + tail / (N * (1.0 - p));
    e.gradient = lr_gradient(losses, var, f_dens, gamma, alpha, p, lr);
    return e;
}

ComponentDensities fit_is_densities(const DMSpec& spec, const ISSpec& is, std::size_t bank_size,
                                    std::size_t grid_points, std::uint64_t seed, double bandwidth) {
    const DMSpec hs = is_spec(spec, is);
    return fit_component_densities(component_losses(hs, bank_size, seed), grid_points, bandwidth);
}

ISComparison is_compare(const DMSpec& spec, const ISSpec& is, const GammaMatrix& gamma,
                        const ComponentDensities& f_dens, const ComponentDensities& h_dens, double p,
                        std::size_t n, int replications, std::uint64_t seed) {
    require(replications >= 2, "is_compare: need at least two replications");
    ISComparison c;
    const auto& alpha = spec.distortions.weights();
    for (int r = 0; r < replications; ++r) {
        const auto rs = derive_seed(seed, 0x697363, static_cast<std::uint64_t>(r));
        const auto crude = dm_losses(spec, gamma, n, rs);
        c.crude.push_back(empirical_var_avar(crude, p).avar);
        const auto s = is_sample(spec, is, gamma, f_dens, h_dens, n, rs);
        c.max_floor_fraction = std::max(c.max_floor_fraction, s.floor_fraction);
        c.is.push_back(is_var_avar_gradient(s.losses, s.log_ratio, f_dens, gamma, alpha, p).avar);
    }
    c.crude_variance = variance(c.crude);
    c.is_variance = variance(c.is);
    c.ratio = c.is_variance > 0.0 ? c.crude_variance / c.is_variance : std::numeric_limits<double>::infinity();
    return c;
}

}  // namespace dmrisk
