#include "dmrisk/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "dmrisk/error.hpp"
#include "dmrisk/stats.hpp"

namespace dmrisk {

double DensityTable::integral() const {
    if (values.size() < 2) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) s += 0.5 * (values[k] + values[k + 1]);
    return s * step;
}

DensityTable fit_kde(std::span<const double> samples, std::size_t G, double bandwidth) {
    require(samples.size() >= 100, "fit_kde needs at least 100 samples");
    require(G >= 2, "fit_kde needs at least 2 grid points");
    const auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
    const double mn = *mn_it, mx = *mx_it;
    const double n = static_cast<double>(samples.size());
    const double sd = std::sqrt(variance(samples));
    if (!(sd > 0.0) || mx == mn) throw DomainError("fit_kde: degenerate sample with zero variance");
    const double h = bandwidth > 0.0 ? bandwidth : 1.06 * sd * std::pow(n, -0.2);

    DensityTable t;
    t.bandwidth = h;
    t.sample_size = samples.size();
    t.lo = mn - 3.0 * h;
    t.step = (mx + 3.0 * h - t.lo) / static_cast<double>(G - 1);

    // Linear binning.
    std::vector<double> counts(G, 0.0);
    for (double x : samples) {
        const double pos = (x - t.lo) / t.step;
        auto k = static_cast<std::size_t>(pos);
        if (k >= G - 1) k = G - 2;
        const double frac = std::clamp(pos - static_cast<double>(k), 0.0, 1.0);
        counts[k] += 1.0 - frac;
        counts[k + 1] += frac;
    }

    // Discrete Gaussian kernel normalized to unit mass, truncated at 5h.
    const auto half = static_cast<std::size_t>(std::min<double>(std::ceil(5.0 * h / t.step), static_cast<double>(G)));
    std::vector<double> kernel(half + 1);
    double mass = 0.0;
    for (std::size_t k = 0; k <= half; ++k) {
        const double z = static_cast<double>(k) * t.step / h;
        kernel[k] = std::exp(-0.5 * z * z);
        mass += (k == 0 ? 1.0 : 2.0) * kernel[k];
    }
    for (double& w : kernel) w /= mass;

    t.values.assign(G, 0.0);
    for (std::size_t k = 0; k < G; ++k) {
        if (counts[k] == 0.0) continue;
        const std::size_t a = k >= half ? k - half : 0;
        const std::size_t b = std::min(G - 1, k + half);
        for (std::size_t q = a; q <= b; ++q) {
            const std::size_t off = q > k ? q - k : k - q;
            t.values[q] += counts[k] * kernel[off];
        }
    }
    const double scale = 1.0 / (n * t.step);
    for (double& v : t.values) v = std::max(v * scale, kDensityFloor);
    return t;
}

double eval_density(const DensityTable& table, double x) {
    if (table.values.empty()) return kDensityFloor;
    if (!(x >= table.lo) || x > table.hi()) return kDensityFloor;
    const double pos = (x - table.lo) / table.step;
    auto k = static_cast<std::size_t>(pos);
    if (k >= table.values.size() - 1) return table.values.back();
    const double frac = pos - static_cast<double>(k);
    return table.values[k] + frac * (table.values[k + 1] - table.values[k]);
}

void write_density_csv(const DensityTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path);
    out << "x,density\n";
    out.precision(17);
    for (std::size_t k = 0; k < table.size(); ++k) out << table.grid(k) << "," << table.values[k] << "\n";
}

}  // namespace dmrisk
