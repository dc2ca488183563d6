#pragma once

#include <span>
#include <string>
#include <vector>

namespace dmrisk {

inline constexpr double kDensityFloor = 1e-12;

/// Density values on an equally spaced grid.
struct DensityTable {
    double lo = 0.0;
    double step = 0.0;
    std::vector<double> values;
    double bandwidth = 0.0;
    std::size_t sample_size = 0;

    std::size_t size() const { return values.size(); }
    double hi() const { return lo + step * static_cast<double>(values.size() - 1); }
    double grid(std::size_t k) const { return lo + step * static_cast<double>(k); }
    /// Trapezoid integral over the grid.
    double integral() const;
};

/// Gaussian-kernel density on G points spanning [min - 3h, max + 3h] with
/// Silverman's bandwidth h = 1.06 sd n^{-1/5} unless bandwidth > 0 is given.
/// Samples are linearly binned onto the grid before smoothing.
DensityTable fit_kde(std::span<const double> samples, std::size_t G, double bandwidth = 0.0);

/// Linear interpolation inside the grid, kDensityFloor outside.
double eval_density(const DensityTable& table, double x);

void write_density_csv(const DensityTable& table, const std::string& path);

}  // namespace dmrisk
