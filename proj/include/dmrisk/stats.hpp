#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dmrisk {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);

/// Kendall's tau-b in O(n log n) (Knight's merge-sort algorithm).
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// One-sample Kolmogorov-Smirnov statistic sup|F_n - F|.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Two-sample KS statistic sup|F_n - G_m|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic critical values (c(alpha) = sqrt(-log(alpha/2)/2)).
double ks_critical(std::size_t n, double level = 0.01);
double ks_critical_two_sample(std::size_t n, std::size_t m, double level = 0.01);

/// Pseudo-observations rank/(n+1), ties broken by position.
std::vector<double> pseudo_observations(std::span<const double> x);

}  // namespace dmrisk
