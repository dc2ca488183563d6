#pragma once

#include <string>
#include <vector>

namespace dmrisk {

/// Distortions D_0..D_m (shared by all coordinates) together with the mixing
/// weights alpha_0..alpha_m.
class DistortionSet {
public:
    enum class Family {
        Identity,  // D_i(v) = v
        Smooth,    // rational family with alpha_1 = alpha_2 = a, alpha_0 = 1 - 2a
        Region,    // piecewise linear, D_i uniform on its own sub-interval of [0,1]
    };

    static DistortionSet identity(std::vector<double> weights);
    static DistortionSet smooth(double a);
    static DistortionSet region(std::vector<double> weights);

    Family family() const { return family_; }
    /// Number of tail components m (weights has m+1 entries).
    int m() const { return static_cast<int>(weights_.size()) - 1; }
    const std::vector<double>& weights() const { return weights_; }
    double weight(int i) const { return weights_.at(static_cast<std::size_t>(i)); }

    double eval(int i, double v) const;
    /// inf{x : D_i(x) >= y}. On flat segments this is the left end of the
    /// preimage interval.
    double inverse(int i, double y) const;

    /// max over a grid of |sum_i alpha_i D_i(v) - v|.
    double identity_error(int grid_points = 10'000) const;

    std::string describe() const;

private:
    DistortionSet(Family f, std::vector<double> weights);

    double smooth_d0_inverse(double y) const;

    Family family_;
    std::vector<double> weights_;
    std::vector<double> starts_;  // region family: left end of each sub-interval
};

}  // namespace dmrisk
