#include "dmrisk/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dmrisk/error.hpp"

namespace dmrisk {

namespace {

void check_weights(const std::vector<double>& w) {
    require(w.size() >= 1, "distortion weights must be non-empty");
    double s = 0.0;
    for (double a : w) {
        require(a >= 0.0 && std::isfinite(a), "distortion weights must be nonnegative");
        s += a;
    }
    require(std::abs(s - 1.0) <= 1e-12, "distortion weights must sum to 1");
}

}  // namespace

DistortionSet::DistortionSet(Family f, std::vector<double> weights)
    : family_(f), weights_(std::move(weights)) {
    check_weights(weights_);
}

DistortionSet DistortionSet::identity(std::vector<double> weights) {
    return DistortionSet(Family::Identity, std::move(weights));
}

DistortionSet DistortionSet::smooth(double a) {
    require(a > 0.0 && a < 0.5, "smooth distortion requires 0 < alpha < 0.5");
    return DistortionSet(Family::Smooth, {1.0 - 2.0 * a, a, a});
}

DistortionSet DistortionSet::region(std::vector<double> weights) {
    DistortionSet s(Family::Region, std::move(weights));
    for (double a : s.weights_) require(a > 0.0, "region distortion weights must be positive");
    s.starts_.resize(s.weights_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < s.weights_.size(); ++i) {
        s.starts_[i] = acc;
        acc += s.weights_[i];
    }
    return s;
}

double DistortionSet::eval(int i, double v) const {
    require(i >= 0 && i <= m(), "distortion index out of range");
    require(v >= 0.0 && v <= 1.0, "distortion argument must lie in [0, 1]");
    if (v == 0.0 || v == 1.0) return v;
    switch (family_) {
        case Family::Identity:
            return v;
        case Family::Smooth: {
            const double a = weights_[1];
            const double d1 = (v - a * v * v) / (a + (1.0 - 2.0 * a) * v);
            const double d2 = a * v * v / (a + (1.0 - 2.0 * a) * (1.0 - v));
            if (i == 1) return d1;
            if (i == 2) return d2;
            return std::clamp((v - a * d1 - a * d2) / (1.0 - 2.0 * a), 0.0, 1.0);
        }
        case Family::Region: {
            const double x = (v - starts_[static_cast<std::size_t>(i)]) / weights_[static_cast<std::size_t>(i)];
            return std::clamp(x, 0.0, 1.0);
        }
    }
    return v;
}

double DistortionSet::smooth_d0_inverse(double y) const {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (eval(0, mid) >= y) hi = mid; else lo = mid;
    }
    return hi;
}

double DistortionSet::inverse(int i, double y) const {
    require(i >= 0 && i <= m(), "distortion index out of range");
    require(y >= 0.0 && y <= 1.0, "distortion argument must lie in [0, 1]");
    switch (family_) {
        case Family::Identity:
            return y;
        case Family::Smooth: {
            const double a = weights_[1];
            if (i == 1) {
                const double b = 1.0 - y * (1.0 - 2.0 * a);
                const double disc = std::max(b * b - 4.0 * a * a * y, 0.0);
                // rationalized root avoids cancellation for small y
                return std::clamp(2.0 * a * y / (b + std::sqrt(disc)), 0.0, 1.0);
            }
            if (i == 2) {
                const double c = y * (1.0 - 2.0 * a);
                const double disc = c * c + 4.0 * a * y * (1.0 - a);
                return std::clamp((-c + std::sqrt(disc)) / (2.0 * a), 0.0, 1.0);
            }
            return smooth_d0_inverse(y);
        }
        case Family::Region: {
            const auto k = static_cast<std::size_t>(i);
            return std::clamp(starts_[k] + weights_[k] * y, 0.0, 1.0);
        }
    }
    return y;
}

double DistortionSet::identity_error(int grid_points) const {
    double worst = 0.0;
    for (int g = 0; g < grid_points; ++g) {
        const double v = static_cast<double>(g) / static_cast<double>(grid_points - 1);
        double s = 0.0;
        for (int i = 0; i <= m(); ++i) s += weights_[static_cast<std::size_t>(i)] * eval(i, v);
        worst = std::max(worst, std::abs(s - v));
    }
    return worst;
}

std::string DistortionSet::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::Identity: os << "identity"; break;
        case Family::Smooth: os << "smooth"; break;
        case Family::Region: os << "region"; break;
    }
    os << "(";
    for (std::size_t i = 0; i < weights_.size(); ++i) os << (i ? ", " : "") << weights_[i];
    os << ")";
    return os.str();
}

}  // namespace dmrisk
