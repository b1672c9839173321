#pragma once

#include <cmath>

#include "ewens_spectra/errors.hpp"

namespace ewens {

// Strictly positive intensity parameter shared by every sampler.
class ThetaParam {
public:
    explicit ThetaParam(double theta) : theta_(theta) {
        if (!(theta > 0.0) || !std::isfinite(theta))
            throw ConfigInvalid("theta must be a finite positive real");
    }

    double value() const { return theta_; }

    // Smallest r in (0,1) with E(y_j) <= r^j for every stick index j:
    // E(y_j) = (theta/(theta+1))^(j-1) / (theta+1), so r is the larger of the
    // two geometric factors.
    double derived_r() const {
        return std::max(theta_ / (theta_ + 1.0), 1.0 / (theta_ + 1.0));
    }

    // E(y_j) for Beta(theta,1) stick breaking.
    double stick_mean(int j) const {
        return std::pow(theta_ / (theta_ + 1.0), j - 1) / (theta_ + 1.0);
    }

private:
    double theta_;
};

} // namespace ewens
