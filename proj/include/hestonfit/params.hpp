#pragma once

#include <cmath>
#include <string>

#include "hestonfit/errors.hpp"

namespace hestonfit {

// Model parameters. All rates are per trading day; time lags are integer
// day counts, so gamma ~ 1/days, theta ~ variance/day, k ~ variance noise.
struct HestonParams {
    double gamma = 0.0;  // relaxation rate of the variance mean (> 0)
    double theta = 0.0;  // long-time mean variance (> 0)
    double k = 0.0;      // variance noise (> 0)
    double mu = 0.0;     // market trend
    double rho = 0.0;    // correlation of the two Wieners, in [-1, 1]

    bool is_valid() const {
        return std::isfinite(gamma) && gamma > 0.0 &&
               std::isfinite(theta) && theta > 0.0 &&
               std::isfinite(k) && k > 0.0 &&
               std::isfinite(mu) &&
               std::isfinite(rho) && std::abs(rho) <= 1.0;
    }

    void validate() const {
        if (!is_valid())
            throw DomainError("HestonParams: require gamma>0, theta>0, k>0, |rho|<=1, all finite");
    }

    /// 2*gamma*theta/k^2. Recorded as a diagnostic, not enforced: the scheme
    /// and the closed form are defined either side of the Feller boundary.
    double feller_ratio() const { return 2.0 * gamma * theta / (k * k); }
};

struct TimeLag {
    int tau = 1;  // positive count of trading days

    TimeLag() = default;
    explicit TimeLag(int t) : tau(t) { validate(); }

    void validate() const {
        if (tau < 1) throw DomainError("TimeLag: tau must be >= 1, got " + std::to_string(tau));
    }

    double days() const { return static_cast<double>(tau); }
};

} // namespace hestonfit
