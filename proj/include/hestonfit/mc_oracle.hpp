#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hestonfit/params.hpp"

namespace hestonfit {

/// Euler full-truncation simulation of the centred log-return / variance
/// system. v0 fixed, or (default) drawn per path from the stationary variance
/// law so the terminal sample marginalizes the initial variance, matching the
/// closed-form density.
struct SimConfig {
    HestonParams params;
    TimeLag horizon{1};
    double dt = 1e-3;               // in time-lag units (trading days)
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    std::optional<double> v0;       // fixed initial variance; nullopt = stationary draw
    int threads = 0;                // 0 = hardware concurrency

    void validate() const;
    std::size_t n_steps() const;
};

struct SimResult {
    std::vector<double> returns;    // terminal centred log-return per path
    std::size_t clamp_count = 0;    // times the variance was clamped at 0
};

/// Deterministic for a fixed config (counter-based draws keyed by
/// (seed, path, step), independent of thread scheduling).
SimResult simulate_returns(const SimConfig& config);

/// Variance recursion alone: burn-in from theta, then n draws thinned by
/// ~3 relaxation times so they are close to independent.
std::vector<double> stationary_variance_sample(const HestonParams& params,
                                               std::size_t burn_in_steps, std::size_t n,
                                               double dt, std::uint64_t seed);

/// Exact draw from the stationary variance law Gamma(2*gamma*theta/k^2,
/// k^2/(2*gamma)) by inverse CDF; u in (0, 1).
double stationary_variance_quantile(const HestonParams& params, double u);

} // namespace hestonfit
