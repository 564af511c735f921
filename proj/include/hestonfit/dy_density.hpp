#pragma once

#include <complex>
#include <memory>
#include <mutex>
#include <vector>

#include "hestonfit/params.hpp"

namespace hestonfit {

/// The closed-form log-characteristic function has a middle logarithm term
/// that vanishes identically for rho = 0. ThreeTerm evaluates it as printed;
/// OneTerm drops it (the two agree exactly at rho = 0).
enum class FtVariant { ThreeTerm, OneTerm };

/// Log-characteristic function F_t(p) = log E[exp(-i p x_t)] of the centred
/// log-return at lag t. Evaluated in a cancellation-safe log-space form: no
/// cosh/sinh overflow for large |Omega|*t, and accurate down to k -> 0.
/// F_t(0) = 0 exactly; F_t(-p) = conj(F_t(p)).
std::complex<double> characteristic_exponent(const HestonParams& params, TimeLag tau,
                                             double p, FtVariant variant = FtVariant::ThreeTerm);

struct QuadratureConfig {
    double rel_tol = 1e-8;    // stop when successive nested estimates agree to this
    double cf_floor = 1e-16;  // grow the truncation point until |e^F| is below this
    double abs_floor = 1e-15; // absolute convergence floor for far-tail densities
    int min_level = 5;        // first nested level: 2^5 intervals
    int max_level = 18;       // refinement budget: 2^18 intervals
};

struct GridConfig {
    int cells = 4096;        // CDF grid cells (cells+1 pdf evaluations)
    double tail_mass = 1e-8; // residual tail-mass bound when extending the window
    double max_sigmas = 30.0;
};

/// Density of centred log-returns by Fourier inversion of exp(F_t(p)),
///   pdf(x) = (1/pi) * Int_0^inf Re[exp(i p x + F_t(p))] dp,
/// with a lazily grown node cache shared across evaluation points, and a
/// tabulated CDF grid for cdf/quantile. Thread-safe: caches are guarded
/// per instance; all methods are const.
class DyDensity {
public:
    DyDensity(const HestonParams& params, TimeLag tau,
              FtVariant variant = FtVariant::ThreeTerm,
              QuadratureConfig quad = {}, GridConfig grid = {});
    ~DyDensity();

    DyDensity(const DyDensity&) = delete;
    DyDensity& operator=(const DyDensity&) = delete;

    /// Throws NumericError if nested refinement fails to converge.
    double pdf(double x) const;

    /// Cumulative probability from the (truncated) lower tail; monotone,
    /// limits 0 and 1 within the truncation bound. Not renormalized.
    double cdf(double x) const;

    /// x with cdf(x) = q, solved on the cached grid to 1e-9 in probability
    /// units. Throws DomainError unless 0 < q < 1.
    double quantile(double q) const;

    // Moments from derivatives of F at p = 0 (finite differences).
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    double excess_kurtosis() const { return kurt4_ / (variance_ * variance_); }

    /// Integral of the pdf over the evaluation window; 1 within ~1e-6.
    double total_mass() const;
    double window_lo() const;
    double window_hi() const;

    /// Principal-branch continuity monitor: count of detected Omega jumps
    /// between adjacent quadrature nodes (expected 0; a nonzero count makes
    /// evaluations throw NumericError).
    long branch_flips() const;

    const HestonParams& params() const { return params_; }
    TimeLag lag() const { return tau_; }

private:
    struct Impl;

    double pdf_locked(double x) const;  // requires cf mutex held
    void ensure_grid() const;

    HestonParams params_;
    TimeLag tau_;
    FtVariant variant_;
    QuadratureConfig quad_;
    GridConfig gridcfg_;
    double p_max_ = 0.0;
    double mean_ = 0.0, variance_ = 0.0, kurt4_ = 0.0;
    std::unique_ptr<Impl> impl_;
};

} // namespace hestonfit
