#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hestonfit/density_model.hpp"
#include "hestonfit/params.hpp"

namespace hestonfit {

/// Equal-width histogram of a return sample, normalized to a density.
/// Empty bins are retained with density 0.
struct EmpiricalPdf {
    TimeLag tau;
    std::vector<double> centers;
    std::vector<double> densities;     // count / (N * width)
    std::vector<std::size_t> counts;
    double width = 0.0;
    std::size_t n_total = 0;
};

struct BinRule {
    // 0 = Freedman-Diaconis (2*IQR*n^{-1/3}); otherwise a fixed bin count.
    int fixed_bins = 0;
    int min_bins = 8;
    int max_bins = 400;
};

EmpiricalPdf empirical_pdf(const std::vector<double>& series, TimeLag tau, BinRule rule = {});

struct ObjectiveValue {
    double value = 0.0;          // sum over lags and populated bins of |log P* - log P|
    std::size_t points = 0;      // bins that entered the sum
    std::size_t skipped = 0;     // zero-count bins excluded (ln 0 undefined)
};

/// Log-deviation fit error between per-lag models and per-lag histograms.
/// `squared` switches to the squared-log variant for sensitivity studies.
ObjectiveValue objective_e(const std::vector<const DensityModel*>& models,
                           const std::vector<EmpiricalPdf>& pdfs, bool squared = false);

GaussianModel fit_gaussian(const std::vector<double>& series);

struct DyFitOptions {
    FtVariant variant = FtVariant::ThreeTerm;
    bool squared = false;
    int max_evals_per_restart = 2000;
    int max_restarts = 40;
    double restart_rel_tol = 1e-4;  // stop after two consecutive restarts below this
    std::uint64_t seed = 1;
    std::function<void(int, double)> on_restart;  // optional progress callback
};

struct FitReport {
    HestonParams params;
    double objective = 0.0;
    std::size_t skipped_bins = 0;
    int evaluations = 0;
    int restarts = 0;
    bool converged = false;
};

/// Derivative-free descent of the log-deviation error over (gamma, theta, k,
/// mu), positive parameters searched in log space, rho held fixed at the
/// initial value. Restarts from a perturbed best point until two consecutive
/// restarts improve the objective by less than restart_rel_tol relative.
FitReport fit_dy(const std::vector<EmpiricalPdf>& pdfs, const HestonParams& initial,
                 const DyFitOptions& options = {});

} // namespace hestonfit
