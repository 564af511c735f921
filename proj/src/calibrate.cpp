#include "hestonfit/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "hestonfit/errors.hpp"
#include "hestonfit/nelder_mead.hpp"
#include "hestonfit/rng.hpp"

namespace hestonfit {

EmpiricalPdf empirical_pdf(const std::vector<double>& series, TimeLag tau, BinRule rule) {
    const std::size_t n = series.size();
    if (n < 30)
        throw InsufficientData("empirical_pdf: need at least 30 values, got " +
                               std::to_string(n));
    std::vector<double> sorted(series);
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front(), hi = sorted.back();
    if (!(hi > lo)) throw DomainError("empirical_pdf: degenerate sample (min == max)");

    int nbins = rule.fixed_bins;
    if (nbins <= 0) {
        const double q1 = sorted[static_cast<std::size_t>(0.25 * (n - 1))];
        const double q3 = sorted[static_cast<std::size_t>(0.75 * (n - 1))];
        const double iqr = q3 - q1;
        const double fd_width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
        nbins = fd_width > 0.0 ? static_cast<int>(std::ceil((hi - lo) / fd_width))
                               : rule.max_bins;
        nbins = std::clamp(nbins, rule.min_bins, rule.max_bins);
    }

    EmpiricalPdf out;
    out.tau = tau;
    out.n_total = n;
    out.width = (hi - lo) / nbins;
    out.counts.assign(nbins, 0);
    for (double x : sorted) {
        int b = static_cast<int>((x - lo) / out.width);
        b = std::clamp(b, 0, nbins - 1);  // x == hi lands in the last bin
        ++out.counts[b];
    }
    out.centers.resize(nbins);
    out.densities.resize(nbins);
    for (int b = 0; b < nbins; ++b) {
        out.centers[b] = lo + (b + 0.5) * out.width;
        out.densities[b] =
            static_cast<double>(out.counts[b]) / (static_cast<double>(n) * out.width);
    }
    return out;
}

ObjectiveValue objective_e(const std::vector<const DensityModel*>& models,
                           const std::vector<EmpiricalPdf>& pdfs, bool squared) {
    if (models.size() != pdfs.size())
        throw DomainError("objective_e: one model per empirical pdf required");
    ObjectiveValue out;
    for (std::size_t i = 0; i < pdfs.size(); ++i) {
        const auto& hist = pdfs[i];
        for (std::size_t b = 0; b < hist.centers.size(); ++b) {
            if (hist.counts[b] == 0) {
                ++out.skipped;
                continue;
            }
            const double model_pdf = std::max(models[i]->pdf(hist.centers[b]), 1e-300);
            const double dev = std::log(hist.densities[b]) - std::log(model_pdf);
            out.value += squared ? dev * dev : std::abs(dev);
            ++out.points;
        }
    }
    return out;
}

GaussianModel fit_gaussian(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 2) throw DomainError("fit_gaussian: need at least 2 values");
    const double mean =
        std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    double m2 = 0.0;
    for (double x : series) m2 += (x - mean) * (x - mean);
    m2 /= static_cast<double>(n);
    if (!(m2 > 0.0)) throw DomainError("fit_gaussian: zero variance");
    return GaussianModel(mean, std::sqrt(m2));
}

namespace {

// Objective over (ln gamma, ln theta, ln k, mu). Numerical failures in the
// density evaluation (absurd trial parameters) count as +inf.
double dy_objective(const std::vector<double>& v, const std::vector<EmpiricalPdf>& pdfs,
                    double rho, const DyFitOptions& opt, std::size_t* skipped_out) {
    HestonParams hp;
    hp.gamma = std::exp(v[0]);
    hp.theta = std::exp(v[1]);
    hp.k = std::exp(v[2]);
    hp.mu = v[3];
    hp.rho = rho;
    if (!hp.is_valid()) return std::numeric_limits<double>::infinity();

    double total = 0.0;
    std::size_t skipped = 0;
    try {
        for (const auto& hist : pdfs) {
            DyDensity density(hp, hist.tau, opt.variant);
            const double shift = hp.mu * hist.tau.days();
            for (std::size_t b = 0; b < hist.centers.size(); ++b) {
                if (hist.counts[b] == 0) {
                    ++skipped;
                    continue;
                }
                const double model_pdf = std::max(density.pdf(hist.centers[b] - shift), 1e-300);
                const double dev = std::log(hist.densities[b]) - std::log(model_pdf);
                total += opt.squared ? dev * dev : std::abs(dev);
            }
        }
    } catch (const NumericError&) {
        return std::numeric_limits<double>::infinity();
    }
    if (skipped_out) *skipped_out = skipped;
    return total;
}

} // namespace

FitReport fit_dy(const std::vector<EmpiricalPdf>& pdfs, const HestonParams& initial,
                 const DyFitOptions& opt) {
    initial.validate();
    if (pdfs.empty()) throw DomainError("fit_dy: no empirical pdfs");

    const double rho = initial.rho;
    auto f = [&](const std::vector<double>& v) {
        return dy_objective(v, pdfs, rho, opt, nullptr);
    };

    std::vector<double> best = {std::log(initial.gamma), std::log(initial.theta),
                                std::log(initial.k), initial.mu};
    double best_f = f(best);
    int total_evals = 1;

    CounterStream stream(opt.seed);
    FitReport report;
    int stall = 0;
    int restarts = 0;
    for (; restarts < opt.max_restarts; ++restarts) {
        std::vector<double> start = best;
        const double mu_scale = 0.05 * std::sqrt(std::exp(best[1]));
        if (restarts > 0) {
            for (int j = 0; j < 3; ++j) start[j] += 0.08 * stream.normal();
            start[3] += mu_scale * stream.normal();
        }
        NelderMeadOptions nm;
        nm.max_evals = opt.max_evals_per_restart;
        auto run = nelder_mead(f, start, {0.25, 0.25, 0.25, std::max(2.0 * mu_scale, 1e-4)}, nm);
        total_evals += run.evals;

        const double improvement = (best_f - run.f) / std::max(best_f, 1e-300);
        if (run.f < best_f) {
            best = run.x;
            best_f = run.f;
        }
        if (opt.on_restart) opt.on_restart(restarts, best_f);
        stall = improvement < opt.restart_rel_tol ? stall + 1 : 0;
        if (stall >= 2) {
            report.converged = true;
            break;
        }
    }

    report.params.gamma = std::exp(best[0]);
    report.params.theta = std::exp(best[1]);
    report.params.k = std::exp(best[2]);
    report.params.mu = best[3];
    report.params.rho = rho;
    std::size_t skipped = 0;
    report.objective = dy_objective(best, pdfs, rho, opt, &skipped);
    report.skipped_bins = skipped;
    report.evaluations = total_evals;
    report.restarts = restarts;
    return report;
}

} // namespace hestonfit
