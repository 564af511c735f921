#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hestonfit/density_model.hpp"

namespace hestonfit {

/// Right-continuous empirical CDF: i/N at the i-th order statistic.
class Ecdf {
public:
    explicit Ecdf(std::vector<double> sample);
    double operator()(double x) const;
    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

/// Two-sided KS statistic Z = max_i max(|i/N - F(x_i)|, |(i-1)/N - F(x_i)|).
double ks_statistic(const std::vector<double>& sample, const DensityModel& model);

/// Asymptotic Kolmogorov p-value with the Stephens small-sample correction:
/// lambda = (sqrt(N) + 0.12 + 0.11/sqrt(N)) * Z.
double ks_pvalue(double z, std::size_t n);

/// Chi-square partition: interior edges over the real line (first edge -inf,
/// last +inf implied) and the expected count per bin.
struct BinPartition {
    std::vector<double> interior_edges;  // strictly increasing, size nbins-1
    std::vector<double> expected;        // size nbins
    int nbins = 0;
};

/// Equal-expected-frequency partition from model quantiles j/noBins with
/// noBins = floor(N / per_bin). Throws InsufficientData when noBins < 4.
BinPartition equal_freq_bins(const DensityModel& model, std::size_t n, int per_bin = 5);

/// Pearson statistic; every sample point lands in exactly one bin
/// ((edge_{j-1}, edge_j] convention). Returns (chi2, nbins).
std::pair<double, int> chi2_statistic(const std::vector<double>& sample,
                                      const BinPartition& partition);

/// Upper-tail probability Q(df/2, chi2/2). Throws DomainError for df < 1.
double chi2_pvalue(double chi2, int df);

/// Cross-path aggregate: mean and population std of the statistic, and the
/// p-value triple p(mean+sigma) <= p(mean) <= p(mean-sigma). A single path
/// reports no sigma and a single p-value.
struct GofResult {
    std::vector<double> per_path;
    double mean = 0.0;
    std::optional<double> stddev;
    std::optional<int> df;           // chi-square only
    double p_mid = 0.0;              // p(mean)
    std::optional<double> p_low;     // p(mean + sigma)
    std::optional<double> p_high;    // p(mean - sigma)
};

GofResult aggregate_paths(const std::vector<double>& per_path_stats,
                          const std::function<double(double)>& pvalue_fn);

} // namespace hestonfit
