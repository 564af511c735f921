#include "hestonfit/gof.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hestonfit/errors.hpp"
#include "hestonfit/special.hpp"

namespace hestonfit {

Ecdf::Ecdf(std::vector<double> sample) : sorted_(std::move(sample)) {
    if (sorted_.empty()) throw DomainError("Ecdf: empty sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double ks_statistic(const std::vector<double>& sample, const DensityModel& model) {
    if (sample.empty()) throw DomainError("ks_statistic: empty sample");
    std::vector<double> sorted(sample);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double z = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = model.cdf(sorted[i]);
        z = std::max(z, std::abs(static_cast<double>(i + 1) / n - f));
        z = std::max(z, std::abs(static_cast<double>(i) / n - f));
    }
    return z;
}

double ks_pvalue(double z, std::size_t n) {
    if (z < 0.0) throw DomainError("ks_pvalue: Z must be >= 0");
    if (n < 1) throw DomainError("ks_pvalue: N must be >= 1");
    if (z == 0.0) return 1.0;
    const double rn = std::sqrt(static_cast<double>(n));
    const double lambda = (rn + 0.12 + 0.11 / rn) * z;
    return special::kolmogorov_q(lambda);
}

BinPartition equal_freq_bins(const DensityModel& model, std::size_t n, int per_bin) {
    if (per_bin < 1) throw DomainError("equal_freq_bins: per_bin must be >= 1");
    if (n < 2 * static_cast<std::size_t>(per_bin))
        throw InsufficientData("equal_freq_bins: need N >= 2*per_bin");
    const int nbins = static_cast<int>(n / static_cast<std::size_t>(per_bin));
    if (nbins < 4)
        throw InsufficientData("equal_freq_bins: only " + std::to_string(nbins) +
                               " bins of " + std::to_string(per_bin) +
                               " expected observations; need at least 4");
    BinPartition part;
    part.nbins = nbins;
    part.interior_edges.resize(nbins - 1);
    for (int j = 1; j < nbins; ++j)
        part.interior_edges[j - 1] =
            model.quantile(static_cast<double>(j) / static_cast<double>(nbins));
    part.expected.assign(nbins, static_cast<double>(n) / static_cast<double>(nbins));
    return part;
}

std::pair<double, int> chi2_statistic(const std::vector<double>& sample,
                                      const BinPartition& part) {
    if (part.nbins < 1 || part.expected.size() != static_cast<std::size_t>(part.nbins) ||
        part.interior_edges.size() + 1 != static_cast<std::size_t>(part.nbins))
        throw DomainError("chi2_statistic: malformed partition");
    if (!std::is_sorted(part.interior_edges.begin(), part.interior_edges.end()))
        throw DomainError("chi2_statistic: edges must be increasing");

    std::vector<std::size_t> observed(part.nbins, 0);
    for (double x : sample) {
        // bin j covers (edge_{j-1}, edge_j]; first and last extend to +-inf
        const auto it =
            std::lower_bound(part.interior_edges.begin(), part.interior_edges.end(), x);
        ++observed[it - part.interior_edges.begin()];
    }
    double chi2 = 0.0;
    for (int j = 0; j < part.nbins; ++j) {
        if (!(part.expected[j] > 0.0))
            throw DomainError("chi2_statistic: expected count must be positive");
        const double d = static_cast<double>(observed[j]) - part.expected[j];
        chi2 += d * d / part.expected[j];
    }
    return {chi2, part.nbins};
}

double chi2_pvalue(double chi2, int df) {
    if (df < 1) throw DomainError("chi2_pvalue: df must be >= 1, got " + std::to_string(df));
    if (chi2 <= 0.0) return 1.0;
    return special::gamma_q(0.5 * df, 0.5 * chi2);
}

GofResult aggregate_paths(const std::vector<double>& stats,
                          const std::function<double(double)>& pvalue_fn) {
    if (stats.empty()) throw DomainError("aggregate_paths: no per-path statistics");
    GofResult res;
    res.per_path = stats;
    double sum = 0.0;
    for (double s : stats) sum += s;
    res.mean = sum / static_cast<double>(stats.size());
    res.p_mid = pvalue_fn(res.mean);
    if (stats.size() > 1) {
        const auto [lo, hi] = std::minmax_element(stats.begin(), stats.end());
        double sigma = 0.0;
        if (*lo != *hi) {
            double ss = 0.0;
            for (double s : stats) ss += (s - res.mean) * (s - res.mean);
            sigma = std::sqrt(ss / static_cast<double>(stats.size()));
        } else {
            res.mean = *lo;  // identical paths: keep the triple exactly degenerate
        }
        res.stddev = sigma;
        res.p_low = sigma == 0.0 ? res.p_mid : pvalue_fn(res.mean + sigma);
        res.p_high = sigma == 0.0 ? res.p_mid : pvalue_fn(std::max(res.mean - sigma, 0.0));
    }
    return res;
}

} // namespace hestonfit
