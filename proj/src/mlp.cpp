#include "hestonfit/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hestonfit/detail/cum_grid.hpp"
#include "hestonfit/errors.hpp"
#include "hestonfit/rng.hpp"

namespace hestonfit {

std::vector<double> MlpParams::flatten() const {
    std::vector<double> v;
    v.reserve(kStoredParams);
    v.insert(v.end(), w1.begin(), w1.end());
    v.insert(v.end(), b1.begin(), b1.end());
    v.insert(v.end(), w2.begin(), w2.end());
    v.push_back(b2);
    return v;
}

MlpParams MlpParams::unflatten(const std::vector<double>& v) {
    if (v.size() != kStoredParams)
        throw DomainError("MlpParams::unflatten: expected 16 values");
    MlpParams p;
    std::copy_n(v.begin(), 5, p.w1.begin());
    std::copy_n(v.begin() + 5, 5, p.b1.begin());
    std::copy_n(v.begin() + 10, 5, p.w2.begin());
    p.b2 = v[15];
    return p;
}

double tansig(double n) { return 2.0 / (1.0 + std::exp(-2.0 * n)) - 1.0; }

double mlp_forward(const MlpParams& p, double x) {
    double out = p.b2;
    for (int i = 0; i < 5; ++i) out += p.w2[i] * tansig(p.w1[i] * x + p.b1[i]);
    return out;
}

double mlp_mse(const MlpParams& p, const std::vector<double>& xs,
               const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.empty())
        throw DomainError("mlp_mse: need matching non-empty targets");
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = mlp_forward(p, xs[i]) - ys[i];
        s += e * e;
    }
    return s / static_cast<double>(xs.size());
}

std::vector<double> mlp_gradient(const MlpParams& p, const std::vector<double>& xs,
                                 const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.empty())
        throw DomainError("mlp_gradient: need matching non-empty targets");
    std::vector<double> g(MlpParams::kStoredParams, 0.0);
    const double inv_n = 1.0 / static_cast<double>(xs.size());
    for (std::size_t s = 0; s < xs.size(); ++s) {
        const double x = xs[s];
        std::array<double, 5> h;
        double out = p.b2;
        for (int i = 0; i < 5; ++i) {
            h[i] = tansig(p.w1[i] * x + p.b1[i]);
            out += p.w2[i] * h[i];
        }
        const double d = 2.0 * (out - ys[s]) * inv_n;  // d(MSE)/d(out)
        for (int i = 0; i < 5; ++i) {
            const double dtansig = 1.0 - h[i] * h[i];
            g[i] += d * p.w2[i] * dtansig * x;       // w1
            g[5 + i] += d * p.w2[i] * dtansig;       // b1
            g[10 + i] += d * h[i];                   // w2
        }
        g[15] += d;                                  // b2
    }
    return g;
}

MlpTrainResult train_mlp_xy(const std::vector<double>& xs, const std::vector<double>& ys,
                            const MlpTrainOptions& opt) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw DomainError("train_mlp_xy: need at least 2 target points");

    // Spread the tansig active regions over the data range.
    double x_mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double x_sd = 0.0;
    for (double x : xs) x_sd += (x - x_mean) * (x - x_mean);
    x_sd = std::sqrt(x_sd / xs.size());
    if (!(x_sd > 0.0)) x_sd = 1.0;
    double y_mean = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();

    CounterStream stream(opt.seed, /*stream=*/0x6d6c70);
    MlpParams p;
    for (int i = 0; i < 5; ++i) {
        p.w1[i] = stream.uniform(-2.0, 2.0) / x_sd;
        p.b1[i] = -p.w1[i] * x_mean + stream.uniform(-1.5, 1.5);
        p.w2[i] = stream.uniform(-0.5, 0.5);
    }
    p.b2 = y_mean;

    double step = opt.initial_step;
    double loss = mlp_mse(p, xs, ys);
    MlpTrainResult res;
    int epoch = 0;
    for (; epoch < opt.epochs; ++epoch) {
        if (loss <= opt.stop_mse) {
            res.converged = true;
            break;
        }
        const auto g = mlp_gradient(p, xs, ys);
        auto v = p.flatten();
        for (int j = 0; j < MlpParams::kStoredParams; ++j) v[j] -= step * g[j];
        const MlpParams trial = MlpParams::unflatten(v);
        const double trial_loss = mlp_mse(trial, xs, ys);
        if (trial_loss <= loss) {
            p = trial;
            loss = trial_loss;
            step *= 1.05;
        } else {
            step *= 0.5;  // reject the step; the accepted-loss trace never rises
            if (step < 1e-16) {
                res.converged = true;
                break;
            }
        }
    }
    res.params = p;
    res.mse = loss;
    res.epochs_run = epoch;
    return res;
}

MlpTrainResult train_mlp(const EmpiricalPdf& hist, int epochs, std::uint64_t seed,
                         bool fit_log_density) {
    std::vector<double> xs, ys;
    for (std::size_t b = 0; b < hist.centers.size(); ++b) {
        if (hist.counts[b] == 0) continue;
        xs.push_back(hist.centers[b]);
        ys.push_back(fit_log_density ? std::log(hist.densities[b]) : hist.densities[b]);
    }
    if (xs.size() < 16)
        throw InsufficientData("train_mlp: need >= 16 populated bins, got " +
                               std::to_string(xs.size()));
    MlpTrainOptions opt;
    opt.epochs = epochs;
    opt.seed = seed;
    opt.fit_log_density = fit_log_density;
    return train_mlp_xy(xs, ys, opt);
}

NnModel::NnModel(const MlpParams& params, double window_lo, double window_hi,
                 int reported_param_count, int grid_cells)
    : params_(params), lo_(window_lo), hi_(window_hi), reported_params_(reported_param_count) {
    if (!(window_hi > window_lo))
        throw DomainError("NnModel: require window_hi > window_lo");
    const int n = grid_cells + 1;
    h_ = (hi_ - lo_) / grid_cells;
    grid_pdf_.resize(n);
    for (int i = 0; i < n; ++i) grid_pdf_[i] = std::exp(mlp_forward(params_, lo_ + h_ * i));
    auto cum = detail::cumulative_am2(grid_pdf_, h_);
    norm_ = cum.back();
    if (!(norm_ > 0.0) || !std::isfinite(norm_))
        throw NumericError("NnModel: network density has no finite mass on the window");
    for (auto& v : grid_pdf_) v /= norm_;
    for (auto& v : cum) v /= norm_;
    grid_cum_ = std::move(cum);
}

NnModel NnModel::from_histogram(const MlpParams& params, const EmpiricalPdf& hist,
                                int reported_param_count) {
    const double lo = hist.centers.front() - 0.5 * hist.width;
    const double hi = hist.centers.back() + 0.5 * hist.width;
    const double pad = 0.1 * (hi - lo);
    return NnModel(params, lo - pad, hi + pad, reported_param_count);
}

double NnModel::pdf(double x) const {
    if (x < lo_ || x > hi_) return 0.0;  // an overfit benchmark has no claim beyond the data
    return std::exp(mlp_forward(params_, x)) / norm_;
}

double NnModel::cdf(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const double u = (x - lo_) / h_;
    const int cells = static_cast<int>(grid_pdf_.size()) - 1;
    const int i = std::min(static_cast<int>(u), cells - 1);
    const double c = detail::hermite_cdf(grid_cum_[i], grid_cum_[i + 1], grid_pdf_[i],
                                         grid_pdf_[i + 1], h_, u - i);
    return std::clamp(c, 0.0, 1.0);
}

double NnModel::quantile(double q) const {
    if (!(q > 0.0 && q < 1.0))
        throw DomainError("NnModel::quantile: q must be in (0,1)");
    const int cells = static_cast<int>(grid_pdf_.size()) - 1;
    auto it = std::lower_bound(grid_cum_.begin(), grid_cum_.end(), q);
    int i = std::clamp(static_cast<int>(it - grid_cum_.begin()) - 1, 0, cells - 1);
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double c = detail::hermite_cdf(grid_cum_[i], grid_cum_[i + 1], grid_pdf_[i],
                                             grid_pdf_[i + 1], h_, mid);
        if (std::abs(c - q) <= 1e-10 || hi - lo < 1e-16) return lo_ + h_ * (i + mid);
        (c < q ? lo : hi) = mid;
    }
    return lo_ + h_ * (i + 0.5 * (lo + hi));
}

} // namespace hestonfit
