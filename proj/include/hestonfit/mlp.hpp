#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "hestonfit/calibrate.hpp"
#include "hestonfit/density_model.hpp"

namespace hestonfit {

/// 1-5-1 feed-forward network: purelin(sum_i w2_i * tansig(w1_i x + b1_i) + b2)
/// with tansig(n) = 2/(1+e^{-2n}) - 1. 16 stored parameters; the count
/// reported for chi-square degrees of freedom is configurable (default 11).
struct MlpParams {
    std::array<double, 5> w1{};
    std::array<double, 5> b1{};
    std::array<double, 5> w2{};
    double b2 = 0.0;

    static constexpr int kStoredParams = 16;

    std::vector<double> flatten() const;
    static MlpParams unflatten(const std::vector<double>& v);
};

double tansig(double n);
double mlp_forward(const MlpParams& params, double x);

/// d(MSE)/d(each parameter) for targets (xs, ys); exact backpropagation.
/// Gradient layout matches MlpParams::flatten(): w1, b1, w2, b2.
std::vector<double> mlp_gradient(const MlpParams& params, const std::vector<double>& xs,
                                 const std::vector<double>& ys);

double mlp_mse(const MlpParams& params, const std::vector<double>& xs,
               const std::vector<double>& ys);

struct MlpTrainOptions {
    int epochs = 40000;
    std::uint64_t seed = 0;
    double initial_step = 0.05;
    double stop_mse = 0.0;      // stop early when the loss falls below this
    bool fit_log_density = true;  // fit ln P* at bin centers; false fits P* directly
};

struct MlpTrainResult {
    MlpParams params;
    double mse = 0.0;
    int epochs_run = 0;
    bool converged = false;  // stop_mse reached (or gradient exhausted) in budget
};

/// Plain gradient descent with step halving on loss increase (and mild growth
/// on acceptance); the accepted-loss trace is non-increasing by construction.
/// Deterministic for a fixed seed.
MlpTrainResult train_mlp_xy(const std::vector<double>& xs, const std::vector<double>& ys,
                            const MlpTrainOptions& options = {});

/// Trains against the histogram's populated bins (>= 16 required).
MlpTrainResult train_mlp(const EmpiricalPdf& hist, int epochs, std::uint64_t seed,
                         bool fit_log_density = true);

/// Density exp(network output) renormalized over [window_lo, window_hi]
/// (data range extended by 10% when built from a histogram); zero outside.
class NnModel final : public DensityModel {
public:
    NnModel(const MlpParams& params, double window_lo, double window_hi,
            int reported_param_count = 11, int grid_cells = 2048);

    static NnModel from_histogram(const MlpParams& params, const EmpiricalPdf& hist,
                                  int reported_param_count = 11);

    ModelKind kind() const override { return ModelKind::Nn; }
    int param_count() const override { return reported_params_; }
    std::vector<double> parameters() const override { return params_.flatten(); }
    double pdf(double x) const override;
    double cdf(double x) const override;
    double quantile(double q) const override;

    double window_lo() const { return lo_; }
    double window_hi() const { return hi_; }
    double normalization() const { return norm_; }
    const MlpParams& mlp() const { return params_; }

private:
    MlpParams params_;
    double lo_, hi_, h_;
    double norm_ = 1.0;
    int reported_params_;
    std::vector<double> grid_pdf_;  // normalized density at grid nodes
    std::vector<double> grid_cum_;
};

} // namespace hestonfit
