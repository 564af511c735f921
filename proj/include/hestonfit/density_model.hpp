#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hestonfit/dy_density.hpp"
#include "hestonfit/params.hpp"

namespace hestonfit {

enum class ModelKind { Gaussian, Dy, Nn };

std::string to_string(ModelKind kind);

/// A fitted candidate distribution exposing pdf/cdf/quantile and the
/// parameter count used for chi-square degrees of freedom.
class DensityModel {
public:
    virtual ~DensityModel() = default;
    virtual ModelKind kind() const = 0;
    virtual int param_count() const = 0;
    virtual std::vector<double> parameters() const = 0;
    virtual double pdf(double x) const = 0;
    virtual double cdf(double x) const = 0;
    virtual double quantile(double q) const = 0;
};

class GaussianModel final : public DensityModel {
public:
    GaussianModel(double mean, double stddev);

    ModelKind kind() const override { return ModelKind::Gaussian; }
    int param_count() const override { return 2; }
    std::vector<double> parameters() const override { return {mean_, stddev_}; }
    double pdf(double x) const override;
    double cdf(double x) const override;
    double quantile(double q) const override;

    double mean() const { return mean_; }
    double stddev() const { return stddev_; }

private:
    double mean_;
    double stddev_;
};

/// Closed-form model of raw log-returns at lag tau: the centred-return
/// density shifted by the trend, pdf(r) = dy_pdf(r - mu * tau).
class DyModel final : public DensityModel {
public:
    DyModel(const HestonParams& params, TimeLag tau,
            FtVariant variant = FtVariant::ThreeTerm,
            QuadratureConfig quad = {}, GridConfig grid = {});

    ModelKind kind() const override { return ModelKind::Dy; }
    int param_count() const override { return 4; }  // gamma, theta, k, mu (rho fixed)
    std::vector<double> parameters() const override;
    double pdf(double x) const override;
    double cdf(double x) const override;
    double quantile(double q) const override;

    const DyDensity& density() const { return *density_; }

private:
    std::shared_ptr<const DyDensity> density_;
    double shift_;
};

} // namespace hestonfit
