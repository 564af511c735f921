#include "hestonfit/density_model.hpp"

#include <cmath>

#include "hestonfit/errors.hpp"
#include "hestonfit/special.hpp"

namespace hestonfit {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Gaussian: return "gaussian";
        case ModelKind::Dy: return "dy";
        case ModelKind::Nn: return "nn";
    }
    return "?";
}

GaussianModel::GaussianModel(double mean, double stddev) : mean_(mean), stddev_(stddev) {
    if (!(stddev > 0.0) || !std::isfinite(stddev) || !std::isfinite(mean))
        throw DomainError("GaussianModel: require finite mean and stddev > 0");
}

double GaussianModel::pdf(double x) const {
    return special::normal_pdf((x - mean_) / stddev_) / stddev_;
}

double GaussianModel::cdf(double x) const {
    return special::normal_cdf((x - mean_) / stddev_);
}

double GaussianModel::quantile(double q) const {
    return mean_ + stddev_ * special::normal_quantile(q);
}

DyModel::DyModel(const HestonParams& params, TimeLag tau, FtVariant variant,
                 QuadratureConfig quad, GridConfig grid)
    : density_(std::make_shared<DyDensity>(params, tau, variant, quad, grid)),
      shift_(params.mu * tau.days()) {}

std::vector<double> DyModel::parameters() const {
    const auto& p = density_->params();
    return {p.gamma, p.theta, p.k, p.mu};
}

double DyModel::pdf(double x) const { return density_->pdf(x - shift_); }
double DyModel::cdf(double x) const { return density_->cdf(x - shift_); }
double DyModel::quantile(double q) const { return density_->quantile(q) + shift_; }

} // namespace hestonfit
