#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hestonfit/calibrate.hpp"
#include "hestonfit/errors.hpp"
#include "hestonfit/nelder_mead.hpp"
#include "hestonfit/rng.hpp"
#include "hestonfit/special.hpp"

using namespace hestonfit;

TEST_CASE("histogram basics: uniform sample, normalization, degenerate input") {
    CounterStream s(11);
    std::vector<double> uniform;
    for (int i = 0; i < 100000; ++i) uniform.push_back(s.uniform());
    const auto hist = empirical_pdf(uniform, TimeLag(1));

    double mass = 0.0;
    for (double d : hist.densities) mass += d * hist.width;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

    // interior bins of a big uniform sample sit near density 1
    for (std::size_t b = 2; b + 2 < hist.densities.size(); ++b)
        CHECK(hist.densities[b] == doctest::Approx(1.0).epsilon(0.15));

    CHECK_THROWS_AS(empirical_pdf(std::vector<double>(100, 3.14), TimeLag(1)), DomainError);
    CHECK_THROWS_AS(empirical_pdf({1.0, 2.0}, TimeLag(1)), InsufficientData);
}

TEST_CASE("histogram matches the normal density within binomial error") {
    CounterStream s(12);
    std::vector<double> draws;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) draws.push_back(s.normal());
    const auto hist = empirical_pdf(draws, TimeLag(1));
    for (std::size_t b = 0; b < hist.centers.size(); ++b) {
        if (hist.counts[b] < 10) continue;  // binomial error blows up on empty tails
        const double expect = special::normal_pdf(hist.centers[b]);
        const double se = std::sqrt(hist.densities[b] / (double(n) * hist.width));
        CHECK(std::abs(hist.densities[b] - expect) < 3.5 * se + 0.01 * expect);
    }
}

TEST_CASE("objective: identity, constant log offset, bin/lag order invariance") {
    CounterStream s(13);
    std::vector<double> draws;
    for (int i = 0; i < 50000; ++i) draws.push_back(s.normal());
    auto hist = empirical_pdf(draws, TimeLag(1));

    // a fake model that reproduces the histogram exactly
    class TableModel final : public DensityModel {
    public:
        explicit TableModel(EmpiricalPdf h, double scale = 1.0) : h_(std::move(h)), scale_(scale) {}
        ModelKind kind() const override { return ModelKind::Gaussian; }
        int param_count() const override { return 2; }
        std::vector<double> parameters() const override { return {}; }
        double pdf(double x) const override {
            const int b = std::clamp(
                int((x - (h_.centers.front() - 0.5 * h_.width)) / h_.width), 0,
                int(h_.centers.size()) - 1);
            return h_.densities[b] * scale_;
        }
        double cdf(double) const override { return 0.0; }
        double quantile(double) const override { return 0.0; }

    private:
        EmpiricalPdf h_;
        double scale_;
    };

    TableModel exact(hist);
    auto val = objective_e({&exact}, {hist});
    CHECK(val.value == doctest::Approx(0.0));
    CHECK(val.points + val.skipped == hist.centers.size());

    TableModel scaled(hist, std::exp(1.0));
    auto off = objective_e({&scaled}, {hist});
    CHECK(off.value == doctest::Approx(double(off.points)).epsilon(1e-9));

    // reordering lags leaves E unchanged
    GaussianModel g(0.0, 1.0);
    auto hist2 = empirical_pdf(draws, TimeLag(5));
    const double e12 = objective_e({&g, &g}, {hist, hist2}).value;
    const double e21 = objective_e({&g, &g}, {hist2, hist}).value;
    CHECK(e12 == doctest::Approx(e21).epsilon(1e-12));
}

TEST_CASE("gaussian fit: exact two-point case, errors, estimator accuracy") {
    auto m = fit_gaussian({-1.0, 1.0});
    CHECK(m.mean() == 0.0);
    CHECK(m.stddev() == 1.0);
    CHECK_THROWS_AS(fit_gaussian({5.0, 5.0, 5.0}), DomainError);
    CHECK_THROWS_AS(fit_gaussian({5.0}), DomainError);

    CounterStream s(14);
    std::vector<double> draws;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) draws.push_back(0.3 + 2.0 * s.normal());
    auto big = fit_gaussian(draws);
    CHECK(std::abs(big.mean() - 0.3) < 3.0 * 2.0 / std::sqrt(double(n)));
    CHECK(std::abs(big.stddev() - 2.0) < 3.0 * 2.0 / std::sqrt(2.0 * double(n)));
}

TEST_CASE("nelder-mead minimizes a quartic valley") {
    auto f = [](const std::vector<double>& v) {
        const double a = v[0] - 1.0, b = v[1] + 2.0;
        return a * a * a * a + b * b + 0.5 * a * a * b * b;
    };
    auto res = nelder_mead(f, {4.0, 4.0}, {1.0, 1.0}, {4000, 1e-14, 1e-10});
    CHECK(res.converged);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(res.x[1] == doctest::Approx(-2.0).epsilon(2e-3));
    CHECK(res.f < 1e-8);
}

namespace {

// Noise-free histograms manufactured from the closed-form density itself.
std::vector<EmpiricalPdf> exact_histograms(const HestonParams& truth,
                                           const std::vector<int>& lags) {
    std::vector<EmpiricalPdf> hists;
    for (int lag : lags) {
        const TimeLag tau(lag);
        DyDensity density(truth, tau);
        const double sd = std::sqrt(density.variance());
        const int nbins = 61;
        EmpiricalPdf h;
        h.tau = tau;
        h.width = 8.0 * sd / nbins;
        h.n_total = 1;
        for (int b = 0; b < nbins; ++b) {
            const double x = density.mean() - 4.0 * sd + (b + 0.5) * h.width;
            h.centers.push_back(x);
            h.densities.push_back(density.pdf(x - truth.mu * tau.days()));
            h.counts.push_back(1);  // every bin participates
        }
        hists.push_back(std::move(h));
    }
    return hists;
}

} // namespace

TEST_CASE("fit recovers parameters from noise-free histograms" * doctest::timeout(280)) {
    HestonParams truth;
    truth.gamma = 2.0;
    truth.theta = 0.04;
    truth.k = 0.3;
    truth.mu = 0.0;
    truth.rho = 0.0;
    const auto hists = exact_histograms(truth, {1, 5, 20});

    HestonParams init;
    init.gamma = 3.1;
    init.theta = 0.027;
    init.k = 0.21;
    init.mu = 0.005;
    init.rho = 0.0;

    std::vector<double> trace;
    DyFitOptions opt;
    opt.seed = 2;
    opt.max_evals_per_restart = 900;
    opt.on_restart = [&](int, double best) { trace.push_back(best); };
    const auto report = fit_dy(hists, init, opt);

    CHECK(report.converged);
    CHECK(std::abs(report.params.gamma / truth.gamma - 1.0) < 0.01);
    CHECK(std::abs(report.params.theta / truth.theta - 1.0) < 0.01);
    CHECK(std::abs(report.params.k / truth.k - 1.0) < 0.01);
    CHECK(std::abs(report.params.mu) < 1e-4);
    CHECK(report.params.is_valid());

    // minimizer definition: optimum no worse than the truth. The histograms
    // were manufactured from the same evaluator, so E(truth) is exactly 0 and
    // the slack is the quadrature tolerance accumulated over the bins.
    std::vector<const DensityModel*> models;
    std::vector<DyModel> storage;
    storage.reserve(hists.size());
    for (const auto& h : hists) storage.emplace_back(truth, h.tau);
    for (const auto& m : storage) models.push_back(&m);
    CHECK(report.objective <= objective_e(models, hists).value + 1e-6);

    // best-so-far trace is non-increasing
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-15);
}
