#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "hestonfit/dy_density.hpp"
#include "hestonfit/errors.hpp"
#include "hestonfit/mc_oracle.hpp"
#include "hestonfit/rng.hpp"

using namespace hestonfit;

namespace {

HestonParams reference_params() {
    HestonParams p;
    p.gamma = 2.0;
    p.theta = 0.04;
    p.k = 0.3;
    p.mu = 0.0;
    p.rho = 0.0;
    return p;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double var_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / double(v.size());
}

double sample_excess_kurtosis(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s2 = 0.0, s4 = 0.0;
    for (double x : v) {
        const double d = x - m;
        s2 += d * d;
        s4 += d * d * d * d;
    }
    s2 /= double(v.size());
    s4 /= double(v.size());
    return s4 / (s2 * s2) - 3.0;
}

double skew_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s2 = 0.0, s3 = 0.0;
    for (double x : v) {
        const double d = x - m;
        s2 += d * d;
        s3 += d * d * d;
    }
    s2 /= double(v.size());
    s3 /= double(v.size());
    return s3 / std::pow(s2, 1.5);
}

} // namespace

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.params = reference_params();
    cfg.horizon = TimeLag(1);
    cfg.dt = 1e-3;
    cfg.n_paths = 10;
    cfg.validate();
    CHECK(cfg.n_steps() == 1000);

    SimConfig bad = cfg;
    bad.dt = 3e-4;  // 1/3e-4 is not integral
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = cfg;
    bad.n_paths = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = cfg;
    bad.v0 = -0.1;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = cfg;
    bad.params.k = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("determinism: same config, any thread count, bit-identical output") {
    SimConfig cfg;
    cfg.params = reference_params();
    cfg.horizon = TimeLag(1);
    cfg.dt = 1e-2;
    cfg.n_paths = 5000;
    cfg.seed = 77;

    cfg.threads = 1;
    const auto a = simulate_returns(cfg);
    cfg.threads = 4;
    const auto b = simulate_returns(cfg);
    cfg.threads = 3;
    const auto c = simulate_returns(cfg);
    CHECK(a.returns == b.returns);
    CHECK(a.returns == c.returns);
    CHECK(a.clamp_count == b.clamp_count);

    SimConfig other = cfg;
    other.seed = 78;
    CHECK(simulate_returns(other).returns != a.returns);
}

TEST_CASE("k -> 0 with fixed v0 = theta gives the deterministic-variance limit") {
    SimConfig cfg;
    cfg.params = reference_params();
    cfg.params.k = 1e-8;
    cfg.horizon = TimeLag(1);
    cfg.dt = 1e-2;  // with k ~ 0 the variance is pinned, so the x-step is exact at any dt
    cfg.n_paths = 1000000;
    cfg.seed = 5;
    cfg.v0 = cfg.params.theta;

    const auto res = simulate_returns(cfg);
    const double theta_t = cfg.params.theta * cfg.horizon.days();
    const double se_mean = std::sqrt(theta_t / double(cfg.n_paths));
    CHECK(std::abs(mean_of(res.returns) - (-0.5 * theta_t)) < 4.0 * se_mean);
    const double se_var = theta_t * std::sqrt(2.0 / double(cfg.n_paths));
    CHECK(std::abs(var_of(res.returns) - theta_t) < 4.0 * se_var);
    CHECK(res.clamp_count == 0);
}

TEST_CASE("fast relaxation pins the variance of returns per unit time at theta") {
    SimConfig cfg;
    cfg.params = reference_params();
    cfg.params.gamma = 50.0;  // gamma*dt = 0.5 with k small
    cfg.params.k = 0.05;
    cfg.horizon = TimeLag(4);
    cfg.dt = 1e-2;
    cfg.n_paths = 200000;
    cfg.seed = 6;

    const auto res = simulate_returns(cfg);
    const double per_day = var_of(res.returns) / cfg.horizon.days();
    CHECK(per_day == doctest::Approx(cfg.params.theta).epsilon(0.02));
}

TEST_CASE("correlated draws: construction gives exactly +-1 at rho = +-1") {
    for (double rho : {1.0, -1.0, 0.7}) {
        const double rho_bar = std::sqrt(std::max(1.0 - rho * rho, 0.0));
        double s11 = 0.0, s22 = 0.0, s12 = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const double z1 = rng::normal(42, 1, i, 0);
            const double z2 = rng::normal(42, 1, i, 1);
            const double w = rho * z1 + rho_bar * z2;
            s11 += z1 * z1;
            s22 += w * w;
            s12 += z1 * w;
        }
        const double corr = s12 / std::sqrt(s11 * s22);
        if (rho == 1.0) CHECK(corr == doctest::Approx(1.0).epsilon(1e-12));
        if (rho == -1.0) CHECK(corr == doctest::Approx(-1.0).epsilon(1e-12));
        if (rho == 0.7) CHECK(corr == doctest::Approx(0.7).epsilon(0.02));
    }
}

TEST_CASE("leverage: terminal skewness follows the sign of rho") {
    SimConfig cfg;
    cfg.params = reference_params();
    cfg.params.k = 0.6;
    cfg.horizon = TimeLag(1);
    cfg.dt = 2e-3;
    cfg.n_paths = 200000;
    cfg.seed = 9;

    cfg.params.rho = -1.0;
    const double skew_neg = skew_of(simulate_returns(cfg).returns);
    cfg.params.rho = 1.0;
    const double skew_pos = skew_of(simulate_returns(cfg).returns);
    CHECK(skew_neg < -0.05);
    CHECK(skew_pos > 0.05);
}

TEST_CASE("weak convergence: halving dt moves moments by less than the MC error") {
    SimConfig cfg;
    cfg.params = reference_params();
    cfg.horizon = TimeLag(1);
    cfg.n_paths = 300000;
    cfg.seed = 10;

    cfg.dt = 2e-3;
    const auto coarse = simulate_returns(cfg);
    cfg.dt = 1e-3;
    const auto fine = simulate_returns(cfg);

    const double sd = std::sqrt(var_of(fine.returns));
    const double se_mean = sd / std::sqrt(double(cfg.n_paths));
    CHECK(std::abs(mean_of(coarse.returns) - mean_of(fine.returns)) < 4.0 * se_mean);
    const double se_var = var_of(fine.returns) * std::sqrt(2.0 / double(cfg.n_paths));
    CHECK(std::abs(var_of(coarse.returns) - var_of(fine.returns)) < 4.0 * se_var * 2.0);
}

TEST_CASE("terminal histogram agrees with the closed-form density") {
    SimConfig cfg;
    cfg.params = reference_params();
    cfg.horizon = TimeLag(1);
    cfg.dt = 1e-3;
    cfg.n_paths = 200000;
    cfg.seed = 11;

    const auto res = simulate_returns(cfg);
    DyDensity density(cfg.params, cfg.horizon);

    const double lo = -0.8, hi = 0.8;
    const int nbins = 40;
    const double w = (hi - lo) / nbins;
    std::vector<double> counts(nbins, 0.0);
    std::size_t inside = 0;
    for (double x : res.returns) {
        if (x < lo || x >= hi) continue;
        ++counts[int((x - lo) / w)];
        ++inside;
    }
    CHECK(inside > cfg.n_paths * 995 / 1000);
    for (int b = 0; b < nbins; ++b) {
        const double center = lo + (b + 0.5) * w;
        const double expected = density.pdf(center) * w * double(cfg.n_paths);
        if (expected < 20.0) continue;
        const double se = std::sqrt(expected);
        // 4 sigma plus a 1.5% slack for within-bin pdf curvature and dt bias
        CHECK(std::abs(counts[b] - expected) < 4.0 * se + 0.015 * expected);
    }
}

TEST_CASE("stationary variance sampler: k->0 degenerates to theta") {
    HestonParams p = reference_params();
    p.k = 1e-9;
    const auto draws = stationary_variance_sample(p, 2000, 200, 1e-2, 3);
    for (double v : draws) CHECK(v == doctest::Approx(p.theta).epsilon(1e-4));
}

TEST_CASE("stationary variance sampler: ergodic mean and variance") {
    const auto p = reference_params();
    const std::size_t n = 20000;
    const auto draws = stationary_variance_sample(p, 5000, n, 1e-2, 4);

    const double m = mean_of(draws);
    const double v = var_of(draws);
    const double target_var = p.k * p.k * p.theta / (2.0 * p.gamma);

    // thinned draws are near-independent; allow 4 SE plus O(dt) scheme bias
    const double se_mean = std::sqrt(target_var / double(n));
    CHECK(std::abs(m - p.theta) < 4.0 * se_mean + 0.01 * p.theta);
    const double alpha = 2.0 * p.gamma * p.theta / (p.k * p.k);  // Gamma shape
    const double se_var = target_var * std::sqrt((2.0 + 6.0 / alpha) / double(n));
    CHECK(std::abs(v - target_var) < 4.0 * se_var + 0.03 * target_var);
}

TEST_CASE("exact stationary quantile: mean recovers theta") {
    const auto p = reference_params();
    double acc = 0.0;
    const int n = 20000;
    for (int i = 1; i <= n; ++i)
        acc += stationary_variance_quantile(p, (i - 0.5) / double(n));
    CHECK(acc / n == doctest::Approx(p.theta).epsilon(1e-3));
    CHECK_THROWS_AS(stationary_variance_quantile(p, 0.0), DomainError);
    CHECK_THROWS_AS(stationary_variance_quantile(p, 1.0), DomainError);
}

TEST_CASE("stationary draws marginalize the initial variance in the simulator") {
    // with stationary v0 the law has more weight in the tails than fixed v0 = theta
    SimConfig cfg;
    cfg.params = reference_params();
    cfg.horizon = TimeLag(1);
    cfg.dt = 2e-3;
    cfg.n_paths = 200000;
    cfg.seed = 12;

    const auto stat = simulate_returns(cfg);
    cfg.v0 = cfg.params.theta;
    const auto fixed = simulate_returns(cfg);
    CHECK(sample_excess_kurtosis(stat.returns) > sample_excess_kurtosis(fixed.returns));
}
