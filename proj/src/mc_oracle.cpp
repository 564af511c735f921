#include "hestonfit/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "hestonfit/errors.hpp"
#include "hestonfit/rng.hpp"

namespace hestonfit {

void SimConfig::validate() const {
    params.validate();
    horizon.validate();
    if (!(dt > 0.0)) throw DomainError("SimConfig: dt must be > 0");
    if (n_paths < 1) throw DomainError("SimConfig: n_paths must be >= 1");
    const double steps = horizon.days() / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
        throw DomainError("SimConfig: horizon/dt must be integral within rounding");
    if (v0 && !(*v0 > 0.0)) throw DomainError("SimConfig: fixed v0 must be > 0");
}

std::size_t SimConfig::n_steps() const {
    return static_cast<std::size_t>(std::llround(horizon.days() / dt));
}

double stationary_variance_quantile(const HestonParams& params, double u) {
    params.validate();
    if (!(u > 0.0 && u < 1.0))
        throw DomainError("stationary_variance_quantile: u must be in (0,1)");
    const double shape = 2.0 * params.gamma * params.theta / (params.k * params.k);
    const double scale = params.k * params.k / (2.0 * params.gamma);
    return boost::math::gamma_p_inv(shape, u) * scale;
}

SimResult simulate_returns(const SimConfig& config) {
    config.validate();
    const std::size_t n_steps = config.n_steps();
    const double dt = config.dt;
    const double g = config.params.gamma;
    const double theta = config.params.theta;
    const double k = config.params.k;
    const double rho = config.params.rho;
    const double rho_bar = std::sqrt(std::max(1.0 - rho * rho, 0.0));

    SimResult result;
    result.returns.assign(config.n_paths, 0.0);

    unsigned hw = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
    hw = static_cast<unsigned>(std::min<std::size_t>(hw, config.n_paths));

    std::vector<std::size_t> clamp_per_thread(hw, 0);
    auto worker = [&](unsigned tid, std::size_t begin, std::size_t end) {
        std::size_t clamps = 0;
        for (std::size_t path = begin; path < end; ++path) {
            double v = config.v0
                           ? *config.v0
                           : stationary_variance_quantile(
                                 config.params, rng::uniform(config.seed, path, 0, 2));
            double x = 0.0;
            for (std::size_t s = 0; s < n_steps; ++s) {
                const double z1 = rng::normal(config.seed, path, s, 0);
                const double z2 = rng::normal(config.seed, path, s, 1);
                const double vp = std::max(v, 0.0);          // full truncation
                const double diffusion = std::sqrt(vp * dt);
                x += -0.5 * vp * dt + diffusion * z1;
                v += -g * (v - theta) * dt + k * diffusion * (rho * z1 + rho_bar * z2);
                if (v < 0.0) {
                    v = 0.0;
                    ++clamps;
                }
            }
            result.returns[path] = x;
        }
        clamp_per_thread[tid] = clamps;
    };

    if (hw <= 1) {
        worker(0, 0, config.n_paths);
    } else {
        std::vector<std::thread> pool;
        const std::size_t block = (config.n_paths + hw - 1) / hw;
        for (unsigned tid = 0; tid < hw; ++tid) {
            const std::size_t begin = tid * block;
            const std::size_t end = std::min(config.n_paths, begin + block);
            if (begin >= end) break;
            pool.emplace_back(worker, tid, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t c : clamp_per_thread) result.clamp_count += c;
    return result;
}

std::vector<double> stationary_variance_sample(const HestonParams& params,
                                               std::size_t burn_in_steps, std::size_t n,
                                               double dt, std::uint64_t seed) {
    params.validate();
    if (!(dt > 0.0)) throw DomainError("stationary_variance_sample: dt must be > 0");
    if (n < 1) throw DomainError("stationary_variance_sample: n must be >= 1");

    const double g = params.gamma, theta = params.theta, k = params.k;
    // thin by ~3 relaxation times so successive draws decorrelate
    const std::size_t spacing =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(3.0 / (g * dt))));

    std::vector<double> draws;
    draws.reserve(n);
    double v = theta;
    std::size_t step = 0;
    auto advance = [&] {
        const double vp = std::max(v, 0.0);
        const double z = rng::normal(seed, 0, step++, 1);
        v += -g * (v - theta) * dt + k * std::sqrt(vp * dt) * z;
        v = std::max(v, 0.0);
    };
    for (std::size_t s = 0; s < burn_in_steps; ++s) advance();
    while (draws.size() < n) {
        for (std::size_t s = 0; s < spacing; ++s) advance();
        draws.push_back(v);
    }
    return draws;
}

} // namespace hestonfit
