#pragma once

#include <cstdint>

#include "hestonfit/special.hpp"

namespace hestonfit {

// Counter-based generator: every draw is a pure function of the key words,
// so parallel simulation is reproducible independent of scheduling.
namespace rng {

// Stafford's mix13 finalizer (splitmix64 core): full 64-bit avalanche.
inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash4(std::uint64_t seed, std::uint64_t path,
                           std::uint64_t step, std::uint64_t idx) {
    std::uint64_t h = mix(seed);
    h = mix(h ^ path);
    h = mix(h ^ step);
    h = mix(h ^ idx);
    return h;
}

/// Uniform draw in the open interval (0, 1).
inline double uniform(std::uint64_t seed, std::uint64_t path,
                      std::uint64_t step, std::uint64_t idx) {
    std::uint64_t h = hash4(seed, path, step, idx);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw via the inverse CDF (fast rational approximation;
/// its ~1e-9 relative error is far below any Monte Carlo tolerance here).
inline double normal(std::uint64_t seed, std::uint64_t path,
                     std::uint64_t step, std::uint64_t idx) {
    return special::normal_quantile_fast(uniform(seed, path, step, idx));
}

} // namespace rng

/// Small sequential convenience wrapper over the counter generator, for
/// consumers that just need a deterministic stream (optimizer restarts,
/// weight initialization).
class CounterStream {
public:
    explicit CounterStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    double uniform() { return rng::uniform(seed_, stream_, counter_++, 0); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return rng::normal(seed_, stream_, counter_++, 0); }

    /// Integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        return rng::hash4(seed_, stream_, counter_++, 1) % n;
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

} // namespace hestonfit
