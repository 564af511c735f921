#pragma once

#include <functional>
#include <vector>

namespace hestonfit {

struct NelderMeadOptions {
    int max_evals = 2000;     // objective-evaluation budget per run
    double f_tol = 1e-10;     // absolute spread of simplex values
    double x_tol = 1e-8;      // max coordinate spread of the simplex
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int evals = 0;
    bool converged = false;   // tolerance reached within the budget
};

/// Downhill simplex with the standard reflection/expansion/contraction/shrink
/// moves. The initial simplex is the start point displaced by `steps` along
/// each coordinate. Deterministic; never evaluates outside what the objective
/// accepts (non-finite objective values are treated as +inf).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const std::vector<double>& steps,
                             const NelderMeadOptions& opt = {});

} // namespace hestonfit
