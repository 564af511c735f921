#include "hestonfit/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hestonfit/errors.hpp"

namespace hestonfit {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const std::vector<double>& steps,
                             const NelderMeadOptions& opt) {
    const std::size_t n = start.size();
    if (n == 0 || steps.size() != n)
        throw DomainError("nelder_mead: dimension mismatch");

    NelderMeadResult res;
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> sx(n + 1, start);
    std::vector<double> sf(n + 1);
    for (std::size_t i = 0; i < n; ++i) sx[i + 1][i] += steps[i];
    for (std::size_t i = 0; i <= n; ++i) sf[i] = eval(sx[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return sf[a] < sf[b]; });
        std::vector<std::vector<double>> nx(n + 1);
        std::vector<double> nf(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            nx[i] = std::move(sx[idx[i]]);
            nf[i] = sf[idx[i]];
        }
        sx = std::move(nx);
        sf = std::move(nf);
    };

    constexpr double alpha = 1.0, gamma = 2.0, beta = 0.5, delta = 0.5;
    while (true) {
        order();
        double fspread = sf[n] - sf[0];
        double xspread = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double lo = sx[0][j], hi = sx[0][j];
            for (std::size_t i = 1; i <= n; ++i) {
                lo = std::min(lo, sx[i][j]);
                hi = std::max(hi, sx[i][j]);
            }
            xspread = std::max(xspread, hi - lo);
        }
        if ((std::isfinite(fspread) && fspread <= opt.f_tol) || xspread <= opt.x_tol) {
            res.converged = true;
            break;
        }
        if (evals >= opt.max_evals) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += sx[i][j] / double(n);

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + coef * (centroid[j] - sx[n][j]);
            return x;
        };

        auto xr = blend(alpha);
        double fr = eval(xr);
        if (fr < sf[0]) {
            auto xe = blend(gamma);
            double fe = eval(xe);
            if (fe < fr) {
                sx[n] = std::move(xe);
                sf[n] = fe;
            } else {
                sx[n] = std::move(xr);
                sf[n] = fr;
            }
        } else if (fr < sf[n - 1]) {
            sx[n] = std::move(xr);
            sf[n] = fr;
        } else {
            // contraction: outside if the reflection improved on the worst
            bool outside = fr < sf[n];
            auto xc = blend(outside ? alpha * beta : -beta);
            double fc = eval(xc);
            if (fc < (outside ? fr : sf[n])) {
                sx[n] = std::move(xc);
                sf[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        sx[i][j] = sx[0][j] + delta * (sx[i][j] - sx[0][j]);
                    sf[i] = eval(sx[i]);
                }
            }
        }
    }

    order();
    res.x = sx[0];
    res.f = sf[0];
    res.evals = evals;
    return res;
}

} // namespace hestonfit
