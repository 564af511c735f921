#pragma once

#include <algorithm>
#include <vector>

namespace hestonfit::detail {

// Cumulative integral of tabulated nonnegative values by the 2-step
// Adams-Moulton rule (locally O(h^4)); increments clamped at 0 so the
// result is monotone.
inline std::vector<double> cumulative_am2(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double inc;
        if (i + 2 < n)
            inc = h / 12.0 * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]);
        else
            inc = h / 12.0 * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1]);
        cum[i + 1] = cum[i] + std::max(inc, 0.0);
    }
    return cum;
}

// Monotone cubic Hermite on one cell; slopes clamped to the Fritsch-Carlson
// bound so interpolation between cumulative values cannot overshoot.
inline double hermite_cdf(double c0, double c1, double f0, double f1, double h, double s) {
    const double secant = (c1 - c0) / h;
    const double m0 = std::min(f0, 3.0 * secant);
    const double m1 = std::min(f1, 3.0 * secant);
    const double s2 = s * s, s3 = s2 * s;
    return c0 * (2.0 * s3 - 3.0 * s2 + 1.0) + h * m0 * (s3 - 2.0 * s2 + s) +
           c1 * (-2.0 * s3 + 3.0 * s2) + h * m1 * (s3 - s2);
}

} // namespace hestonfit::detail
