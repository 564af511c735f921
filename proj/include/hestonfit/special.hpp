#pragma once

#include <cstdint>

namespace hestonfit::special {

/// Standard normal density.
double normal_pdf(double z);

/// Standard normal CDF via erfc; absolute accuracy ~1e-15.
double normal_cdf(double z);

/// Inverse standard normal CDF: rational approximation refined by one
/// Newton step, |error| < 1e-13 over (0, 1). Throws DomainError outside (0,1).
double normal_quantile(double p);

/// Unrefined rational approximation, |relative error| < 1.2e-9. For bulk
/// sampling where the refinement cost dominates (simulation draws).
double normal_quantile_fast(double p);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series for x < a+1, Lentz continued fraction otherwise. ~1e-13 absolute.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Kolmogorov asymptotic survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1}
/// exp(-2 k^2 lambda^2), summed to relative 1e-12, clamped to [0, 1].
double kolmogorov_q(double lambda);

} // namespace hestonfit::special
