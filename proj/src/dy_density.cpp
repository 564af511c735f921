#include "hestonfit/dy_density.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "hestonfit/detail/cum_grid.hpp"
#include "hestonfit/errors.hpp"
#include "hestonfit/special.hpp"

namespace hestonfit {

namespace {

using cd = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// exp(z) - 1 without cancellation for small |z|:
// e^{x+iy} - 1 = expm1(x) cos y - 2 sin^2(y/2) + i e^x sin y.
cd cexpm1(cd z) {
    double ex = std::exp(z.real());
    double re = std::expm1(z.real()) * std::cos(z.imag()) -
                2.0 * std::sin(0.5 * z.imag()) * std::sin(0.5 * z.imag());
    return {re, ex * std::sin(z.imag())};
}

// log(1 + z) without cancellation: |1+z|^2 = 1 + (2x + x^2 + y^2).
cd clog1p(cd z) {
    double x = z.real(), y = z.imag();
    return {0.5 * std::log1p(2.0 * x + x * x + y * y), std::atan2(y, 1.0 + x)};
}

struct FtParts {
    cd value;
    cd omega;
};

// Core of the log-characteristic function. All differences that suffer
// cancellation as k -> 0 or rho -> 0 are evaluated in quotient form:
//   Omega - Gamma        = k^2(p^2 - ip) / (Omega + Gamma)
//   Omega - gamma        = (i rho k p (Gamma + gamma) + k^2(p^2-ip)) / (Omega + gamma)
//   (2 gamma - Gamma) - Omega = -(4 i gamma rho k p + k^2(p^2-ip)) / ((2 gamma - Gamma) + Omega)
// and ln[cosh a + b sinh a] = a + log1p(-(1-b)/2 * (1 - e^{-2a})), keeping only
// the decaying exponential. The leading terms combine analytically so that the
// 2*gamma*theta/k^2 prefactor never multiplies a rounded difference:
//   term1 + (Omega t/2 part of term3) = -gamma theta t (p^2 - ip) / (Omega + Gamma).
FtParts ft_eval(const HestonParams& hp, double t, double p, FtVariant variant) {
    const double g = hp.gamma, th = hp.theta, k = hp.k, rho = hp.rho;
    if (p == 0.0) return {cd(0.0, 0.0), cd(g, 0.0)};

    const cd G(g, rho * k * p);                 // Gamma
    const cd pp(p * p, -p);                     // p^2 - i p
    const cd w2 = k * k * pp;                   // Omega^2 - Gamma^2, exact
    const cd Om = std::sqrt(G * G + w2);        // Re(Om^2) = g^2 + k^2 p^2 (1-rho^2) > 0
    const cd D = w2 / (Om + G);                 // Omega - Gamma
    const cd a = Om * (0.5 * t);
    const cd em = -cexpm1(-2.0 * a);            // 1 - e^{-2a}

    const double C = 2.0 * g * th / (k * k);
    const cd lead = -g * th * t * pp / (Om + G);

    // delta3 = (1 - b3)/2 with b3 = (w2 + 2 gamma Gamma) / (2 gamma Omega)
    const cd two_g_minus_G(g, -rho * k * p);
    const cd diff2 = (cd(0.0, -4.0 * g * rho * k * p) - w2) / (two_g_minus_G + Om);
    const cd delta3 = D * diff2 / (4.0 * g * Om);

    cd F = lead - C * clog1p(-delta3 * em);

    if (variant == FtVariant::ThreeTerm) {
        // middle term: ln[(cosh a + (gamma/Om) sinh a) / (cosh a + (Gamma/Om) sinh a)];
        // numerator and denominator coincide bit-for-bit when rho = 0.
        const cd dg = (cd(0.0, rho * k * p) * (G + g) + w2) / (Om + g);  // Omega - gamma
        const cd delta_num = dg / (2.0 * Om);
        const cd delta_den = D / (2.0 * Om);
        F -= C * (clog1p(-delta_num * em) - clog1p(-delta_den * em));
    }
    return {F, Om};
}

} // namespace

std::complex<double> characteristic_exponent(const HestonParams& params, TimeLag tau,
                                             double p, FtVariant variant) {
    params.validate();
    tau.validate();
    if (!std::isfinite(p)) throw DomainError("characteristic_exponent: p must be finite");
    return ft_eval(params, tau.days(), p, variant).value;
}

struct DyDensity::Impl {
    struct Node {
        cd ef;      // exp(F(p_j))
        cd omega;   // branch monitor state
    };

    // Characteristic-function node cache at dyadic points j * p_max / 2^level.
    mutable std::mutex cf_mutex;
    mutable std::vector<Node> nodes;
    mutable int level = 0;
    mutable std::atomic<long> flips{0};

    // CDF grid, built on first use.
    mutable std::once_flag grid_once;
    mutable std::vector<double> grid_pdf;
    mutable std::vector<double> grid_cum;
    mutable double grid_lo = 0.0, grid_h = 0.0, grid_total = 0.0;
};

DyDensity::DyDensity(const HestonParams& params, TimeLag tau, FtVariant variant,
                     QuadratureConfig quad, GridConfig grid)
    : params_(params), tau_(tau), variant_(variant), quad_(quad), gridcfg_(grid),
      impl_(std::make_unique<Impl>()) {
    params_.validate();
    tau_.validate();
    const double t = tau_.days();
    const double sigma0 = std::sqrt(params_.theta * t);
    const double ln_floor = std::log(quad_.cf_floor);

    auto re_f = [&](double p) { return ft_eval(params_, t, p, variant_).value.real(); };

    // Truncation point: smallest power-of-two multiple of the Gaussian-limit
    // scale with |exp(F)| below the floor.
    double pmax = 16.0 / sigma0;
    int guard = 0;
    while (re_f(pmax) > ln_floor) {
        pmax *= 2.0;
        if (++guard > 60)
            throw NumericError("DyDensity: characteristic function does not decay");
    }
    while (pmax > 32.0 / sigma0 && re_f(0.5 * pmax) < ln_floor) pmax *= 0.5;
    p_max_ = pmax;

    // Moments from central differences of F at 0, Richardson-extrapolated
    // (O(h^2) -> O(h^4)); F is analytic so the h and h/2 evaluations are exact
    // targets for the extrapolation.
    struct Cumulants {
        double mean, var, k4;
    };
    auto stencil = [&](double h) -> Cumulants {
        cd f1 = ft_eval(params_, t, h, variant_).value;
        cd f1m = ft_eval(params_, t, -h, variant_).value;
        cd f2 = ft_eval(params_, t, 2.0 * h, variant_).value;
        cd f2m = ft_eval(params_, t, -2.0 * h, variant_).value;
        Cumulants c;
        c.mean = -((f1 - f1m) / (2.0 * h)).imag();
        c.var = -((f1 + f1m) / (h * h)).real();
        c.k4 = ((f2 + f2m) - 4.0 * (f1 + f1m)).real() / (h * h * h * h);
        return c;
    };
    auto richardson = [&](double h) -> Cumulants {
        const Cumulants a = stencil(h), b = stencil(0.5 * h);
        return {(4.0 * b.mean - a.mean) / 3.0, (4.0 * b.var - a.var) / 3.0,
                (4.0 * b.k4 - a.k4) / 3.0};
    };
    Cumulants c = richardson(0.02 / sigma0);
    if (c.var > 0.0) c = richardson(0.02 / std::sqrt(c.var));
    mean_ = c.mean;
    variance_ = c.var;
    kurt4_ = c.k4;
    if (!(variance_ > 0.0))
        throw NumericError("DyDensity: non-positive variance from characteristic function");

    impl_->nodes.resize(2);
    impl_->nodes[0] = {cd(1.0, 0.0), cd(params_.gamma, 0.0)};
    auto parts = ft_eval(params_, t, p_max_, variant_);
    impl_->nodes[1] = {std::exp(parts.value), parts.omega};
    impl_->level = 0;
}

DyDensity::~DyDensity() = default;

long DyDensity::branch_flips() const { return impl_->flips.load(); }

double DyDensity::pdf(double x) const {
    std::lock_guard<std::mutex> lk(impl_->cf_mutex);
    return pdf_locked(x);
}

double DyDensity::pdf_locked(double x) const {
    auto& im = *impl_;
    const double t = tau_.days();

    auto ensure_level = [&](int L) {
        while (im.level < L) {
            const std::size_t old_n = im.nodes.size();       // 2^level + 1
            std::vector<Impl::Node> next(2 * old_n - 1);
            const double h = p_max_ / static_cast<double>(2 * (old_n - 1));
            for (std::size_t j = 0; j < old_n; ++j) next[2 * j] = im.nodes[j];
            for (std::size_t j = 0; j + 1 < old_n; ++j) {
                const double p = h * static_cast<double>(2 * j + 1);
                auto parts = ft_eval(params_, t, p, variant_);
                next[2 * j + 1] = {std::exp(parts.value), parts.omega};
                // Continuity monitor: a principal-branch jump would land the
                // new Omega closer to the negative of its neighbour.
                const cd& prev = next[2 * j].omega;
                if (std::abs(parts.omega - prev) > std::abs(parts.omega + prev))
                    im.flips.fetch_add(1);
            }
            im.nodes = std::move(next);
            ++im.level;
        }
    };

    // Enough nodes to resolve the e^{ipx} oscillation: >= 8 per cycle.
    int start = quad_.min_level;
    const double cycles = p_max_ * std::abs(x) / (2.0 * kPi);
    while ((1 << start) < 8.0 * cycles && start < quad_.max_level - 2) ++start;

    auto trapezoid_full = [&](int L) {
        const std::size_t n = std::size_t(1) << L;
        const double h = p_max_ / static_cast<double>(n);
        const std::size_t stride = std::size_t(1) << (im.level - L);
        double s = 0.5 * (im.nodes.front().ef.real() * 1.0 +
                          (im.nodes.back().ef * std::polar(1.0, p_max_ * x)).real());
        for (std::size_t j = 1; j < n; ++j) {
            const cd& ef = im.nodes[j * stride].ef;
            s += (ef * std::polar(1.0, h * static_cast<double>(j) * x)).real();
        }
        return s * h;
    };
    auto odd_sum = [&](int L) {
        const std::size_t n = std::size_t(1) << L;
        const double h = p_max_ / static_cast<double>(n);
        const std::size_t stride = std::size_t(1) << (im.level - L);
        double s = 0.0;
        for (std::size_t j = 1; j < n; j += 2) {
            const cd& ef = im.nodes[j * stride].ef;
            s += (ef * std::polar(1.0, h * static_cast<double>(j) * x)).real();
        }
        return s * h;
    };

    ensure_level(std::min(start + 1, quad_.max_level));
    double t_prev = trapezoid_full(start);
    double s_prev = 0.0;
    bool have_s = false;
    for (int L = start + 1; L <= quad_.max_level; ++L) {
        ensure_level(L);
        const double t_cur = 0.5 * t_prev + odd_sum(L);
        const double s_cur = (4.0 * t_cur - t_prev) / 3.0;
        if (im.flips.load() > 0)
            throw NumericError("DyDensity: branch-cut discontinuity detected in Omega");
        if (have_s &&
            std::abs(s_cur - s_prev) <= std::max(quad_.rel_tol * std::abs(s_cur), quad_.abs_floor))
            return s_cur / kPi;
        t_prev = t_cur;
        s_prev = s_cur;
        have_s = true;
    }
    throw NumericError("DyDensity: quadrature did not reach tolerance " +
                       std::to_string(quad_.rel_tol) + " within 2^" +
                       std::to_string(quad_.max_level) + " intervals");
}

void DyDensity::ensure_grid() const {
    std::call_once(impl_->grid_once, [&] {
        auto& im = *impl_;
        const double sigma = std::sqrt(variance_);
        const double z0 = -special::normal_quantile(gridcfg_.tail_mass);

        // Start at the Gaussian-limit tail points, then push outward until the
        // estimated residual mass pdf(edge)/|dlnpdf/dx| is inside the bound.
        auto extend = [&](double edge, double dir) {
            for (;;) {
                if (std::abs(edge - mean_) > gridcfg_.max_sigmas * sigma) return edge;
                const double f0 = std::max(pdf(edge), 0.0);
                if (f0 < 1e-300) return edge;
                const double f1 = std::max(pdf(edge - dir * 0.5 * sigma), 0.0);
                if (f1 > f0) {
                    const double rate = std::log(f1 / f0) / (0.5 * sigma);
                    if (f0 / rate < 0.5 * gridcfg_.tail_mass) return edge;
                }
                edge += dir * sigma;
            }
        };
        const double lo = extend(mean_ - z0 * sigma, -1.0);
        const double hi = extend(mean_ + z0 * sigma, +1.0);

        const int n = gridcfg_.cells + 1;
        im.grid_lo = lo;
        im.grid_h = (hi - lo) / static_cast<double>(gridcfg_.cells);
        im.grid_pdf.resize(n);
        for (int i = 0; i < n; ++i)
            im.grid_pdf[i] = std::max(pdf(lo + im.grid_h * i), 0.0);

        im.grid_cum = detail::cumulative_am2(im.grid_pdf, im.grid_h);
        im.grid_total = im.grid_cum.back();
    });
}

double DyDensity::cdf(double x) const {
    ensure_grid();
    const auto& im = *impl_;
    const int cells = gridcfg_.cells;
    if (x <= im.grid_lo) return 0.0;
    const double hi = im.grid_lo + im.grid_h * cells;
    if (x >= hi) return std::min(im.grid_total, 1.0);
    const double u = (x - im.grid_lo) / im.grid_h;
    int i = std::min(static_cast<int>(u), cells - 1);
    const double c = detail::hermite_cdf(im.grid_cum[i], im.grid_cum[i + 1], im.grid_pdf[i],
                                 im.grid_pdf[i + 1], im.grid_h, u - i);
    return std::clamp(c, 0.0, 1.0);
}

double DyDensity::quantile(double q) const {
    if (!(q > 0.0 && q < 1.0))
        throw DomainError("DyDensity::quantile: q must be in (0,1), got " + std::to_string(q));
    ensure_grid();
    const auto& im = *impl_;
    const int cells = gridcfg_.cells;
    if (q >= im.grid_total) return im.grid_lo + im.grid_h * cells;

    // Bracket the cell, then bisect inside it on the interpolant.
    auto it = std::lower_bound(im.grid_cum.begin(), im.grid_cum.end(), q);
    int i = std::clamp(static_cast<int>(it - im.grid_cum.begin()) - 1, 0, cells - 1);
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double c = detail::hermite_cdf(im.grid_cum[i], im.grid_cum[i + 1], im.grid_pdf[i],
                                     im.grid_pdf[i + 1], im.grid_h, mid);
        if (std::abs(c - q) <= 1e-10 || hi - lo < 1e-16) {
            return im.grid_lo + im.grid_h * (i + mid);
        }
        (c < q ? lo : hi) = mid;
    }
    return im.grid_lo + im.grid_h * (i + 0.5 * (lo + hi));
}

double DyDensity::total_mass() const {
    ensure_grid();
    return impl_->grid_total;
}

double DyDensity::window_lo() const {
    ensure_grid();
    return impl_->grid_lo;
}

double DyDensity::window_hi() const {
    ensure_grid();
    return impl_->grid_lo + impl_->grid_h * gridcfg_.cells;
}

} // namespace hestonfit
