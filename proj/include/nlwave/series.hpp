#pragma once

// Truncated spherical-Bessel operator-series propagator. Writing the
// governing operator as (c/rho) - (1/rho) C* with c = int C > 0, the wave
// propagators expand in convolution powers of the kernel:
//
//   cos family:  sum_k  (1/(2^k k!)) x^{k+1} j_{k-1}(x) c^{-k} (C^k * f),
//   sin family:  t sum_k (1/(2^k k!)) x^k     j_k(x)    c^{-k} (C^k * f),
//
// with x = sqrt(c t^2 / rho). Truncating after k = N carries the guaranteed
// operator-norm remainder bounds
//
//   (pi/N!)        min{1, (t^2 ||C||/4)^{N+1}} e^{t^2 ||C||/4}   (cos)
//   (pi|t|/(2(N+1)!)) min{1, (t^2 ||C||/4)^{N+1}} e^{t^2 ||C||/4} (sin)
//
// where ||C|| is the operator norm of (1/rho)(C* .), i.e. sup_k |F1 C(k)|/rho.
// Convolution powers use closed forms for Gaussian kernels paired with
// Gaussian or exponential-jump data, and the Fourier identity
// F2(C^k * f) = (F1 C)^k F2 f otherwise.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "detail/minimize.hpp"
#include "grid.hpp"
#include "kernels.hpp"
#include "specfun.hpp"
#include "spectral.hpp"

namespace nlwave {

// ---------------------------------------------------------------------------
// Truncation error control
// ---------------------------------------------------------------------------

struct TruncationBounds {
    double bound_cos;
    double bound_sin;
};

/// Remainder bounds after keeping terms k = 0..N, in operator norm.
inline TruncationBounds truncation_bounds(int N, double t, double norm_c_op) {
    if (N < 0) throw std::invalid_argument("truncation_bounds: N must be >= 0");
    if (norm_c_op < 0.0) throw std::invalid_argument("truncation_bounds: norm must be >= 0");
    const double q = t * t * norm_c_op / 4.0;
    if (q == 0.0) return {0.0, 0.0};
    const double log_pi = std::log(detail::pi_const);
    const double tail = std::min(0.0, (static_cast<double>(N) + 1.0) * std::log(q));
    const double log_cos = log_pi - std::lgamma(static_cast<double>(N) + 1.0) + tail + q;
    const double log_sin = log_pi - std::log(2.0) + std::log(std::abs(t)) -
                           std::lgamma(static_cast<double>(N) + 2.0) + tail + q;
    return {std::exp(log_cos), std::exp(log_sin)};
}

constexpr int series_order_cap = 400;

/// Smallest N whose cos and sin bounds both meet tol. Throws when no
/// N <= 400 reaches it.
inline int choose_order(double t, double norm_c_op, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("choose_order: tol must be > 0");
    for (int N = 0; N <= series_order_cap; ++N) {
        const TruncationBounds b = truncation_bounds(N, t, norm_c_op);
        if (std::max(b.bound_cos, b.bound_sin) <= tol) return N;
    }
    throw std::domain_error("choose_order: tolerance unreachable with N <= 400");
}

/// Operator norm of (1/rho)(C* .), equal to sup_k |F1 C(k)| / rho. Evaluated
/// in closed form where the symbol's maximum is known, otherwise by a dense
/// scan with golden refinement; grid frequencies are included when given.
inline double conv_operator_norm(const Micromodulus& C, double rho,
                                 const Grid1D* grid = nullptr) {
    if (!(rho > 0.0)) throw std::invalid_argument("conv_operator_norm: rho must be > 0");
    double sup = std::visit(
        [&C](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, GaussianKernel>) {
                return std::abs(k.a);
            } else if constexpr (std::is_same_v<T, BoxKernel>) {
                return std::abs(6.0 * k.E * k.nu * k.nu);
            } else if constexpr (std::is_same_v<T, ScaledGaussianKernel>) {
                return std::abs(2.0 * k.E * k.nu * k.nu);
            } else if constexpr (std::is_same_v<T, SignedGaussianMixture>) {
                bool nonneg = true, nonpos = true;
                double total = 0.0, min_sigma = k.terms.front().second;
                for (const auto& [a, sigma] : k.terms) {
                    nonneg = nonneg && a >= 0.0;
                    nonpos = nonpos && a <= 0.0;
                    total += a;
                    min_sigma = std::min(min_sigma, sigma);
                }
                if (nonneg || nonpos) return std::abs(total);
                auto abs_sym = [&C](double kk) { return std::abs(fourier_symbol(C, kk)); };
                return detail::scan_maximize(abs_sym, 0.0, 25.0 / min_sigma, 20001).second;
            } else {
                const double k_nyq = Grid1D::pi() / k.spacing();
                auto abs_sym = [&C](double kk) { return std::abs(fourier_symbol(C, kk)); };
                return detail::scan_maximize(abs_sym, 0.0, k_nyq,
                                             8 * k.half_samples().size() + 17)
                    .second;
            }
        },
        C);
    if (grid != nullptr) {
        for (std::size_t j = 0; j < grid->size(); ++j)
            sup = std::max(sup, std::abs(fourier_symbol(C, grid->frequency(j))));
    }
    return sup / rho;
}

// ---------------------------------------------------------------------------
// Series plan
// ---------------------------------------------------------------------------

/// Truncation order, Bessel coefficients and guaranteed remainder bounds for
/// one (kernel, time) pair. Construction is pure; plans are freely shareable.
struct SeriesPlan {
    int order = 0;
    double t = 0.0;
    double c = 0.0;         // kernel mass, > 0
    double rho = 1.0;
    double norm_c_op = 0.0; // operator norm of (1/rho)(C* .)
    std::vector<double> coef_cos; // coef_cos[k] = x^{k+1} j_{k-1}(x) / (2^k k!)
    std::vector<double> coef_sin; // coef_sin[k] = t x^k j_k(x) / (2^k k!)
    double bound_cos = 0.0;
    double bound_sin = 0.0;
};

inline SeriesPlan make_series_plan(const Micromodulus& C, double rho, double t, double tol,
                                   const Grid1D* grid = nullptr) {
    if (!(rho > 0.0)) throw std::invalid_argument("make_series_plan: rho must be > 0");
    const double c = mass(C);
    if (!(c > 0.0))
        throw std::domain_error(
            "make_series_plan: kernel mass must be > 0 (use the spectral solver otherwise)");

    SeriesPlan plan;
    plan.t = t;
    plan.c = c;
    plan.rho = rho;
    plan.norm_c_op = conv_operator_norm(C, rho, grid);
    plan.order = choose_order(t, plan.norm_c_op, tol);
    const TruncationBounds b = truncation_bounds(plan.order, t, plan.norm_c_op);
    plan.bound_cos = b.bound_cos;
    plan.bound_sin = b.bound_sin;

    const auto N = static_cast<std::size_t>(plan.order);
    plan.coef_cos.assign(N + 1, 0.0);
    plan.coef_sin.assign(N + 1, 0.0);
    if (t == 0.0) {
        plan.coef_cos[0] = 1.0; // continuous extension at t = 0
        return plan;
    }

    const double x = std::sqrt(c / rho) * std::abs(t);
    const BesselTable row = bessel_row(plan.order, x);
    const double log_x = std::log(x);
    const double log_2 = std::log(2.0);
    for (std::size_t k = 0; k <= N; ++k) {
        const auto kd = static_cast<double>(k);
        const double log_common = -kd * log_2 - std::lgamma(kd + 1.0);
        plan.coef_cos[k] = row.j(static_cast<int>(k) - 1) *
                           std::exp((kd + 1.0) * log_x + log_common);
        plan.coef_sin[k] = t * row.j(static_cast<int>(k)) * std::exp(kd * log_x + log_common);
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Convolution powers
// ---------------------------------------------------------------------------

/// (C_sigma^k * f)(x) for a Gaussian kernel with amplitude a and width sigma
/// against Gaussian data of width sigma_d:
///   a^k / (sqrt(2 pi) sqrt(k sigma^2 + sigma_d^2)) e^{-x^2 / (2 (k sigma^2 + sigma_d^2))}.
/// k = 0 returns f(x) itself.
inline double conv_power_gaussian(int k, double a, double sigma, double sigma_d, double x) {
    if (k < 0) throw std::domain_error("conv_power_gaussian: k must be >= 0");
    if (!(sigma > 0.0) || !(sigma_d > 0.0))
        throw std::invalid_argument("conv_power_gaussian: widths must be > 0");
    const double var = static_cast<double>(k) * sigma * sigma + sigma_d * sigma_d;
    return std::pow(a, k) / (detail::sqrt_two_pi * std::sqrt(var)) *
           std::exp(-x * x / (2.0 * var));
}

/// (C_sigma^k * f)(x) for the exponential-jump data f = b e^{-eps x} chi_{[0,inf)}.
/// k = 0 is the data itself with the pointwise limit b/2 at x = 0; k >= 1 is
///   a^k (b/2) e^{q^2} e^{-eps x} erfc(q - x/(sigma sqrt(2k))),  q = eps sigma sqrt(2k)/2,
/// evaluated through erfcx so large q never overflows.
inline double conv_power_expjump(int k, double a, double sigma, double b, double eps,
                                 double x) {
    if (k < 0) throw std::domain_error("conv_power_expjump: k must be >= 0");
    if (!(sigma > 0.0) || !(b > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("conv_power_expjump: sigma, b, eps must be > 0");
    if (k == 0) {
        if (x > 0.0) return b * std::exp(-eps * x);
        if (x == 0.0) return 0.5 * b;
        return 0.0;
    }
    const double w = sigma * std::sqrt(2.0 * static_cast<double>(k));
    const double q = 0.5 * eps * w;
    const double r = x / w;
    const double y = q - r;
    double val;
    if (y >= 0.0) {
        // (b/2) e^{q^2 - eps x} erfc(y) = (b/2) erfcx(y) e^{-r^2}
        val = 0.5 * erfcx(y) * std::exp(-r * r);
    } else {
        // exponent q^2 - eps x = -q^2 - 2 q |y| <= 0, no overflow
        val = 0.5 * std::exp(q * q - eps * x) * erfc(y);
    }
    return std::pow(a, k) * b * val;
}

/// C^k * f on a grid through the Fourier identity F2(C*f) = (F1 C) F2 f.
inline Field conv_power_numeric(const Micromodulus& C, const Field& f, int k) {
    if (k < 0) throw std::domain_error("conv_power_numeric: k must be >= 0");
    if (k == 0) return f;
    Field fhat = dft(f);
    for (std::size_t j = 0; j < fhat.values.size(); ++j) {
        const double sym = fourier_symbol(C, f.grid->frequency(j));
        fhat.values[j] *= std::pow(sym, k);
    }
    return idft(fhat);
}

// ---------------------------------------------------------------------------
// Series propagation
// ---------------------------------------------------------------------------

struct ZeroData {};

/// Gaussian bump 1/(sqrt(2 pi) sigma_d) e^{-x^2/(2 sigma_d^2)}.
struct GaussianData {
    double sigma_d;
};

/// Jump data b e^{-eps x} chi_{[0,inf)}.
struct ExpJumpData {
    double b;
    double eps;
};

using SeriesData = std::variant<ZeroData, GaussianData, ExpJumpData, Field>;

struct SeriesResult {
    Field u;
    double err_bound; // bound_cos ||xi|| + bound_sin ||eta|| in L2
};

namespace detail {

inline double data_l2_norm(const SeriesData& d) {
    if (std::holds_alternative<ZeroData>(d)) return 0.0;
    if (const auto* g = std::get_if<GaussianData>(&d))
        return std::sqrt(1.0 / (2.0 * std::sqrt(pi_const) * g->sigma_d));
    if (const auto* e = std::get_if<ExpJumpData>(&d)) return e->b / std::sqrt(2.0 * e->eps);
    return l2_norm(std::get<Field>(d));
}

inline Field sample_data(const GridPtr& grid, const SeriesData& d) {
    if (const auto* g = std::get_if<GaussianData>(&d)) {
        const double sd = g->sigma_d;
        return sample_real(grid, [sd](double x) {
            return std::exp(-x * x / (2.0 * sd * sd)) / (sqrt_two_pi * sd);
        });
    }
    if (const auto* e = std::get_if<ExpJumpData>(&d)) {
        const double b = e->b, eps = e->eps;
        return sample_real(grid,
                           [b, eps](double x) { return conv_power_expjump(0, 1.0, 1.0, b, eps, x); });
    }
    return std::get<Field>(d);
}

// Adds the closed-form sum over convolution powers for one family of
// coefficients. Only valid for a Gaussian kernel.
inline void accumulate_closed_form(Field& u, const std::vector<double>& coef,
                                   const GaussianKernel& ker, double kernel_mass,
                                   const SeriesData& data) {
    const double ratio = ker.a / kernel_mass; // = 1 when mass equals amplitude
    const GridPtr& grid = u.grid;
    if (const auto* g = std::get_if<GaussianData>(&data)) {
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double x = grid->point(i);
            double s = 0.0, rk = 1.0;
            for (std::size_t k = 0; k < coef.size(); ++k) {
                s += coef[k] * rk *
                     conv_power_gaussian(static_cast<int>(k), 1.0, ker.sigma, g->sigma_d, x);
                rk *= ratio;
            }
            u.values[i] += s;
        }
        return;
    }
    const auto& e = std::get<ExpJumpData>(data);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double x = grid->point(i);
        double s = 0.0, rk = 1.0;
        for (std::size_t k = 0; k < coef.size(); ++k) {
            s += coef[k] * rk *
                 conv_power_expjump(static_cast<int>(k), 1.0, ker.sigma, e.b, e.eps, x);
            rk *= ratio;
        }
        u.values[i] += s;
    }
}

// Adds the truncated series for one family through the Fourier identity:
// per mode, sum_k coef[k] (F1 C (k_j)/c)^k evaluated by Horner.
inline void accumulate_numeric(Field& u, const std::vector<double>& coef,
                               const Micromodulus& C, double kernel_mass, const Field& data) {
    Field dhat = dft(data);
    for (std::size_t j = 0; j < dhat.values.size(); ++j) {
        const double z = fourier_symbol(C, data.grid->frequency(j)) / kernel_mass;
        double m = coef.back();
        for (std::size_t k = coef.size() - 1; k-- > 0;) m = m * z + coef[k];
        dhat.values[j] *= m;
    }
    const Field contrib = idft(dhat);
    for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] += contrib.values[i];
}

inline bool closed_form_applies(const Micromodulus& C, const SeriesData& d) {
    return std::holds_alternative<GaussianKernel>(C) &&
           (std::holds_alternative<GaussianData>(d) || std::holds_alternative<ExpJumpData>(d));
}

} // namespace detail

/// u(t) from the truncated Bessel series: cos family applied to xi plus sin
/// family applied to eta. err_bound is the guaranteed L2 error of the
/// truncation, bound_cos ||xi||_2 + bound_sin ||eta||_2.
inline SeriesResult series_propagate(const SeriesPlan& plan, const Micromodulus& C,
                                     const GridPtr& grid, const SeriesData& xi,
                                     const SeriesData& eta) {
    const double c = mass(C);
    if (!(c > 0.0))
        throw std::domain_error("series_propagate: kernel mass must be > 0");

    SeriesResult res;
    res.u = Field(grid);
    res.err_bound = plan.bound_cos * detail::data_l2_norm(xi) +
                    plan.bound_sin * detail::data_l2_norm(eta);

    auto run_family = [&](const std::vector<double>& coef, const SeriesData& data) {
        if (std::holds_alternative<ZeroData>(data)) return;
        if (detail::closed_form_applies(C, data)) {
            detail::accumulate_closed_form(res.u, coef, std::get<GaussianKernel>(C), c, data);
        } else {
            Field sampled = detail::sample_data(grid, data);
            require_same_grid(res.u, sampled, "series_propagate");
            detail::accumulate_numeric(res.u, coef, C, c, sampled);
        }
    };
    run_family(plan.coef_cos, xi);
    run_family(plan.coef_sin, eta);
    return res;
}

} // namespace nlwave
