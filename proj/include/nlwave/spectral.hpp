#pragma once

// Exact-in-time evolution by applying bounded functions of the governing
// operator as Fourier multipliers. Conjugated by the discrete transform, the
// nonlocal operator acts mode-wise as multiplication by
// lambda(k) = (1/rho)[(F1 C)(0) - (F1 C)(k)], and the classical operator as
// (E/rho) k^2. The wave propagators are the entire extensions of cos(t sqrt(.))
// and sin(t sqrt(.))/sqrt(.), which continue to cosh/sinh on negative spectrum.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "grid.hpp"
#include "kernels.hpp"

namespace nlwave {

/// Multiplier lambda(k_j) realized on a grid's frequency set.
struct DispersionSymbol {
    GridPtr grid;
    std::vector<double> lambda; // FFT mode order, lambda[0] is the k = 0 mode
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

namespace detail {

inline void cache_extrema(DispersionSymbol& sym) {
    sym.lambda_min = sym.lambda[0];
    sym.lambda_max = sym.lambda[0];
    for (double v : sym.lambda) {
        sym.lambda_min = std::min(sym.lambda_min, v);
        sym.lambda_max = std::max(sym.lambda_max, v);
    }
}

} // namespace detail

/// Symbol of the governing operator A_C on a grid.
inline DispersionSymbol build_symbol(const Micromodulus& C, double rho, GridPtr grid) {
    if (!(rho > 0.0)) throw std::invalid_argument("build_symbol: rho must be > 0");
    DispersionSymbol sym;
    sym.grid = std::move(grid);
    sym.lambda.resize(sym.grid->size());
    const double sym0 = fourier_symbol(C, 0.0);
    for (std::size_t j = 0; j < sym.lambda.size(); ++j)
        sym.lambda[j] = (sym0 - fourier_symbol(C, sym.grid->frequency(j))) / rho;
    sym.lambda[0] = 0.0; // k = 0 mode, exact
    detail::cache_extrema(sym);
    return sym;
}

/// Symbol (E/rho) k^2 of the classical operator -(E/rho) d^2/dx^2.
inline DispersionSymbol classical_symbol(const MaterialParams& params, GridPtr grid) {
    DispersionSymbol sym;
    sym.grid = std::move(grid);
    sym.lambda.resize(sym.grid->size());
    const double c2 = params.E / params.rho;
    for (std::size_t j = 0; j < sym.lambda.size(); ++j) {
        const double k = sym.grid->frequency(j);
        sym.lambda[j] = c2 * k * k;
    }
    detail::cache_extrema(sym);
    return sym;
}

inline void require_on_grid(const DispersionSymbol& sym, const Field& f, const char* where) {
    if (!f.grid || !f.grid->same_as(*sym.grid))
        throw std::invalid_argument(std::string(where) + ": field not on the symbol's grid");
}

/// A f = idft(lambda . dft(f)).
inline Field apply_operator(const DispersionSymbol& sym, const Field& f) {
    require_on_grid(sym, f, "apply_operator");
    Field fhat = dft(f);
    for (std::size_t j = 0; j < fhat.values.size(); ++j) fhat.values[j] *= sym.lambda[j];
    return idft(fhat);
}

// Entire extension of cos(t sqrt(lambda)).
inline double cos_propagator(double t, double lambda) {
    if (lambda > 0.0) return std::cos(t * std::sqrt(lambda));
    if (lambda < 0.0) return std::cosh(t * std::sqrt(-lambda));
    return 1.0;
}

// Entire extension of sin(t sqrt(lambda))/sqrt(lambda); equals t at lambda = 0.
inline double sin_propagator(double t, double lambda) {
    if (lambda > 0.0) {
        const double r = std::sqrt(lambda);
        return std::sin(t * r) / r;
    }
    if (lambda < 0.0) {
        const double r = std::sqrt(-lambda);
        return std::sinh(t * r) / r;
    }
    return t;
}

/// Solution of u'' = -A u, u(0) = xi, u'(0) = eta, evaluated exactly at time t
/// (no time-stepping). Returns (u(t), u'(t)); carrying both makes the group
/// property propagate(t1+t2) = propagate(t2) o propagate(t1) hold to roundoff.
inline std::pair<Field, Field> propagate(const DispersionSymbol& sym, const Field& xi,
                                         const Field& eta, double t) {
    require_on_grid(sym, xi, "propagate");
    require_on_grid(sym, eta, "propagate");
    Field xhat = dft(xi);
    Field ehat = dft(eta);
    Field uhat(sym.grid), vhat(sym.grid);
    for (std::size_t j = 0; j < uhat.values.size(); ++j) {
        const double lam = sym.lambda[j];
        const double a = cos_propagator(t, lam);
        const double s = sin_propagator(t, lam);
        uhat.values[j] = a * xhat.values[j] + s * ehat.values[j];
        vhat.values[j] = -lam * s * xhat.values[j] + a * ehat.values[j];
    }
    return {idft(uhat), idft(vhat)};
}

/// Forcing sampled in time; must return a field on the symbol's grid.
using ForcingProvider = std::function<Field(double)>;

/// Default Simpson panel count: resolves the fastest mode's oscillation with
/// ~8 panels per period.
inline int duhamel_default_panels(double t, double lambda_max) {
    const double needed = std::abs(t) * std::sqrt(std::max(lambda_max, 0.0)) * 8.0;
    auto n = static_cast<int>(std::ceil(needed));
    if (n < 64) n = 64;
    if (n % 2 != 0) ++n;
    return n;
}

/// Duhamel solution v(t) = int_0^t [sin((t-tau) sqrt(.))/sqrt(.)](A) f(tau) dtau
/// of v'' + A v = f with v(0) = v'(0) = 0, via composite Simpson with n_quad
/// panels. Requires a positive symbol (lambda >= 0 on every mode).
inline Field duhamel(const DispersionSymbol& sym, const ForcingProvider& forcing, double t,
                     int n_quad) {
    if (sym.lambda_min < 0.0)
        throw std::domain_error("duhamel: symbol has negative modes; the operator must be positive");
    if (n_quad <= 0 || n_quad % 2 != 0)
        throw std::invalid_argument("duhamel: n_quad must be even and positive");

    Field acc(sym.grid);
    if (t == 0.0) return acc;

    const double step = t / static_cast<double>(n_quad);
    for (int i = 0; i <= n_quad; ++i) {
        const double tau = static_cast<double>(i) * step;
        double w = (i == 0 || i == n_quad) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        w *= step / 3.0;
        Field fhat = dft(forcing(tau));
        require_on_grid(sym, fhat, "duhamel forcing");
        for (std::size_t j = 0; j < acc.values.size(); ++j)
            acc.values[j] += w * sin_propagator(t - tau, sym.lambda[j]) * fhat.values[j];
    }
    return idft(acc);
}

inline Field duhamel(const DispersionSymbol& sym, const ForcingProvider& forcing, double t) {
    return duhamel(sym, forcing, t, duhamel_default_panels(t, sym.lambda_max));
}

} // namespace nlwave
