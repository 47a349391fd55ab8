#pragma once

// Special functions for the Bessel-series propagator: spherical Bessel
// functions j_{-1}, j_0, j_1, ..., the confluent hypergeometric limit 0F1,
// and the complementary error function (plus its scaled variant erfcx).
//
// Accuracy targets: j_n to <= 1e-13 relative for n <= 200, x <= 500;
// erfc to 1e-14 relative for |x| <= 10. 0F1 is summed in double-double
// arithmetic because the alternating series at z = -x^2/4 loses ~8 digits
// in plain double for x ~ 20.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef __FAST_MATH__
#error "nlwave/specfun.hpp relies on error-free float transforms; build without -ffast-math"
#endif

namespace nlwave {

namespace detail {

// ---------------------------------------------------------------------------
// Minimal double-double arithmetic (Dekker/Knuth error-free transforms).
// Only what the 0F1 and erf series need.
// ---------------------------------------------------------------------------

struct dd {
    double hi = 0.0;
    double lo = 0.0;
};

inline dd two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline dd quick_two_sum(double a, double b) {
    // requires |a| >= |b|
    const double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd dd_add(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd dd_mul(dd a, double b) {
    dd p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
}

inline dd dd_mul(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline dd dd_div(dd a, double b) {
    const double q1 = a.hi / b;
    const dd p = two_prod(q1, b);
    const double r = ((a.hi - p.hi) - p.lo) + a.lo;
    const double q2 = r / b;
    return quick_two_sum(q1, q2);
}

constexpr double pi_const = 3.141592653589793238462643383279502884;

} // namespace detail

// ---------------------------------------------------------------------------
// Spherical Bessel functions
// ---------------------------------------------------------------------------

/// Row of spherical Bessel values j_{-1}(x) ... j_{order_max}(x) sharing one
/// recurrence pass, so the three-term relation holds across the row to
/// roundoff.
class BesselTable {
public:
    BesselTable(int order_max, double x, std::vector<double> values)
        : order_max_(order_max), x_(x), values_(std::move(values)) {}

    int order_max() const { return order_max_; }
    double argument() const { return x_; }

    /// j_n(x) for n in [-1, order_max].
    double j(int n) const {
        if (n < -1 || n > order_max_)
            throw std::out_of_range("BesselTable::j: order " + std::to_string(n) +
                                    " outside [-1, " + std::to_string(order_max_) + "]");
        return values_[static_cast<std::size_t>(n + 1)];
    }

    const std::vector<double>& values() const { return values_; }

private:
    int order_max_;
    double x_;
    std::vector<double> values_; // values_[i] = j_{i-1}(x)
};

namespace detail {

// Power series around x = 0:
//   j_n(x) = x^n/(2n+1)!! * (1 - (x^2/2)/(1!(2n+3)) + (x^2/2)^2/(2!(2n+3)(2n+5)) - ...)
// Used for x < 0.01 where the recurrences hit 0/0.
inline double sph_bessel_series_small(int n, double x) {
    const double x2h = 0.5 * x * x;
    double pref = 1.0; // x^n / (2n+1)!!
    for (int m = 1; m <= n; ++m) pref *= x / static_cast<double>(2 * m + 1);
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m <= 12; ++m) {
        term *= -x2h / (static_cast<double>(m) * static_cast<double>(2 * (n + m) + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return pref * sum;
}

// Upward recurrence j_{n+1} = (2n+1)/x j_n - j_{n-1}, stable for n < x.
inline void sph_bessel_upward(int n_max, double x, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(n_max) + 2);
    const double jm1 = std::cos(x) / x;
    const double j0 = std::sin(x) / x;
    out[0] = jm1;
    out[1] = j0;
    double prev = jm1, cur = j0;
    for (int n = 0; n < n_max; ++n) {
        const double next = (2.0 * n + 1.0) / x * cur - prev;
        out[static_cast<std::size_t>(n) + 2] = next;
        prev = cur;
        cur = next;
    }
}

// Miller's downward recurrence from a start order well above both n_max and
// the turning point, normalized against the closed forms for j_0 or j_1
// (whichever is larger in magnitude, so normalization never divides by a
// near-zero of sin or cos).
inline void sph_bessel_downward(int n_max, double x, std::vector<double>& out) {
    const int start = n_max + static_cast<int>(std::ceil(std::sqrt(40.0 * n_max))) + 20;
    out.assign(static_cast<std::size_t>(n_max) + 2, 0.0);

    double jp = 0.0;     // j_{n+1} (unnormalized)
    double jc = 1e-300;  // j_n     (unnormalized)
    const double rescale_limit = 1e250;
    for (int n = start; n >= 0; --n) {
        const double jm = (2.0 * n + 3.0) / x * jc - jp; // j_{n-1+1} pattern shifted: computes j_n-1 of (n+1)
        jp = jc;
        jc = jm;
        if (n <= n_max) out[static_cast<std::size_t>(n) + 1] = jc;
        if (std::abs(jc) > rescale_limit) {
            const double s = 1.0 / rescale_limit;
            jp *= s;
            jc *= s;
            for (auto& v : out) v *= s;
        }
    }

    const double j0_ref = std::sin(x) / x;
    const double j1_ref = std::sin(x) / (x * x) - std::cos(x) / x;
    double scale;
    if (std::abs(j0_ref) >= std::abs(j1_ref))
        scale = j0_ref / out[1];
    else
        scale = j1_ref / out[2];
    for (std::size_t i = 1; i < out.size(); ++i) out[i] *= scale;
    out[0] = std::cos(x) / x; // j_{-1} from its definition
}

} // namespace detail

/// Batch evaluation of j_{-1}(x) ... j_{n_max}(x).
/// Throws std::domain_error for x < 0, n_max < 0, or x = 0 (j_{-1}(0) is
/// undefined; use spherical_bessel_j for single orders n >= 0 at x = 0).
inline BesselTable bessel_row(int n_max, double x) {
    if (n_max < 0) throw std::domain_error("bessel_row: n_max must be >= 0");
    if (x < 0.0) throw std::domain_error("bessel_row: x must be >= 0");
    if (x == 0.0) throw std::domain_error("bessel_row: j_{-1}(0) is undefined");

    std::vector<double> vals;
    if (x < 0.01) {
        vals.resize(static_cast<std::size_t>(n_max) + 2);
        vals[0] = std::cos(x) / x;
        for (int n = 0; n <= n_max; ++n)
            vals[static_cast<std::size_t>(n) + 1] = detail::sph_bessel_series_small(n, x);
    } else if (x > static_cast<double>(n_max)) {
        detail::sph_bessel_upward(n_max, x, vals);
    } else {
        detail::sph_bessel_downward(n_max, x, vals);
    }
    return BesselTable(n_max, x, std::move(vals));
}

/// Spherical Bessel function j_n(x) for n >= -1, x >= 0, with
/// j_{-1}(x) = cos(x)/x. (n, x) = (-1, 0) is a domain error; j_n(0) = 0 for
/// n >= 1 and j_0(0) = 1.
inline double spherical_bessel_j(int n, double x) {
    if (n < -1) throw std::domain_error("spherical_bessel_j: order must be >= -1");
    if (x < 0.0) throw std::domain_error("spherical_bessel_j: x must be >= 0");
    if (x == 0.0) {
        if (n == -1) throw std::domain_error("spherical_bessel_j: j_{-1}(0) is undefined");
        return n == 0 ? 1.0 : 0.0;
    }
    if (n == -1) return std::cos(x) / x;
    if (x < 0.01) return detail::sph_bessel_series_small(n, x);
    return bessel_row(n, x).j(n);
}

// ---------------------------------------------------------------------------
// Confluent hypergeometric limit 0F1
// ---------------------------------------------------------------------------

/// 0F1(-; b; z) = sum_k z^k / ((b)_k k!), b > 0.
///
/// Summed in double-double arithmetic; for z = -x^2/4 the partial sums reach
/// ~cosh(x) while the result is ~cos(x), so plain double would be unusable
/// past x ~ 10. Intended for cross-validating the Bessel identities.
inline double hyper_0F1(double b, double z) {
    if (!(b > 0.0)) throw std::domain_error("hyper_0F1: b must be > 0");
    using detail::dd;
    dd sum{1.0, 0.0};
    dd term{1.0, 0.0};
    double max_mag = 1.0;
    for (int k = 0; k < 2000; ++k) {
        const double denom = (b + static_cast<double>(k)) * (static_cast<double>(k) + 1.0);
        term = detail::dd_div(detail::dd_mul(term, z), denom);
        sum = detail::dd_add(sum, term);
        max_mag = std::max(max_mag, std::abs(sum.hi));
        if (std::abs(term.hi) < 1e-34 * max_mag) break;
    }
    return sum.hi + sum.lo;
}

// ---------------------------------------------------------------------------
// Complementary error function
// ---------------------------------------------------------------------------

namespace detail {

// erfc via the erf Maclaurin series, adequate through x ~ 2.5 where the
// continued fraction takes over. The whole computation, including the
// 1 - erf subtraction, stays in double-double: collapsing erf to double
// first would cost ~1e-13 relative in erfc near the branch switch.
inline dd erfc_series_dd(double x) {
    const dd z = two_prod(-x, x); // -x^2 kept error-free
    dd term{x, 0.0};
    dd sum = term;
    for (int k = 1; k < 200; ++k) {
        term = dd_div(dd_mul(term, z), static_cast<double>(k));
        const dd contrib = dd_div(term, 2.0 * k + 1.0);
        sum = dd_add(sum, contrib);
        if (std::abs(contrib.hi) < 1e-34 * std::abs(sum.hi)) break;
    }
    const dd two_over_sqrt_pi{1.1283791670955126, 1.5335459613165881e-17};
    const dd erf = dd_add(dd_mul(two_over_sqrt_pi, sum.hi),
                          dd_mul(two_over_sqrt_pi, sum.lo));
    return dd_add(dd{1.0, 0.0}, dd{-erf.hi, -erf.lo});
}

// DLMF 7.9.1 continued fraction for sqrt(pi) e^{x^2} erfc(x), evaluated with
// the modified Lentz algorithm in long double. Converges quickly for x >= 2.5.
inline long double erfcx_cf(long double x) {
    const long double tiny = 1e-40L;
    const long double x2 = x * x;
    long double f = x2, C = f, D = 0.0L;
    for (int m = 1; m < 400; ++m) {
        const long double a = 0.5L * m;
        const long double b = (m % 2 == 1) ? 1.0L : x2;
        D = b + a * D;
        if (D == 0.0L) D = tiny;
        C = b + a / C;
        if (C == 0.0L) C = tiny;
        D = 1.0L / D;
        const long double delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0L) < 1e-20L) break;
    }
    const long double sqrt_pi = 1.7724538509055160272981674833411451828L;
    return x / (sqrt_pi * f);
}

} // namespace detail

/// Scaled complementary error function erfcx(x) = e^{x^2} erfc(x), x >= 0.
/// Stable for large x where erfc underflows.
inline double erfcx(double x) {
    if (x < 0.0) throw std::domain_error("erfcx: requires x >= 0 (use erfc for negatives)");
    if (x < 2.5) {
        const detail::dd e = detail::erfc_series_dd(x);
        return std::exp(x * x) * (e.hi + e.lo);
    }
    return static_cast<double>(detail::erfcx_cf(static_cast<long double>(x)));
}

/// Complementary error function, erfc(x) = (2/sqrt(pi)) int_x^inf e^{-t^2} dt,
/// with erfc(-x) = 2 - erfc(x).
inline double erfc(double x) {
    if (x < 0.0) return 2.0 - erfc(-x);
    if (x < 2.5) {
        const detail::dd e = detail::erfc_series_dd(x);
        return e.hi + e.lo;
    }
    if (x > 27.0) return 0.0; // below double underflow threshold
    const long double v = detail::erfcx_cf(static_cast<long double>(x)) *
                          std::exp(-static_cast<long double>(x) * x);
    return static_cast<double>(v);
}

} // namespace nlwave
