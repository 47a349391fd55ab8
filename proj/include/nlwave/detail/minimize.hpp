#pragma once

// Scalar scan-and-refine minimization used for symbol extrema.

#include <cmath>
#include <cstddef>
#include <utility>

namespace nlwave::detail {

// Golden-section minimization of f on [a, b].
inline std::pair<double, double> golden_minimize(const auto& f, double a, double b,
                                                 double x_tol = 1e-12) {
    const double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (std::abs(b - a) > x_tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

// Dense scan on [a, b] followed by golden refinement around the best sample.
// Returns (argmin, min).
inline std::pair<double, double> scan_minimize(const auto& f, double a, double b,
                                               std::size_t samples) {
    double best_x = a, best_f = f(a);
    const double step = (b - a) / static_cast<double>(samples - 1);
    for (std::size_t i = 1; i < samples; ++i) {
        const double x = a + step * static_cast<double>(i);
        const double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
    }
    const double lo = std::max(a, best_x - step);
    const double hi = std::min(b, best_x + step);
    auto [xr, fr] = golden_minimize(f, lo, hi);
    if (fr < best_f) return {xr, fr};
    return {best_x, best_f};
}

inline std::pair<double, double> scan_maximize(const auto& f, double a, double b,
                                               std::size_t samples) {
    auto [x, v] = scan_minimize([&f](double t) { return -f(t); }, a, b, samples);
    return {x, -v};
}

} // namespace nlwave::detail
