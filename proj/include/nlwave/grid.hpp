#pragma once

// Uniform periodic truncation of the line and sampled fields on it, plus the
// discrete surrogate of the unitary Fourier transform. Normalization is
// chosen so that dft approximates (F2 f)(k) = (2 pi)^{-1/2} int e^{-ikx} f dx
// at the grid wavenumbers and Parseval holds in the grid-weighted norms:
//   sum |f|^2 h = sum |fhat|^2 (2 pi / L).

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

namespace nlwave {

/// Grid over [-L/2, L/2) with n points (n a power of two, n >= 8).
/// Wavenumbers k_j = 2 pi j / L are stored in FFT order
/// j = 0, 1, ..., n/2-1, -n/2, ..., -1.
class Grid1D {
public:
    Grid1D(std::size_t n, double length) : n_(n), length_(length) {
        if (n < 8 || (n & (n - 1)) != 0)
            throw std::invalid_argument("Grid1D: n must be a power of two, n >= 8");
        if (!(length > 0.0)) throw std::invalid_argument("Grid1D: length must be > 0");
        spacing_ = length_ / static_cast<double>(n_);
        freqs_.resize(n_);
        const double dk = 2.0 * pi() / length_;
        for (std::size_t j = 0; j < n_; ++j) {
            const auto sj = static_cast<std::ptrdiff_t>(j < n_ / 2 ? j : j - n_);
            freqs_[j] = dk * static_cast<double>(sj);
        }
    }

    std::size_t size() const { return n_; }
    double length() const { return length_; }
    double spacing() const { return spacing_; }
    double frequency_step() const { return 2.0 * pi() / length_; }

    /// Sample point x_i = -L/2 + i h.
    double point(std::size_t i) const {
        return -0.5 * length_ + spacing_ * static_cast<double>(i);
    }

    /// Wavenumber of mode j in FFT order.
    double frequency(std::size_t j) const { return freqs_[j]; }
    const std::vector<double>& frequencies() const { return freqs_; }

    bool same_as(const Grid1D& other) const {
        return n_ == other.n_ && length_ == other.length_;
    }

    static constexpr double pi() { return 3.141592653589793238462643383279502884; }

private:
    std::size_t n_;
    double length_;
    double spacing_;
    std::vector<double> freqs_;
};

using GridPtr = std::shared_ptr<const Grid1D>;

inline GridPtr make_grid(std::size_t n, double length) {
    return std::make_shared<const Grid1D>(n, length);
}

/// Sampled displacement (or spectrum) on a grid.
struct Field {
    GridPtr grid;
    std::vector<std::complex<double>> values;

    Field() = default;
    explicit Field(GridPtr g)
        : grid(std::move(g)), values(grid ? grid->size() : 0, std::complex<double>(0.0)) {}
};

inline void require_same_grid(const Field& a, const Field& b, const char* where) {
    if (!a.grid || !b.grid || !a.grid->same_as(*b.grid))
        throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

inline Field sample_real(const GridPtr& grid, const auto& fn) {
    Field f(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) f.values[i] = fn(grid->point(i));
    return f;
}

/// Grid-weighted inner product <f|g> = h sum conj(f_i) g_i (physical space).
inline std::complex<double> inner(const Field& f, const Field& g) {
    require_same_grid(f, g, "inner");
    std::complex<double> s(0.0);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        s += std::conj(f.values[i]) * g.values[i];
    return f.grid->spacing() * s;
}

inline double l2_norm(const Field& f) {
    double s = 0.0;
    for (const auto& v : f.values) s += std::norm(v);
    return std::sqrt(f.grid->spacing() * s);
}

namespace detail {

// In-place iterative radix-2 FFT; sign = -1 forward, +1 inverse (unscaled).
inline void fft_radix2(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    // one table of the n/2 roots of unity, reused by every stage
    std::vector<std::complex<double>> roots(n / 2);
    const double base = sign * 2.0 * Grid1D::pi() / static_cast<double>(n);
    for (std::size_t m = 0; m < n / 2; ++m)
        roots[m] = std::polar(1.0, base * static_cast<double>(m));

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> w = roots[k * stride];
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

} // namespace detail

/// Discrete unitary Fourier transform: fhat_j approximates (F2 f)(k_j).
/// idft(dft(f)) returns f to roundoff.
inline Field dft(const Field& f) {
    Field out = f;
    detail::fft_radix2(out.values, -1);
    const double scale = f.grid->spacing() / std::sqrt(2.0 * Grid1D::pi());
    // The grid starts at -L/2, so mode j picks up the phase e^{i k_j L/2} = (-1)^j.
    for (std::size_t j = 0; j < out.values.size(); ++j) {
        out.values[j] *= (j % 2 == 0) ? scale : -scale;
    }
    return out;
}

inline Field idft(const Field& fhat) {
    Field tmp = fhat;
    const double scale = std::sqrt(2.0 * Grid1D::pi()) / fhat.grid->length();
    for (std::size_t j = 0; j < tmp.values.size(); ++j) {
        tmp.values[j] *= (j % 2 == 0) ? scale : -scale;
    }
    detail::fft_radix2(tmp.values, +1);
    return tmp;
}

} // namespace nlwave
