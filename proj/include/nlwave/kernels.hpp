#pragma once

// Micromodulus kernel models. Every kernel C is even and integrable; the
// governing operator acts as (1/rho)[(int C) f - C*f], so each model carries
// its exact mass, L1 norm and Fourier symbol (F1 C)(k) = int e^{-ikx} C dx.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nlwave {

namespace detail {

constexpr double sqrt_two_pi = 2.5066282746310005024157652848110452530;

// Adaptive Gauss-Kronrod (7-15) quadrature. Used for L1 norms of
// sign-changing mixtures where no closed form exists.
struct gk_result {
    double value;
    double error;
};

inline gk_result gauss_kronrod_15(const auto& f, double a, double b) {
    // Standard QK15 nodes/weights on [-1, 1].
    static const double xgk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static const double wgk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static const double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double result_g = 0.0, result_k = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double fv = f(c - h * xgk[i]) + f(c + h * xgk[i]);
        result_k += wgk[i] * fv;
        if (i % 2 == 1) result_g += wg[i / 2] * fv;
    }
    const double f_center = f(c);
    result_k += wgk[7] * f_center;
    result_g += wg[3] * f_center;
    result_k *= h;
    result_g *= h;
    return {result_k, std::abs(result_k - result_g)};
}

inline double integrate_adaptive(const auto& f, double a, double b, double abs_tol,
                                 int depth = 0) {
    const gk_result r = gauss_kronrod_15(f, a, b);
    if (r.error <= abs_tol || depth >= 48) return r.value;
    const double m = 0.5 * (a + b);
    return integrate_adaptive(f, a, m, 0.5 * abs_tol, depth + 1) +
           integrate_adaptive(f, m, b, 0.5 * abs_tol, depth + 1);
}

// sin(u)/u with the removable singularity expanded for small |u|.
inline double sinc(double u) {
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0 - u2 * u2 * u2 / 5040.0;
    }
    return std::sin(u) / u;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Kernel models
// ---------------------------------------------------------------------------

/// C(x) = a/(sqrt(2 pi) sigma) exp(-x^2/(2 sigma^2)); mass a.
struct GaussianKernel {
    double a;
    double sigma;
};

/// C = 3 E nu^3 on [-1/nu, 1/nu], zero outside; mass 6 E nu^2.
struct BoxKernel {
    double E;
    double nu;
};

/// C = (2 E nu^3 / sqrt(2 pi)) exp(-(nu^2/2) x^2); mass 2 E nu^2.
struct ScaledGaussianKernel {
    double E;
    double nu;
};

/// Sum of Gaussian terms a_i N(0, sigma_i^2); amplitudes may be negative.
struct SignedGaussianMixture {
    std::vector<std::pair<double, double>> terms; // (a_i, sigma_i)
};

/// Tabulated even kernel. Only the half-line x = 0, h, 2h, ... is stored and
/// the kernel is mirrored, so evenness holds structurally. Values are
/// linearly interpolated and zero outside the sampled support.
class SampledKernel {
public:
    SampledKernel(double spacing, std::vector<double> half_samples)
        : h_(spacing), half_(std::move(half_samples)) {
        if (!(h_ > 0.0)) throw std::invalid_argument("SampledKernel: spacing must be > 0");
        if (half_.size() < 2) throw std::invalid_argument("SampledKernel: need at least 2 samples");
    }

    /// Builds from a full symmetric table covering [-X, X]. Rejects input
    /// whose halves disagree instead of symmetrizing silently.
    static SampledKernel from_full(double spacing, const std::vector<double>& full) {
        if (full.size() < 3 || full.size() % 2 == 0)
            throw std::invalid_argument("SampledKernel: full table must have odd size >= 3");
        const std::size_t m = full.size() / 2;
        std::vector<double> half(m + 1);
        for (std::size_t i = 0; i <= m; ++i) {
            const double right = full[m + i];
            const double left = full[m - i];
            if (left != right)
                throw std::invalid_argument("SampledKernel: table is not even-symmetric");
            half[i] = right;
        }
        return SampledKernel(spacing, std::move(half));
    }

    double spacing() const { return h_; }
    const std::vector<double>& half_samples() const { return half_; }
    double support_radius() const { return h_ * static_cast<double>(half_.size() - 1); }

    double value_at(double x) const {
        const double ax = std::abs(x);
        const double pos = ax / h_;
        const auto idx = static_cast<std::size_t>(pos);
        if (idx >= half_.size() - 1) {
            return pos <= static_cast<double>(half_.size() - 1) ? half_.back() : 0.0;
        }
        const double frac = pos - static_cast<double>(idx);
        return half_[idx] + frac * (half_[idx + 1] - half_[idx]);
    }

private:
    double h_;
    std::vector<double> half_;
};

using Micromodulus = std::variant<GaussianKernel, BoxKernel, ScaledGaussianKernel,
                                  SignedGaussianMixture, SampledKernel>;

/// Density and Young's modulus for the classical comparison operator.
struct MaterialParams {
    double rho;
    double E;

    MaterialParams(double rho_, double E_) : rho(rho_), E(E_) {
        if (!(rho > 0.0)) throw std::invalid_argument("MaterialParams: rho must be > 0");
        if (!(E > 0.0)) throw std::invalid_argument("MaterialParams: E must be > 0");
    }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

namespace detail {

inline double trapezoid_even(const SampledKernel& k, const auto& weight) {
    // Trapezoid over the even extension [-R, R]; weight(x) must be even.
    const auto& half = k.half_samples();
    const std::size_t m = half.size();
    double sum = half[0] * weight(0.0);
    for (std::size_t i = 1; i + 1 < m; ++i)
        sum += 2.0 * half[i] * weight(k.spacing() * static_cast<double>(i));
    sum += half[m - 1] * weight(k.spacing() * static_cast<double>(m - 1));
    return k.spacing() * sum;
}

} // namespace detail

/// Pointwise kernel value C(x).
inline double evaluate(const Micromodulus& C, double x) {
    return std::visit(
        [x](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, GaussianKernel>) {
                return k.a / (detail::sqrt_two_pi * k.sigma) *
                       std::exp(-x * x / (2.0 * k.sigma * k.sigma));
            } else if constexpr (std::is_same_v<T, BoxKernel>) {
                return std::abs(x) <= 1.0 / k.nu ? 3.0 * k.E * k.nu * k.nu * k.nu : 0.0;
            } else if constexpr (std::is_same_v<T, ScaledGaussianKernel>) {
                return 2.0 * k.E * k.nu * k.nu * k.nu / detail::sqrt_two_pi *
                       std::exp(-0.5 * k.nu * k.nu * x * x);
            } else if constexpr (std::is_same_v<T, SignedGaussianMixture>) {
                double s = 0.0;
                for (const auto& [a, sigma] : k.terms)
                    s += a / (detail::sqrt_two_pi * sigma) *
                         std::exp(-x * x / (2.0 * sigma * sigma));
                return s;
            } else {
                return k.value_at(x);
            }
        },
        C);
}

/// Kernel mass c = int C dx (exact for closed forms, trapezoid for samples).
inline double mass(const Micromodulus& C) {
    return std::visit(
        [](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, GaussianKernel>) {
                return k.a;
            } else if constexpr (std::is_same_v<T, BoxKernel>) {
                return 6.0 * k.E * k.nu * k.nu;
            } else if constexpr (std::is_same_v<T, ScaledGaussianKernel>) {
                return 2.0 * k.E * k.nu * k.nu;
            } else if constexpr (std::is_same_v<T, SignedGaussianMixture>) {
                double s = 0.0;
                for (const auto& [a, sigma] : k.terms) s += a;
                return s;
            } else {
                return detail::trapezoid_even(k, [](double) { return 1.0; });
            }
        },
        C);
}

/// L1 norm of the kernel, int |C| dx.
inline double l1_norm(const Micromodulus& C) {
    return std::visit(
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
                double total = 0.0, max_sigma = 0.0;
                for (const auto& [a, sigma] : k.terms) {
                    nonneg = nonneg && a >= 0.0;
                    nonpos = nonpos && a <= 0.0;
                    total += a;
                    max_sigma = std::max(max_sigma, sigma);
                }
                if (nonneg || nonpos || k.terms.empty()) return std::abs(total);
                const double R = 12.0 * max_sigma;
                return detail::integrate_adaptive(
                    [&C](double x) { return std::abs(evaluate(C, x)); }, -R, R, 1e-12);
            } else {
                const auto& half = k.half_samples();
                const std::size_t m = half.size();
                double sum = std::abs(half[0]);
                for (std::size_t i = 1; i + 1 < m; ++i) sum += 2.0 * std::abs(half[i]);
                sum += std::abs(half[m - 1]);
                return k.spacing() * sum;
            }
        },
        C);
}

/// Fourier symbol (F1 C)(k) = int e^{-ikx} C dx = int cos(kx) C dx; real and
/// even since C is real and even.
inline double fourier_symbol(const Micromodulus& C, double k) {
    return std::visit(
        [k](const auto& ker) -> double {
            using T = std::decay_t<decltype(ker)>;
            if constexpr (std::is_same_v<T, GaussianKernel>) {
                return ker.a * std::exp(-0.5 * ker.sigma * ker.sigma * k * k);
            } else if constexpr (std::is_same_v<T, BoxKernel>) {
                return 6.0 * ker.E * ker.nu * ker.nu * detail::sinc(k / ker.nu);
            } else if constexpr (std::is_same_v<T, ScaledGaussianKernel>) {
                return 2.0 * ker.E * ker.nu * ker.nu *
                       std::exp(-0.5 * k * k / (ker.nu * ker.nu));
            } else if constexpr (std::is_same_v<T, SignedGaussianMixture>) {
                double s = 0.0;
                for (const auto& [a, sigma] : ker.terms)
                    s += a * std::exp(-0.5 * sigma * sigma * k * k);
                return s;
            } else {
                return detail::trapezoid_even(
                    ker, [k](double x) { return std::cos(k * x); });
            }
        },
        C);
}

/// Dispersion relation lambda(k) = (1/rho)[(F1 C)(0) - (F1 C)(k)] of the
/// governing operator; even in k with lambda(0) = 0.
inline double dispersion(const Micromodulus& C, double rho, double k) {
    if (!(rho > 0.0)) throw std::invalid_argument("dispersion: rho must be > 0");
    return (fourier_symbol(C, 0.0) - fourier_symbol(C, k)) / rho;
}

/// Operator norm bound (|int C| + ||C||_1)/rho for the governing operator;
/// never exceeds 2 ||C||_1 / rho.
inline double operator_norm_bound(const Micromodulus& C, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("operator_norm_bound: rho must be > 0");
    return (std::abs(mass(C)) + l1_norm(C)) / rho;
}

// ---------------------------------------------------------------------------
// Kernel specification grammar
// ---------------------------------------------------------------------------
//
//   gaussian(a=1,sigma=1) | box(E=1,nu=4) | scaled_gaussian(E=1,nu=8)
//   | mixture((1.2,0.5),(-1,1)) | sampled(path.csv)
//
// The sampled CSV has two columns "x,value" with x >= 0 ascending and
// uniformly spaced starting at 0.

namespace detail {

inline std::string strip_spaces(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

inline double parse_number(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("kernel spec: bad number for " + what + ": '" + s + "'");
    }
    if (pos != s.size())
        throw std::invalid_argument("kernel spec: trailing junk in " + what + ": '" + s + "'");
    return v;
}

// Splits "k1=v1,k2=v2" into pairs.
inline std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& body) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t start = 0;
    while (start < body.size()) {
        std::size_t comma = body.find(',', start);
        if (comma == std::string::npos) comma = body.size();
        const std::string item = body.substr(start, comma - start);
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("kernel spec: expected key=value, got '" + item + "'");
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        start = comma + 1;
    }
    return out;
}

inline SampledKernel load_sampled_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("sampled kernel: cannot open '" + path + "'");
    std::vector<double> xs, vals;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string xs_str, v_str;
        if (!std::getline(ls, xs_str, ',') || !std::getline(ls, v_str))
            throw std::invalid_argument("sampled kernel: malformed line '" + line + "'");
        if (first) {
            first = false;
            // allow a header row
            try {
                (void)std::stod(xs_str);
            } catch (const std::exception&) {
                continue;
            }
        }
        xs.push_back(parse_number(strip_spaces(xs_str), "x"));
        vals.push_back(parse_number(strip_spaces(v_str), "value"));
    }
    if (xs.size() < 2) throw std::invalid_argument("sampled kernel: need at least 2 rows");
    if (xs[0] != 0.0) throw std::invalid_argument("sampled kernel: x must start at 0");
    const double h = xs[1] - xs[0];
    if (!(h > 0.0)) throw std::invalid_argument("sampled kernel: x must be ascending");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (std::abs(xs[i] - static_cast<double>(i) * h) > 1e-9 * h * static_cast<double>(i + 1))
            throw std::invalid_argument("sampled kernel: x must be uniformly spaced");
    }
    return SampledKernel(h, std::move(vals));
}

} // namespace detail

/// Parses the kernel grammar used by config files and the CLI.
/// Throws std::invalid_argument on malformed input.
inline Micromodulus parse_micromodulus(const std::string& spec) {
    const std::string s = detail::strip_spaces(spec);
    const std::size_t open = s.find('(');
    if (open == std::string::npos || s.back() != ')')
        throw std::invalid_argument("kernel spec: expected name(...), got '" + spec + "'");
    const std::string name = s.substr(0, open);
    const std::string body = s.substr(open + 1, s.size() - open - 2);

    auto get = [&](const std::vector<std::pair<std::string, std::string>>& kv,
                   const std::string& key) -> double {
        for (const auto& [k, v] : kv)
            if (k == key) return detail::parse_number(v, key);
        throw std::invalid_argument("kernel spec: missing parameter '" + key + "' in " + name);
    };

    if (name == "gaussian") {
        const auto kv = detail::parse_kv(body);
        return GaussianKernel{get(kv, "a"), get(kv, "sigma")};
    }
    if (name == "box") {
        const auto kv = detail::parse_kv(body);
        return BoxKernel{get(kv, "E"), get(kv, "nu")};
    }
    if (name == "scaled_gaussian") {
        const auto kv = detail::parse_kv(body);
        return ScaledGaussianKernel{get(kv, "E"), get(kv, "nu")};
    }
    if (name == "mixture") {
        SignedGaussianMixture mix;
        std::size_t i = 0;
        while (i < body.size()) {
            if (body[i] == ',') {
                ++i;
                continue;
            }
            if (body[i] != '(')
                throw std::invalid_argument("kernel spec: expected '(' in mixture terms");
            const std::size_t close = body.find(')', i);
            if (close == std::string::npos)
                throw std::invalid_argument("kernel spec: unbalanced parens in mixture");
            const std::string pair = body.substr(i + 1, close - i - 1);
            const std::size_t comma = pair.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("kernel spec: mixture term needs (a,sigma)");
            const double a = detail::parse_number(pair.substr(0, comma), "a");
            const double sigma = detail::parse_number(pair.substr(comma + 1), "sigma");
            if (!(sigma > 0.0))
                throw std::invalid_argument("kernel spec: mixture sigma must be > 0");
            mix.terms.emplace_back(a, sigma);
            i = close + 1;
        }
        if (mix.terms.empty())
            throw std::invalid_argument("kernel spec: mixture needs at least one term");
        return mix;
    }
    if (name == "sampled") {
        return detail::load_sampled_csv(body);
    }
    throw std::invalid_argument("kernel spec: unknown kernel '" + name + "'");
}

} // namespace nlwave
