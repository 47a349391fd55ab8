#pragma once

// Quantitative checks of the analytic properties of the evolution: the
// conserved energy and symmetry currents, the stability bound for positive
// symbols, the exponential growth rate on negative spectrum, spectral
// intervals, convergence of kernel families to the classical operator, and
// discontinuity tracking.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "detail/minimize.hpp"
#include "grid.hpp"
#include "kernels.hpp"
#include "series.hpp"
#include "spectral.hpp"

namespace nlwave {

/// Energy E_u(t) = (1/2)(<u'|u'> + <u|A u>) with the grid-weighted inner
/// product; constant along propagated solutions.
inline double energy(const Field& u, const Field& udot, const DispersionSymbol& sym) {
    require_on_grid(sym, u, "energy");
    require_on_grid(sym, udot, "energy");
    const Field au = apply_operator(sym, u);
    const double kinetic = std::real(inner(udot, udot));
    const double potential = std::real(inner(u, au));
    return 0.5 * (kinetic + potential);
}

/// Symmetry current j_{u,v}(t) = <u|v'> - <u'|v>; constant along any pair of
/// solutions of the same equation.
inline std::complex<double> current_j(const Field& u, const Field& udot, const Field& v,
                                      const Field& vdot) {
    return inner(u, vdot) - inner(udot, v);
}

/// Current j_{u,B}(t) = <u|B u'> - <u'|B u> with B the (bounded) convolution
/// by C, which commutes with the governing operator. Identically zero for
/// real-valued solutions; complex data makes it a nontrivial invariant.
inline std::complex<double> current_jB(const Field& u, const Field& udot,
                                       const Micromodulus& C) {
    const Field bu = conv_power_numeric(C, u, 1);
    const Field budot = conv_power_numeric(C, udot, 1);
    return inner(u, budot) - inner(udot, bu);
}

/// Pair variant <u|B v'> - <u'|B v>; conserved since B v is itself a solution.
inline std::complex<double> current_jB(const Field& u, const Field& udot, const Field& v,
                                       const Field& vdot, const Micromodulus& C) {
    const Field bv = conv_power_numeric(C, v, 1);
    const Field bvdot = conv_power_numeric(C, vdot, 1);
    return inner(u, bvdot) - inner(udot, bv);
}

// ---------------------------------------------------------------------------
// Stability / instability
// ---------------------------------------------------------------------------

struct StabilityReport {
    bool applicable = false; // false when the symbol has negative modes
    bool ok = false;
    double max_violation = 0.0; // max over times of ||u(t)|| - (||xi|| + |t| ||eta||)
};

/// Checks ||u(t)||_2 <= ||xi||_2 + |t| ||eta||_2 + 1e-10 at each sampled time.
/// Skipped (applicable = false) when the symbol is not positive.
inline StabilityReport stability_check(const DispersionSymbol& sym, const Field& xi,
                                       const Field& eta, const std::vector<double>& times) {
    StabilityReport rep;
    if (sym.lambda_min < 0.0) return rep;
    rep.applicable = true;
    const double nxi = l2_norm(xi);
    const double neta = l2_norm(eta);
    double worst = -1e300;
    for (double t : times) {
        const auto [u, udot] = propagate(sym, xi, eta, t);
        (void)udot;
        worst = std::max(worst, l2_norm(u) - (nxi + std::abs(t) * neta));
    }
    rep.max_violation = worst;
    rep.ok = worst <= 1e-10;
    return rep;
}

struct InstabilityResult {
    double lambda0 = 0.0;      // minimized symbol value (negative)
    double k0 = 0.0;           // wavenumber attaining it
    double measured_rate = 0.0; // least-squares slope of log ||u|| near t_max
    double band_spread = 0.0;  // max |lambda - lambda0| over the packet band
};

/// Launches a narrow frequency packet at the most unstable mode and measures
/// the exponential growth rate of ||u(t)||; the cosh lower bound makes the
/// rate approach sqrt(|lambda0|). k_center overrides the packet location
/// (e.g. to probe an oscillatory mode, where the rate is ~0).
inline InstabilityResult instability_growth(const Micromodulus& C, double rho, double t_max,
                                            const GridPtr& grid,
                                            std::optional<double> k_center = std::nullopt) {
    if (!(rho > 0.0)) throw std::invalid_argument("instability_growth: rho must be > 0");
    auto lam = [&](double k) { return dispersion(C, rho, k); };

    const double k_nyq = Grid1D::pi() / grid->spacing();
    auto [k_min, lam_min] = detail::scan_minimize(lam, 0.0, k_nyq, 20001);
    if (!(lam_min < 0.0))
        throw std::domain_error("instability_growth: symbol has no negative values");

    InstabilityResult res;
    res.lambda0 = lam_min;
    res.k0 = k_min;
    const double k_pack = k_center.value_or(k_min);

    // Packet bandwidth: narrow enough that the symbol varies by < 5% of
    // |lambda0| across +-3 sigma of the packet.
    double dk = 0.1 * std::max(k_pack, 1.0);
    double spread = 0.0;
    for (int iter = 0; iter < 60; ++iter) {
        spread = 0.0;
        const double lam_c = lam(k_pack);
        for (int i = -30; i <= 30; ++i) {
            const double k = k_pack + dk * 0.1 * static_cast<double>(i);
            spread = std::max(spread, std::abs(lam(k) - lam_c));
        }
        if (spread <= 0.05 * std::abs(res.lambda0)) break;
        dk *= 0.5;
    }
    res.band_spread = spread;

    Field xi_hat(grid);
    for (std::size_t j = 0; j < grid->size(); ++j) {
        const double k = grid->frequency(j);
        const double d = std::abs(k) - k_pack;
        xi_hat.values[j] = std::exp(-d * d / (2.0 * dk * dk));
    }
    const Field xi = idft(xi_hat);
    const Field eta(grid);
    const DispersionSymbol sym = build_symbol(C, rho, grid);

    const int n_samples = 33;
    std::vector<double> ts, lognorms;
    for (int i = 0; i < n_samples; ++i) {
        const double t = t_max * static_cast<double>(i) / (n_samples - 1);
        if (t < 0.75 * t_max) continue;
        const auto [u, udot] = propagate(sym, xi, eta, t);
        (void)udot;
        ts.push_back(t);
        lognorms.push_back(std::log(l2_norm(u)));
    }
    // least-squares slope
    double st = 0, sy = 0, stt = 0, sty = 0;
    const auto m = static_cast<double>(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sy += lognorms[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * lognorms[i];
    }
    res.measured_rate = (m * sty - st * sy) / (m * stt - st * st);
    return res;
}

// ---------------------------------------------------------------------------
// Spectrum and convergence
// ---------------------------------------------------------------------------

/// (min, max) of the dispersion symbol over [0, k_max], refined by local
/// minimization. An inner approximation of the spectrum, which is the closure
/// of the symbol's range.
inline std::pair<double, double> spectrum_interval(const Micromodulus& C, double rho,
                                                   double k_max) {
    if (!(k_max > 0.0)) throw std::invalid_argument("spectrum_interval: k_max must be > 0");
    auto lam = [&](double k) { return dispersion(C, rho, k); };
    const double lo = detail::scan_minimize(lam, 0.0, k_max, 20001).second;
    const double hi = detail::scan_maximize(lam, 0.0, k_max, 20001).second;
    return {lo, hi};
}

enum class KernelFamily { box, scaled_gaussian };

struct ConvergenceRecord {
    std::vector<double> nu_values;
    std::vector<double> errors; // ||u_nu(t) - u_classical(t)||_2
    double t = 0.0;
};

/// Propagates fixed data under A_{C_nu} for each scale parameter and records
/// the L2 distance to the classical solution at time t. Also verifies the
/// symbol bounds 0 <= lambda_nu(k) <= (E/rho) k^2 on every grid frequency.
inline ConvergenceRecord convergence_study(KernelFamily family,
                                           const std::vector<double>& nu_values,
                                           const MaterialParams& params, const GridPtr& grid,
                                           const Field& xi, const Field& eta, double t) {
    if (nu_values.empty())
        throw std::invalid_argument("convergence_study: nu list must not be empty");
    for (std::size_t i = 1; i < nu_values.size(); ++i)
        if (!(nu_values[i] > nu_values[i - 1]))
            throw std::invalid_argument("convergence_study: nu list must be strictly increasing");

    ConvergenceRecord rec;
    rec.t = t;
    rec.nu_values = nu_values;

    const DispersionSymbol cl_sym = classical_symbol(params, grid);
    const auto [u_cl, udot_cl] = propagate(cl_sym, xi, eta, t);
    (void)udot_cl;

    for (double nu : nu_values) {
        Micromodulus C = family == KernelFamily::box
                             ? Micromodulus(BoxKernel{params.E, nu})
                             : Micromodulus(ScaledGaussianKernel{params.E, nu});
        const DispersionSymbol sym = build_symbol(C, params.rho, grid);
        for (std::size_t j = 0; j < grid->size(); ++j) {
            const double k = grid->frequency(j);
            const double classical = params.E / params.rho * k * k;
            if (sym.lambda[j] < -1e-12 || sym.lambda[j] > classical + 1e-12)
                throw std::runtime_error("convergence_study: symbol bound violated");
        }
        const auto [u_nu, udot_nu] = propagate(sym, xi, eta, t);
        (void)udot_nu;
        double acc = 0.0;
        for (std::size_t i = 0; i < u_nu.values.size(); ++i)
            acc += std::norm(u_nu.values[i] - u_cl.values[i]);
        rec.errors.push_back(std::sqrt(grid->spacing() * acc));
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Jump tracking
// ---------------------------------------------------------------------------

/// Location (cell midpoint) of the maximal single-cell difference, provided
/// it exceeds 5x the median absolute cell difference; ties break toward the
/// smallest |x|. Returns nothing when the threshold is unmet.
inline std::optional<double> jump_tracker(const Field& u) {
    const std::size_t n = u.values.size();
    if (n < 3) return std::nullopt;
    std::vector<double> diffs(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        diffs[i] = std::abs(u.values[i + 1] - u.values[i]);

    std::vector<double> sorted = diffs;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                     sorted.end());
    const double median = sorted[sorted.size() / 2];

    double best = -1.0;
    double best_loc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double loc = 0.5 * (u.grid->point(i) + u.grid->point(i + 1));
        if (diffs[i] > best || (diffs[i] == best && std::abs(loc) < std::abs(best_loc))) {
            best = diffs[i];
            best_loc = loc;
        }
    }
    if (best < 5.0 * median || best == 0.0) return std::nullopt;
    return best_loc;
}

// ---------------------------------------------------------------------------
// Run records and CSV serialization
// ---------------------------------------------------------------------------

namespace detail {

// 17 significant digits: round-trip exact for doubles and byte-stable
// across runs.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Diagnostic trace of one evolution run.
struct RunReport {
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> j_uv;
    std::vector<double> j_uB;
    std::vector<double> l2_norms;
    std::vector<std::optional<double>> jump_locations;
    std::vector<std::pair<std::string, std::string>> metadata;
};

/// Evolves (xi, eta) and fills the report. The companion solution for j_uv
/// swaps the data, v(0) = eta, v'(0) = xi; j_uB uses the run's own solution
/// (identically ~0 for real data). C may be null for classical runs, where no
/// convolution operator exists; j_uB is then recorded as 0.
inline RunReport make_run_report(const Micromodulus* C, const DispersionSymbol& sym,
                                 const Field& xi, const Field& eta,
                                 const std::vector<double>& times) {
    RunReport rep;
    rep.times = times;
    for (double t : times) {
        const auto [u, udot] = propagate(sym, xi, eta, t);
        const auto [v, vdot] = propagate(sym, eta, xi, t);
        rep.energy.push_back(energy(u, udot, sym));
        rep.j_uv.push_back(std::real(current_j(u, udot, v, vdot)));
        rep.j_uB.push_back(C != nullptr ? std::real(current_jB(u, udot, *C)) : 0.0);
        rep.l2_norms.push_back(l2_norm(u));
        rep.jump_locations.push_back(jump_tracker(u));
    }
    return rep;
}

inline RunReport make_run_report(const Micromodulus& C, const DispersionSymbol& sym,
                                 const Field& xi, const Field& eta,
                                 const std::vector<double>& times) {
    return make_run_report(&C, sym, xi, eta, times);
}

inline void write_report_csv(const std::string& path, const RunReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report_csv: cannot open " + path);
    for (const auto& [k, v] : rep.metadata) out << "# " << k << ": " << v << "\n";
    out << "t,energy,j_uv,j_uB,l2_norm,jump_x\n";
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        out << detail::fmt17(rep.times[i]) << ',' << detail::fmt17(rep.energy[i]) << ','
            << detail::fmt17(rep.j_uv[i]) << ',' << detail::fmt17(rep.j_uB[i]) << ','
            << detail::fmt17(rep.l2_norms[i]) << ',';
        if (rep.jump_locations[i]) out << detail::fmt17(*rep.jump_locations[i]);
        out << '\n';
    }
}

inline void write_convergence_csv(const std::string& path, const ConvergenceRecord& rec) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_convergence_csv: cannot open " + path);
    out << "nu,l2_error\n";
    for (std::size_t i = 0; i < rec.nu_values.size(); ++i)
        out << detail::fmt17(rec.nu_values[i]) << ',' << detail::fmt17(rec.errors[i]) << '\n';
}

} // namespace nlwave
