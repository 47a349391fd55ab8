#include <catch2/catch.hpp>

#include <nlwave/spectral.hpp>

#include <cmath>
#include <complex>

#include "oracles.hpp"

using namespace nlwave;

namespace {

Field gaussian_field(const GridPtr& g, double sigma_d) {
    return sample_real(g, [sigma_d](double x) {
        return std::exp(-x * x / (2.0 * sigma_d * sigma_d)) /
               (std::sqrt(2.0 * oracles::pi) * sigma_d);
    });
}

double diff_norm(const Field& a, const Field& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) acc += std::norm(a.values[i] - b.values[i]);
    return std::sqrt(a.grid->spacing() * acc);
}

} // namespace

TEST_CASE("build_symbol places dispersion values on grid frequencies", "[spectral]") {
    const Micromodulus C = GaussianKernel{1.0, 1.0};
    // L = 16 pi puts k = 2 exactly at mode 16
    const GridPtr g = make_grid(64, 16.0 * oracles::pi);
    const DispersionSymbol sym = build_symbol(C, 1.0, g);
    CHECK(sym.lambda[0] == 0.0);
    CHECK(g.get()->frequency(16) == Approx(2.0));
    CHECK(sym.lambda[16] == Approx(1.0 - std::exp(-2.0)).epsilon(1e-13));
    CHECK(sym.lambda_min >= 0.0);
    CHECK(sym.lambda_max <= operator_norm_bound(C, 1.0) + 1e-12);
    // evenness: mode j and n - j carry opposite wavenumbers
    for (std::size_t j = 1; j < 32; ++j) CHECK(sym.lambda[j] == Approx(sym.lambda[64 - j]));
}

TEST_CASE("classical symbol is (E/rho) k^2", "[spectral]") {
    const GridPtr g = make_grid(16, 2.0 * oracles::pi); // integer wavenumbers
    const DispersionSymbol s1 = classical_symbol(MaterialParams(1.0, 4.0), g);
    CHECK(s1.lambda[0] == 0.0);
    CHECK(s1.lambda[1] == Approx(4.0).epsilon(1e-14));
    const DispersionSymbol s2 = classical_symbol(MaterialParams(4.0, 1.0), g);
    CHECK(s2.lambda[2] == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("apply_operator matches the convolution definition", "[spectral]") {
    const Micromodulus C = GaussianKernel{1.0, 1.0};
    const GridPtr g = make_grid(4096, 80.0);
    const DispersionSymbol sym = build_symbol(C, 1.0, g);

    SECTION("zero and constant fields are annihilated") {
        const Field zero(g);
        const Field az = apply_operator(sym, zero);
        for (const auto& v : az.values) CHECK(std::abs(v) == 0.0);

        Field ones(g);
        for (auto& v : ones.values) v = 1.0;
        const Field ao = apply_operator(sym, ones);
        for (const auto& v : ao.values) CHECK(std::abs(v) < 1e-12);
    }

    SECTION("gaussian data: (A f)(0) = c f(0) - (C*f)(0)") {
        const double sigma_d = 0.5;
        const Field f = gaussian_field(g, sigma_d);
        const Field af = apply_operator(sym, f);
        const std::size_t i0 = g->size() / 2; // x = 0
        REQUIRE(g.get()->point(i0) == Approx(0.0).margin(1e-12));

        // closed form: (C*f)(0) = 1/(sqrt(2 pi) sqrt(sigma^2 + sigma_d^2))
        const double conv0 = 1.0 / (std::sqrt(2.0 * oracles::pi) * std::sqrt(1.25));
        const double f0 = 1.0 / (std::sqrt(2.0 * oracles::pi) * 0.5);
        CHECK(std::real(af.values[i0]) == Approx(f0 - conv0).margin(1e-10));

        // independent quadrature of the convolution at a second point
        const double x1 = g->point(i0 + 64);
        const double conv_x1 = oracles::simpson(
            [&](double y) { return evaluate(C, x1 - y) * std::real(f.values[0]) * 0.0 +
                                   evaluate(C, x1 - y) *
                                       (std::exp(-y * y / (2.0 * sigma_d * sigma_d)) /
                                        (std::sqrt(2.0 * oracles::pi) * sigma_d)); },
            -20.0, 20.0, 1 << 16);
        const double fx1 = std::exp(-x1 * x1 / (2.0 * sigma_d * sigma_d)) /
                           (std::sqrt(2.0 * oracles::pi) * sigma_d);
        CHECK(std::real(af.values[i0 + 64]) == Approx(fx1 - conv_x1).margin(1e-10));
    }

    SECTION("grid mismatch is rejected") {
        const GridPtr g2 = make_grid(64, 80.0);
        CHECK_THROWS_AS(apply_operator(sym, Field(g2)), std::invalid_argument);
    }
}

TEST_CASE("self-adjointness of the multiplier operator", "[spectral][property]") {
    const GridPtr g = make_grid(512, 40.0);
    const Micromodulus kernels[] = {
        Micromodulus(GaussianKernel{1.0, 1.0}),
        Micromodulus(BoxKernel{1.0, 2.0}),
        Micromodulus(SignedGaussianMixture{{{1.2, 0.5}, {-1.0, 1.0}}}),
    };
    const auto rf = oracles::random_reals(g->size(), 11u);
    const auto rg = oracles::random_reals(g->size(), 13u);
    Field f(g), h(g);
    for (std::size_t i = 0; i < g->size(); ++i) {
        f.values[i] = rf[i];
        h.values[i] = rg[i];
    }
    for (const auto& C : kernels) {
        const DispersionSymbol sym = build_symbol(C, 1.3, g);
        const auto lhs = inner(apply_operator(sym, f), h);
        const auto rhs = inner(f, apply_operator(sym, h));
        CHECK(std::abs(lhs - rhs) <= 1e-11 * std::max(1.0, std::abs(lhs)));
        // norm bound on the symbol
        CHECK(std::max(std::abs(sym.lambda_min), std::abs(sym.lambda_max)) <=
              operator_norm_bound(C, 1.3) + 1e-12);
    }
}

TEST_CASE("propagate: identity at t = 0 and group property", "[spectral]") {
    const Micromodulus C = GaussianKernel{1.0, 1.0};
    const GridPtr g = make_grid(1024, 60.0);
    const DispersionSymbol sym = build_symbol(C, 1.0, g);
    const Field xi = gaussian_field(g, 0.5);
    const Field eta = sample_real(g, [](double x) { return x * std::exp(-x * x); });

    SECTION("t = 0 returns the data exactly") {
        const auto [u, udot] = propagate(sym, xi, eta, 0.0);
        CHECK(diff_norm(u, xi) < 1e-14);
        CHECK(diff_norm(udot, eta) < 1e-14);
    }

    SECTION("propagate(t1 + t2) = propagate(t2) o propagate(t1)") {
        const double t1 = 0.7, t2 = 1.9;
        const auto [u1, v1] = propagate(sym, xi, eta, t1);
        const auto [u12, v12] = propagate(sym, u1, v1, t2);
        const auto [u, v] = propagate(sym, xi, eta, t1 + t2);
        CHECK(diff_norm(u12, u) < 1e-12);
        CHECK(diff_norm(v12, v) < 1e-12);
    }

    SECTION("propagating backward undoes forward") {
        const auto [u1, v1] = propagate(sym, xi, eta, 2.5);
        const auto [u0, v0] = propagate(sym, u1, v1, -2.5);
        CHECK(diff_norm(u0, xi) < 1e-12);
        CHECK(diff_norm(v0, eta) < 1e-12);
    }
}

TEST_CASE("classical propagation reproduces d'Alembert", "[spectral]") {
    const GridPtr g = make_grid(4096, 80.0);
    const DispersionSymbol sym = classical_symbol(MaterialParams(1.0, 1.0), g);
    const double sigma_d = 0.5;
    const Field xi = gaussian_field(g, sigma_d);
    const Field eta(g);
    auto xi_fn = [sigma_d](double x) {
        return std::exp(-x * x / (2.0 * sigma_d * sigma_d)) /
               (std::sqrt(2.0 * oracles::pi) * sigma_d);
    };
    for (double t : {1.0, 2.0}) {
        const auto [u, udot] = propagate(sym, xi, eta, t);
        (void)udot;
        const Field ref = sample_real(
            g, [&](double x) { return oracles::dalembert_displacement(xi_fn, x, t); });
        INFO("t=" << t);
        CHECK(diff_norm(u, ref) < 1e-8);
    }
}

TEST_CASE("negative modes grow like cosh(t sqrt(|lambda|))", "[spectral]") {
    const Micromodulus C = SignedGaussianMixture{{{1.2, 0.5}, {-1.0, 1.0}}};
    const GridPtr g = make_grid(512, 40.0);
    const DispersionSymbol sym = build_symbol(C, 1.0, g);
    REQUIRE(sym.lambda_min < 0.0);

    // pick the most negative grid mode and its mirror to keep the field real
    std::size_t j_star = 0;
    for (std::size_t j = 1; j < g->size(); ++j)
        if (sym.lambda[j] < sym.lambda[j_star]) j_star = j;
    Field xhat(g);
    xhat.values[j_star] = 1.0;
    xhat.values[g->size() - j_star] = 1.0;
    const Field xi = idft(xhat);
    const Field eta(g);

    const double t = 3.0;
    const auto [u, udot] = propagate(sym, xi, eta, t);
    (void)udot;
    const double expected = std::cosh(t * std::sqrt(-sym.lambda[j_star]));
    CHECK(l2_norm(u) / l2_norm(xi) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("energy conservation along propagated solutions", "[spectral][property]") {
    const Micromodulus C = GaussianKernel{1.0, 1.0};
    const GridPtr g = make_grid(2048, 80.0);
    const DispersionSymbol sym = build_symbol(C, 1.0, g);
    const Field xi = gaussian_field(g, 0.5);
    const Field eta = sample_real(g, [](double x) { return 0.3 * std::exp(-x * x); });

    auto energy_at = [&](double t) {
        const auto [u, udot] = propagate(sym, xi, eta, t);
        const Field au = apply_operator(sym, u);
        return 0.5 * (std::real(inner(udot, udot)) + std::real(inner(u, au)));
    };
    const double e0 = energy_at(0.0);
    REQUIRE(e0 > 0.0);
    for (double t = 0.5; t <= 10.0 + 1e-9; t += 0.5) {
        INFO("t=" << t);
        CHECK(std::abs(energy_at(t) - e0) <= 1e-11 * e0);
    }
}

TEST_CASE("stability bound for positive symbols", "[spectral][property]") {
    const GridPtr g = make_grid(1024, 60.0);
    const Micromodulus kernels[] = {
        Micromodulus(GaussianKernel{1.0, 1.0}),
        Micromodulus(BoxKernel{1.0, 4.0}),
        Micromodulus(ScaledGaussianKernel{1.0, 2.0}),
    };
    const Field xi = gaussian_field(g, 0.5);
    const Field eta = sample_real(g, [](double x) { return std::exp(-2.0 * x * x); });
    const double nxi = l2_norm(xi), neta = l2_norm(eta);
    for (const auto& C : kernels) {
        const DispersionSymbol sym = build_symbol(C, 1.0, g);
        REQUIRE(sym.lambda_min >= 0.0);
        for (double t : {0.0, 0.25, 1.0, 3.0, 7.5}) {
            const auto [u, udot] = propagate(sym, xi, eta, t);
            (void)udot;
            CHECK(l2_norm(u) <= nxi + t * neta + 1e-10);
        }
    }
}

TEST_CASE("duhamel: trivial cases and input validation", "[spectral]") {
    const Micromodulus C = GaussianKernel{1.0, 1.0};
    const GridPtr g = make_grid(256, 30.0);
    const DispersionSymbol sym = build_symbol(C, 1.0, g);

    auto zero_forcing = [g](double) { return Field(g); };
    const Field v0 = duhamel(sym, zero_forcing, 2.0, 64);
    for (const auto& v : v0.values) CHECK(std::abs(v) == 0.0);

    const Field vt0 = duhamel(sym, zero_forcing, 0.0, 64);
    for (const auto& v : vt0.values) CHECK(std::abs(v) == 0.0);

    CHECK_THROWS_AS(duhamel(sym, zero_forcing, 1.0, 65), std::invalid_argument);

    const Micromodulus neg = SignedGaussianMixture{{{1.2, 0.5}, {-1.0, 1.0}}};
    const DispersionSymbol nsym = build_symbol(neg, 1.0, g);
    CHECK_THROWS_AS(duhamel(nsym, zero_forcing, 1.0, 64), std::domain_error);
}

TEST_CASE("duhamel: static forcing against the per-mode time integral", "[spectral]") {
    const GridPtr g = make_grid(256, 20.0);
    const DispersionSymbol sym = classical_symbol(MaterialParams(1.0, 1.0), g);
    const Field gfield = gaussian_field(g, 0.7);
    auto forcing = [&](double) { return gfield; };

    const double t = 0.8;
    const Field v = duhamel(sym, forcing, t);

    Field vref_hat = dft(gfield);
    for (std::size_t j = 0; j < g->size(); ++j) {
        const double lam = sym.lambda[j];
        const double factor =
            lam > 0.0 ? (1.0 - std::cos(t * std::sqrt(lam))) / lam : 0.5 * t * t;
        vref_hat.values[j] *= factor;
    }
    const Field vref = idft(vref_hat);
    CHECK(diff_norm(v, vref) < 1e-8);
}

TEST_CASE("duhamel: second-order residual decay and vanishing initial data",
          "[spectral][property]") {
    const Micromodulus C = GaussianKernel{1.0, 1.0};
    const GridPtr g = make_grid(256, 30.0);
    const DispersionSymbol sym = build_symbol(C, 1.0, g);

    const Field gfield = gaussian_field(g, 0.8);
    auto forcing = [&](double tau) {
        Field f = gfield;
        const double amp = 1.0 + 0.5 * tau; // f'(0) != 0 exercises v'(0)
        for (auto& v : f.values) v *= amp;
        return f;
    };
    const int n_quad = 2048; // quadrature error far below the difference error

    auto residual = [&](double t, double dt) {
        const Field vm = duhamel(sym, forcing, t - dt, n_quad);
        const Field vc = duhamel(sym, forcing, t, n_quad);
        const Field vp = duhamel(sym, forcing, t + dt, n_quad);
        const Field av = apply_operator(sym, vc);
        const Field f = forcing(t);
        Field r(g);
        for (std::size_t i = 0; i < g->size(); ++i) {
            const auto second =
                (vp.values[i] - 2.0 * vc.values[i] + vm.values[i]) / (dt * dt);
            r.values[i] = second + av.values[i] - f.values[i];
        }
        return l2_norm(r);
    };

    const double t0 = 1.0;
    const double r1 = residual(t0, 0.04);
    const double r2 = residual(t0, 0.02);
    const double r3 = residual(t0, 0.01);
    INFO("residuals " << r1 << " " << r2 << " " << r3);
    CHECK(r2 < r1);
    CHECK(r3 < r2);
    CHECK(r1 / r2 == Approx(4.0).margin(1.0));
    CHECK(r2 / r3 == Approx(4.0).margin(1.0));

    // v(0) = 0 exactly; v'(0) = 0 to second order in the symmetric difference
    const Field v0 = duhamel(sym, forcing, 0.0, n_quad);
    for (const auto& v : v0.values) CHECK(std::abs(v) == 0.0);
    const double h = 0.01;
    const Field vp = duhamel(sym, forcing, h, n_quad);
    const Field vm = duhamel(sym, forcing, -h, n_quad);
    Field d(g);
    for (std::size_t i = 0; i < g->size(); ++i)
        d.values[i] = (vp.values[i] - vm.values[i]) / (2.0 * h);
    CHECK(l2_norm(d) <= 2e-5 * l2_norm(gfield));
}

TEST_CASE("duhamel default panel count resolves the fastest mode", "[spectral]") {
    CHECK(duhamel_default_panels(0.0, 100.0) == 64);
    CHECK(duhamel_default_panels(1.0, 1.0) == 64);
    const int n = duhamel_default_panels(1.0, 25866.0);
    CHECK(n >= static_cast<int>(std::ceil(8.0 * std::sqrt(25866.0))));
    CHECK(n % 2 == 0);
}
