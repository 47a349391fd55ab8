#include <catch2/catch.hpp>

#include <nlwave/grid.hpp>

#include <cmath>
#include <complex>

#include "oracles.hpp"

using namespace nlwave;

TEST_CASE("grid invariants", "[grid]") {
    CHECK_THROWS_AS(Grid1D(7, 10.0), std::invalid_argument);  // not a power of two
    CHECK_THROWS_AS(Grid1D(4, 10.0), std::invalid_argument);  // below minimum
    CHECK_THROWS_AS(Grid1D(16, -1.0), std::invalid_argument);

    const Grid1D g(16, 8.0);
    CHECK(g.spacing() * static_cast<double>(g.size()) == 8.0);
    CHECK(g.point(0) == -4.0);
    CHECK(g.frequency(0) == 0.0);
    CHECK(g.frequency(1) == Approx(2.0 * Grid1D::pi() / 8.0));
    CHECK(g.frequency(15) == Approx(-2.0 * Grid1D::pi() / 8.0));
    CHECK(g.frequency(8) == Approx(-8.0 * 2.0 * Grid1D::pi() / 8.0));
}

TEST_CASE("dft/idft inverse pair on random data", "[grid][property]") {
    const GridPtr g = make_grid(256, 40.0);
    Field f(g);
    const auto re = oracles::random_reals(g->size(), 2024u);
    const auto im = oracles::random_reals(g->size(), 4048u);
    for (std::size_t i = 0; i < g->size(); ++i) f.values[i] = {re[i], im[i]};

    const Field back = idft(dft(f));
    double max_err = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i)
        max_err = std::max(max_err, std::abs(back.values[i] - f.values[i]));
    CHECK(max_err < 1e-13);
}

TEST_CASE("parseval under the chosen normalization", "[grid][property]") {
    const GridPtr g = make_grid(512, 30.0);
    Field f(g);
    const auto re = oracles::random_reals(g->size(), 99u);
    for (std::size_t i = 0; i < g->size(); ++i) f.values[i] = re[i];

    const Field fhat = dft(f);
    double phys = 0.0, freq = 0.0;
    for (const auto& v : f.values) phys += std::norm(v);
    for (const auto& v : fhat.values) freq += std::norm(v);
    phys *= g->spacing();
    freq *= g->frequency_step();
    CHECK(phys == Approx(freq).epsilon(1e-12));
    CHECK(l2_norm(f) == Approx(std::sqrt(phys)).epsilon(1e-13));
}

TEST_CASE("dft matches the continuum transform of a gaussian", "[grid]") {
    // F2 of exp(-x^2/(2 s^2))/(sqrt(2 pi) s) is exp(-s^2 k^2/2)/sqrt(2 pi)
    const GridPtr g = make_grid(1024, 60.0);
    const double s = 0.8;
    const Field f = sample_real(g, [s](double x) {
        return std::exp(-x * x / (2.0 * s * s)) / (std::sqrt(2.0 * oracles::pi) * s);
    });
    const Field fhat = dft(f);
    for (std::size_t j = 0; j < g->size(); j += 37) {
        const double k = g->frequency(j);
        const double expected = std::exp(-0.5 * s * s * k * k) / std::sqrt(2.0 * oracles::pi);
        INFO("k=" << k);
        CHECK(std::abs(fhat.values[j] - expected) < 1e-13);
        CHECK(std::abs(std::imag(fhat.values[j])) < 1e-13); // even real data
    }
}

TEST_CASE("delta-like field has flat modulus spectrum", "[grid]") {
    const GridPtr g = make_grid(64, 16.0);
    Field f(g);
    f.values[g->size() / 2] = 1.0 / g->spacing(); // unit-mass spike at x = 0
    const Field fhat = dft(f);
    const double expected = 1.0 / std::sqrt(2.0 * oracles::pi);
    for (const auto& v : fhat.values) CHECK(std::abs(v) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("inner product conjugate-linearity and grid mismatch", "[grid]") {
    const GridPtr g = make_grid(64, 16.0);
    Field f(g), h(g);
    const auto rv = oracles::random_reals(2 * g->size(), 7u);
    for (std::size_t i = 0; i < g->size(); ++i) {
        f.values[i] = {rv[i], rv[i + g->size()]};
        h.values[i] = {rv[i + g->size()], rv[i]};
    }
    CHECK(std::abs(inner(f, h) - std::conj(inner(h, f))) < 1e-14);

    const GridPtr g2 = make_grid(64, 17.0);
    CHECK_THROWS_AS(inner(f, Field(g2)), std::invalid_argument);
}
