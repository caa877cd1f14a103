#include <doctest.h>

#include "nlfront/error.hpp"
#include "nlfront/grid.hpp"
#include "nlfront/kernel.hpp"

#include <cmath>
#include <random>

using namespace nlfront;

TEST_CASE("grid construction") {
    const Grid g = make_grid(1, 100, 1024);
    CHECK(g.h == 0.1953125);
    CHECK(make_grid(2, 50, 256).size() == 256u * 256u);
    try {
        make_grid(1, 10, 100);
        FAIL("expected invalid-size");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_size);
    }
    CHECK_THROWS_AS(make_grid(1, 10, 8), Error);
    CHECK_THROWS_AS(make_grid(1, -1, 64), Error);
}

TEST_CASE("sampled initial data") {
    const Grid g = make_grid(1, 16, 256);
    const double rho = 2.0;
    const Field bump = sample_field(g, [&](double x, double) { return std::abs(x) <= rho ? rho : 0.0; });
    for (int i = 0; i < g.n; ++i) CHECK(bump[i] == (std::abs(g.coord(i)) <= rho ? rho : 0.0));
    const Field plateau = sample_field(g, [](double x, double) { return x < 0 ? 0.7 : 0.0; });
    CHECK(plateau[0] == 0.7);
    CHECK(plateau[std::size_t(g.n - 1)] == 0.0);
    const Field zero = sample_field(make_grid(2, 4, 16), [](double, double) { return 0.0; });
    for (double v : zero.values) CHECK(v == 0.0);
}

TEST_CASE("orthant integral by cumulative sums") {
    // density e^{-x} on x > 0: integral over [x, L] is e^{-x} - e^{-L}
    const Grid g = make_grid(1, 8, 1024);
    const Field f = sample_orthant_integral(g, [](double x, double) { return x > 0 ? std::exp(-x) : 0.0; });
    for (int i = g.n / 2 + 10; i < g.n; i += 50) {
        const double x = g.coord(i);
        CHECK(f[std::size_t(i)] == doctest::Approx(std::exp(-x) - std::exp(-8.0)).epsilon(1e-4));
    }
}

TEST_CASE("delta stencil is the identity") {
    for (int d : {1, 2}) {
        const Grid g = make_grid(d, 3, 32);
        std::mt19937_64 rng(5);
        Field u = zero_field(g);
        for (double& v : u.values) v = std::uniform_real_distribution<double>(-1, 1)(rng);
        const Field r = convolve(delta_stencil(g), u);
        for (std::size_t k = 0; k < u.values.size(); ++k) CHECK(r[k] == doctest::Approx(u[k]).epsilon(1e-12));
    }
}

TEST_CASE("symmetric kernel on a centred box gives a symmetric output peaked at the centre") {
    TailParams p;
    const Kernel k = normalize_kernel(build_profile(TailFamily::polynomial, p), 1);
    const Grid g = make_grid(1, 20, 128);
    const Field box = sample_field(g, [](double x, double) { return std::abs(x) < 3 ? 1.0 : 0.0; });
    const Field r = convolve(make_stencil(k, g), box);
    const int n = g.n;
    for (int i = 0; i < n / 2; ++i) CHECK(r[std::size_t(i)] == doctest::Approx(r[std::size_t(n - 1 - i)]).epsilon(1e-12));
    const auto peak = std::max_element(r.values.begin(), r.values.end()) - r.values.begin();
    CHECK((peak == n / 2 || peak == n / 2 - 1));
}

TEST_CASE("transform convolution matches the direct sum") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(0, 1);
    for (int d : {1, 2}) {
        for (int trial = 0; trial < 50; ++trial) {
            const int n = d == 1 ? 16 << (trial % 4) : 16 << (trial % 3);
            const Grid g = make_grid(d, 1 + 40 * U(rng), n);
            KernelStencil st = sample_stencil(g, [&](double, double) { return U(rng); });
            Field u = zero_field(g);
            for (double& v : u.values) v = 2 * U(rng) - 1;
            const Field a = convolve(st, u), b = convolve_direct(st, u);
            double num = 0, den = 0;
            for (std::size_t q = 0; q < a.values.size(); ++q) {
                num = std::max(num, std::abs(a[q] - b[q]));
                den = std::max(den, std::abs(b[q]));
            }
            CHECK(num / den <= 1e-10);
        }
    }
}

TEST_CASE("direct convolution refuses large grids; mismatched grids are rejected") {
    const Grid big = make_grid(2, 1, 256);
    CHECK_THROWS_AS(convolve_direct(delta_stencil(big), zero_field(big)), Error);
    const Grid g1 = make_grid(1, 1, 32), g2 = make_grid(1, 2, 32);
    try {
        convolve(delta_stencil(g1), zero_field(g2));
        FAIL("expected grid-mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::grid_mismatch);
    }
}

TEST_CASE("nonnegative inputs give nonnegative output and mass multiplies") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0, 1);
    for (int d : {1, 2}) {
        const Grid g = make_grid(d, 10, 64);
        // kernel supported within 8 cells, data within 16 cells of the centre
        const KernelStencil st = sample_stencil(g, [&](double x, double y) {
            return std::max(std::abs(x), std::abs(y)) < 8 * g.h ? U(rng) : 0.0;
        });
        const Field u = sample_field(g, [&](double x, double y) {
            return std::max(std::abs(x), std::abs(y)) < 16 * g.h ? U(rng) : 0.0;
        });
        const Field r = convolve(st, u);
        const double vol = g.cell_volume();
        double sr = 0, su = 0;
        for (double v : r.values) {
            CHECK(v >= -1e-12);
            sr += v * vol;
        }
        for (double v : u.values) su += v * vol;
        CHECK(sr == doctest::Approx(st.mass() * su).epsilon(1e-8));
    }
}

TEST_CASE("renormalized stencil has unit discrete mass") {
    TailParams p;
    p.d = 2;
    const Kernel k = normalize_kernel(build_profile(TailFamily::polynomial, p), 2);
    const Grid g = make_grid(2, 8, 32);
    CHECK(make_stencil(k, g, true).mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(make_stencil(k, g, false).mass() < 1.0);
}
