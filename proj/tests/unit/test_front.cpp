#include <doctest.h>

#include "nlfront/error.hpp"
#include "nlfront/front.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace nlfront;

namespace {

TailProfile profile(TailFamily f, auto&& setup) {
    TailParams p;
    setup(p);
    return build_profile(f, p);
}

// bisection oracle for w e^w = nu on w < -1
double bisect_w(double nu) {
    double lo = -800.0, hi = -1.0;
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::exp(mid) > nu ? lo : hi) = mid;  // w e^w decreases on (-inf, -1)
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("level crossings") {
    const Grid g = make_grid(1, 16, 256);
    const Field step = sample_field(g, [](double x, double) { return std::abs(x) <= 5 ? 1.0 : 0.0; });
    const auto r = level_crossing(step, 0.5, FrontMode::radial);
    REQUIRE(r.has_value());
    CHECK(std::abs(*r - 5.0) <= g.h);
    CHECK_FALSE(level_crossing(zero_field(g), 0.5, FrontMode::radial).has_value());
    const Field ramp = sample_field(g, [](double x, double) { return x < 0 ? 1.0 : x > 10 ? 0.0 : 1.0 - x / 10; });
    const auto m = level_crossing(ramp, 0.25, FrontMode::monotone);
    REQUIRE(m.has_value());
    CHECK(std::abs(*m - 7.5) <= g.h);

    const Grid g2 = make_grid(2, 16, 128);
    const Field disc = sample_field(g2, [](double x, double y) { return std::hypot(x, y) <= 6 ? 1.0 : 0.0; });
    const auto rd = level_crossing(disc, 0.5, FrontMode::radial);
    REQUIRE(rd.has_value());
    CHECK(std::abs(*rd - 6.0) <= 2 * g2.h);
    const Field quad = sample_field(g2, [](double x, double y) { return x < 3 && y < 3 ? 1.0 : 0.0; });
    const auto xd = level_crossing(quad, 0.5, FrontMode::diagonal);
    REQUIRE(xd.has_value());
    CHECK(std::abs(*xd - 3.0) <= g2.h);
}

TEST_CASE("level-set radii") {
    const auto ex = profile(TailFamily::exponential_control, [](TailParams& p) { p.rate = 1; });
    CHECK(lambda_radius({LevelShape::radial, ex, 1.0}, 7.0) == doctest::Approx(7.0).epsilon(1e-10));
    for (double M : {1.0, 0.5}) {
        const auto poly = profile(TailFamily::polynomial, [&](TailParams& p) { p.M = M; p.mu = 1.5; p.d = 1; });
        const double beta = 0.8, t = 6.0;
        CHECK(lambda_radius({LevelShape::radial, poly, beta}, t) ==
              doctest::Approx(std::pow(M * std::exp(beta * t), 1.0 / 2.5) - 1.0).epsilon(1e-10));
    }
    const auto se = profile(TailFamily::stretched_exp, [](TailParams& p) { p.gamma = 0.5; });
    CHECK(lambda_radius({LevelShape::radial, se, 1.0}, 5.0) == doctest::Approx(25.0).epsilon(1e-10));
    // orthant, d = 1: int_x^inf e^{-s} ds = e^{-x}
    CHECK(lambda_radius({LevelShape::orthant, ex, 1.0}, 4.0) == doctest::Approx(4.0).epsilon(1e-8));
    double prev = 0.0;
    for (double t = 1; t < 40; t += 3) {
        const double r = lambda_radius({LevelShape::radial, se, 1.0}, t);
        CHECK(r >= prev);
        prev = r;
    }
    CHECK_THROWS_AS(lambda_radius({LevelShape::radial, ex, 1.0}, -1.0), Error);
}

TEST_CASE("Lambert W lower branch") {
    const double inv_e = std::exp(-1.0);
    try {
        lambert_w_minus1(-inv_e - 1e-16);
        FAIL("expected out-of-branch-domain");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::out_of_branch_domain);
    }
    CHECK(lambert_w_minus1(-inv_e) == -1.0);
    const double w = lambert_w_minus1(-0.1);
    CHECK(w < -1.0);
    CHECK(w == doctest::Approx(bisect_w(-0.1)).epsilon(1e-12));
    CHECK(std::abs(w * std::exp(w) + 0.1) <= 1e-15);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double lo = std::log(inv_e * (1 - 1e-12)), hi = std::log(1e-8);
        const double nu = -std::exp(lo + (hi - lo) * i / 999.0);
        const double v = lambert_w_minus1(nu);
        CHECK(v < -1.0);
        worst = std::max(worst, std::abs(v * std::exp(v) - nu));
    }
    CHECK(worst <= 1e-13);
}

TEST_CASE("predicted front laws") {
    const auto poly = profile(TailFamily::polynomial, [](TailParams& p) { p.mu = 1; p.d = 1; });
    CHECK(predicted_eta(poly, 1.0, 1, 10.0) == doctest::Approx(std::exp(5.0) - 1.0).epsilon(1e-12));
    const auto se = profile(TailFamily::stretched_exp, [](TailParams& p) { p.gamma = 0.5; });
    CHECK(predicted_eta(se, 1.0, 1, 9.0) == doctest::Approx(81.0).epsilon(1e-12));

    for (double lambda : {1.5, 2.0, 3.0}) {
        CAPTURE(lambda);
        const auto al = profile(TailFamily::almost_linear, [&](TailParams& p) { p.lambda = lambda; });
        // eta solves eta / (log eta)^lambda = beta t on the branch above e^lambda
        for (double t : {1e2, 1e4, 1e6}) {
            const double eta = predicted_eta(al, 1.0, 1, t);
            CHECK(eta / std::pow(std::log(eta), lambda) == doctest::Approx(t).epsilon(1e-10));
            CHECK(eta > std::exp(lambda));
        }
        // the ratio to t (log t)^lambda decreases toward 1
        double prev = INFINITY;
        for (double t : {1e4, 1e5, 1e6, 1e7}) {
            const double r = predicted_eta(al, 1.0, 1, t) / (t * std::pow(std::log(t), lambda));
            CHECK(r > 1.0);
            CHECK(r < prev);
            prev = r;
        }
    }
    try {
        predicted_eta(profile(TailFamily::almost_linear, [](TailParams& p) { p.lambda = 2; }), 1.0, 1, 1.0);
        FAIL("expected below-threshold");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::below_threshold);
    }
}

TEST_CASE("diagonal bounds for the Weibull-type kernel") {
    const auto b = profile(TailFamily::stretched_exp, [](TailParams& p) {
        p.M = 1 / std::numbers::pi;
        p.gamma = 0.5;
        p.nu = -1.5;
        p.d = 2;
    });
    for (double x : {4.0, 50.0, 400.0})
        CHECK(diagonal_level_function(b, x) == doctest::Approx(std::exp(-std::pow(2.0, 0.25) * std::sqrt(x))).epsilon(1e-8));
    for (double t : {10.0, 100.0})
        CHECK(diagonal_mu(b, 1.0, t) == doctest::Approx(t * t / std::sqrt(2.0)).epsilon(1e-8));
    const auto [lo, hi] = diagonal_front_bounds(b, 1.0, 100.0, 0.1);
    CHECK(lo == doctest::Approx(0.81e4 / (2 * std::sqrt(2.0))).epsilon(1e-8));
    CHECK(lo < hi);
    for (double t = 2; t < 60; t += 7) {
        const auto [l, u] = diagonal_front_bounds(b, 1.3, t, 0.25);
        CHECK(l < u);
    }
}

TEST_CASE("growth-law classification on synthetic traces") {
    auto trace = [](auto f, double t0, double t1, int n) {
        std::vector<double> ts, xs;
        for (int i = 0; i < n; ++i) {
            const double t = t0 + (t1 - t0) * i / (n - 1.0);
            ts.push_back(t);
            xs.push_back(f(t));
        }
        return std::pair{ts, xs};
    };
    auto [t1, x1] = trace([](double t) { return std::exp(0.5 * t); }, 1, 30, 60);
    auto fit = classify_growth(t1, x1);
    CHECK(fit.law == GrowthLaw::exponential);
    CHECK(fit.best().parameter == doctest::Approx(0.5).epsilon(1e-6));

    auto [t2, x2] = trace([](double t) { return t * t; }, 1, 30, 60);
    fit = classify_growth(t2, x2);
    CHECK(fit.law == GrowthLaw::power);
    CHECK(fit.best().parameter == doctest::Approx(2.0).epsilon(1e-6));

    auto [t3, x3] = trace([](double t) { return t * std::pow(std::log(t), 2.0); }, 100, 1e4, 60);
    fit = classify_growth(t3, x3);
    CHECK(fit.law == GrowthLaw::t_log_power);
    CHECK(std::abs(fit.best().parameter - 2.0) <= 0.2);

    auto [t4, x4] = trace([](double t) { return 10 + 3 * t; }, 1, 30, 60);
    fit = classify_growth(t4, x4);
    CHECK(fit.law == GrowthLaw::linear);
    CHECK(fit.best().parameter == doctest::Approx(3.0).epsilon(1e-9));
    for (const auto& c : fit.candidates) CHECK(std::isfinite(c.residual));

    std::vector<double> few(10, 1.0);
    try {
        classify_growth(few, few);
        FAIL("expected insufficient-data");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::insufficient_data);
    }
}
