#include <doctest.h>

#include "nlfront/error.hpp"
#include "nlfront/kernel.hpp"
#include "nlfront/tail_profile.hpp"

#include <cmath>
#include <functional>
#include <numbers>

using namespace nlfront;

namespace {

TailProfile make(TailFamily f, auto&& setup) {
    TailParams p;
    setup(p);
    return build_profile(f, p);
}

// Composite Simpson of f(u/(1-u)) / (1-u)^2 on [0, 1): integral of f over [0, inf).
double half_line_integral(const std::function<double(double)>& f, int panels) {
    auto g = [&](double u) {
        if (u >= 1.0) return 0.0;
        const double s = u / (1.0 - u);
        return f(s) / ((1.0 - u) * (1.0 - u));
    };
    const double h = 1.0 / panels;
    double acc = g(0.0) + g(1.0);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(i * h);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("polynomial profile is 1/(1+s)^2 with rho = 0") {
    const auto b = make(TailFamily::polynomial, [](TailParams& p) { p.M = 1; p.mu = 1; p.d = 1; });
    CHECK(b.rho() == doctest::Approx(0.0));
    CHECK(b(1.0) == doctest::Approx(0.25).epsilon(1e-15));
    for (double s : {0.0, 0.5, 3.0, 1e3}) CHECK(b(s) == doctest::Approx(1.0 / ((1 + s) * (1 + s))).epsilon(1e-14));
}

TEST_CASE("almost-linear rho sits at the minimum of s/(log s)^lambda") {
    const double lambda = 2.0;
    const auto b = make(TailFamily::almost_linear, [&](TailParams& p) { p.lambda = lambda; });
    // ternary search oracle on (1, 100)
    auto phi = [&](double s) { return s / std::pow(std::log(s), lambda); };
    double lo = 1.5, hi = 100.0;
    for (int i = 0; i < 300; ++i) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        (phi(m1) < phi(m2) ? hi : lo) = phi(m1) < phi(m2) ? m2 : m1;
    }
    CHECK(b.rho() == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));
    CHECK(b.inner_value() == doctest::Approx(b(b.rho())));
    const long double e4 = std::exp(4.0L);
    CHECK(b(double(e4)) == doctest::Approx(double(std::exp(-e4 / 16.0L))).epsilon(1e-12));
}

TEST_CASE("stretched exponential and control values") {
    const auto se = make(TailFamily::stretched_exp, [](TailParams& p) { p.c = 1; p.gamma = 0.5; p.nu = 0; });
    CHECK(se(4.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    const auto ec = make(TailFamily::exponential_control, [](TailParams& p) { p.rate = 1; });
    CHECK(eval_tail(ec, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("profiles are positive, bounded by 1 at rho and decreasing beyond it") {
    std::vector<TailProfile> all{
        make(TailFamily::polynomial, [](TailParams& p) { p.mu = 0.5; }),
        make(TailFamily::log_stretched, [](TailParams& p) { p.c = 1; p.delta = 1; p.nu = -1; }),
        make(TailFamily::stretched_exp, [](TailParams& p) { p.gamma = 0.3; p.nu = -1.5; p.M = 1 / std::numbers::pi; }),
        make(TailFamily::almost_linear, [](TailParams& p) { p.lambda = 3; }),
        make(TailFamily::exponential_control, [](TailParams& p) { p.rate = 2; }),
        make(TailFamily::gaussian_control, [](TailParams& p) { p.rate = 1; }),
    };
    for (const auto& b : all) {
        CAPTURE(to_string(b.family()));
        CHECK(b(b.rho()) <= 1.0 + 1e-15);
        double prev = b.log_value(b.rho());
        for (double s = b.rho() + 0.25; s < b.rho() + 200; s *= 1.3) {
            CHECK(b.log_value(s) < prev + 1e-15);
            prev = b.log_value(s);
        }
        for (double s = 0; s < b.rho(); s += b.rho() / 7) CHECK(b(s) == doctest::Approx(b.inner_value()));
        CHECK(std::isfinite(b.log_value(1e8)));
    }
}

TEST_CASE("invalid parameters are rejected") {
    auto code_of = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::config_invalid;
    };
    CHECK(code_of([] { make(TailFamily::stretched_exp, [](TailParams& p) { p.gamma = 1.2; }); }) ==
          ErrorCode::parameter_out_of_range);
    CHECK(code_of([] { make(TailFamily::almost_linear, [](TailParams& p) { p.lambda = 1.0; }); }) ==
          ErrorCode::parameter_out_of_range);
    CHECK(code_of([] { make(TailFamily::polynomial, [](TailParams& p) { p.M = 0; }); }) ==
          ErrorCode::parameter_out_of_range);
}

TEST_CASE("normalizers against closed forms") {
    const auto poly = make(TailFamily::polynomial, [](TailParams& p) { p.mu = 1; });
    CHECK(normalize_kernel(poly, 1).normalizer() == doctest::Approx(2.0).epsilon(1e-10));
    const auto ex = make(TailFamily::exponential_control, [](TailParams& p) { p.rate = 1; });
    CHECK(normalize_kernel(ex, 1).normalizer() == doctest::Approx(2.0).epsilon(1e-10));
    // 2D: 2 pi int e^{-s} s ds = 2 pi
    CHECK(normalize_kernel(ex, 2).normalizer() == doctest::Approx(2 * std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("harmonic tail diverges") {
    // 1/(1+s) in d = 1 is the polynomial family with mu = 0
    const auto b = make(TailFamily::polynomial, [](TailParams& p) { p.mu = 0; });
    CHECK(b(1.0) == doctest::Approx(0.5));
    try {
        normalize_kernel(b, 1);
        FAIL("expected divergent-tail-integral");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::divergent_tail_integral);
    }
}

TEST_CASE("every kernel integrates to one under an independent quadrature") {
    std::vector<std::pair<TailProfile, int>> cases{
        {make(TailFamily::polynomial, [](TailParams& p) { p.mu = 1; p.d = 1; }), 1},
        {make(TailFamily::polynomial, [](TailParams& p) { p.mu = 1.5; p.d = 2; }), 2},
        {make(TailFamily::stretched_exp, [](TailParams& p) { p.gamma = 0.5; }), 1},
        {make(TailFamily::stretched_exp, [](TailParams& p) { p.gamma = 0.5; p.nu = -1.5; p.M = 1 / std::numbers::pi; }), 2},
        {make(TailFamily::log_stretched, [](TailParams& p) { p.delta = 1; }), 1},
        {make(TailFamily::almost_linear, [](TailParams& p) { p.lambda = 2; }), 1},
        {make(TailFamily::gaussian_control, [](TailParams& p) { p.rate = 1; }), 2},
    };
    for (const auto& [b, d] : cases) {
        CAPTURE(to_string(b.family()));
        CAPTURE(d);
        const Kernel k = normalize_kernel(b, d);
        const double surface = d == 1 ? 2.0 : 2.0 * std::numbers::pi;
        // split at rho so the inner plateau's kink does not spoil Simpson
        const double r = b.rho();
        auto integrand = [&](double s) { return k.radial(s + r) * std::pow(s + r, d - 1); };
        double inner = 0.0;
        if (r > 0) inner = d == 1 ? k.radial(0) * r : k.radial(0) * r * r / 2;
        const double total = surface * (inner + half_line_integral(integrand, 1 << 20));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(k(0.0) > 0.0);
    }
}

TEST_CASE("tail classification surrogates") {
    const auto poly = make(TailFamily::polynomial, [](TailParams& p) { p.mu = 1; });
    auto rep = classify_tail(poly, 1e6, 1e-2);
    CHECK(rep.long_tailed);
    CHECK(rep.log_convex);
    CHECK(rep.integrable);
    CHECK_FALSE(rep.note.empty());

    const auto ex = make(TailFamily::exponential_control, [](TailParams& p) { p.rate = 1; });
    rep = classify_tail(ex, 1e6, 1e-2);
    CHECK_FALSE(rep.long_tailed);
    CHECK(rep.min_shift_ratio == doctest::Approx(std::exp(-4.0)).epsilon(1e-6));

    const auto ga = make(TailFamily::gaussian_control, [](TailParams& p) { p.rate = 1; });
    CHECK_FALSE(classify_tail(ga, 1e3, 1e-2).log_convex);

    for (const auto& b : {make(TailFamily::stretched_exp, [](TailParams& p) { p.gamma = 0.5; }),
                          make(TailFamily::log_stretched, [](TailParams& p) { p.delta = 1; }),
                          make(TailFamily::almost_linear, [](TailParams& p) { p.lambda = 3; })}) {
        CAPTURE(to_string(b.family()));
        const auto r = classify_tail(b, 1e6, 1e-2);
        CHECK(r.long_tailed);
        CHECK(r.log_convex);
    }
    // lambda = 2 decays by exp(-4 / log(S)^2) over a shift of 4: not yet within 1% at 1e6
    const auto al2 = make(TailFamily::almost_linear, [](TailParams& p) { p.lambda = 2; });
    CHECK_FALSE(classify_tail(al2, 1e6, 1e-2).long_tailed);
    CHECK(classify_tail(al2, 1e10, 1e-2).long_tailed);
    CHECK(classify_tail(al2, 1e10, 1e-2).log_convex);
}

TEST_CASE("log equivalence") {
    const auto poly = make(TailFamily::polynomial, [](TailParams& p) { p.mu = 1; });
    const auto se = make(TailFamily::stretched_exp, [](TailParams& p) { p.gamma = 0.5; });
    const auto ls = make(TailFamily::log_stretched, [](TailParams& p) { p.delta = 1; });
    const auto al = make(TailFamily::almost_linear, [](TailParams& p) { p.lambda = 2; });
    CHECK(log_equivalent(poly, poly.scaled(2.0), 1e6, 1e-1));
    CHECK_FALSE(log_equivalent(se, poly, 1e6, 1e-1));
    for (const auto& b : {poly, se, ls, al}) {
        CAPTURE(to_string(b.family()));
        CHECK(log_equivalent(b, b, 1e6, 1e-1));
        // log C / log b(S) must drop under tol: polynomial tails need a far horizon
        for (double C : {1e-3, 1e3}) {
            CHECK(log_equivalent(b, b.scaled(C), 1e30, 1e-1));
            CHECK(log_equivalent(b.scaled(C), b, 1e30, 1e-1));
        }
        for (const auto& c : {poly, se, ls, al})
            CHECK(log_equivalent(b, c, 1e6, 1e-1) == log_equivalent(c, b, 1e6, 1e-1));
    }
}
