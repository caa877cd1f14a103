#include <doctest.h>

#include "nlfront/error.hpp"
#include "nlfront/theory.hpp"

#include <cmath>
#include <sstream>

using namespace nlfront;

namespace {

TailProfile profile(TailFamily f, auto&& setup) {
    TailParams p;
    setup(p);
    return build_profile(f, p);
}

const ModelParams kModel{2.0, 1.0};

}  // namespace

TEST_CASE("lambda0 scans G on constants") {
    const ReactionSpec s = make_reaction(1.0, 1, LocalReaction::fisher, 1.0, 1.0);
    // fisher: G(r) = beta r / theta, so the largest r with G < delta is delta theta / beta
    CHECK(lambda0(s, 0.1) == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("sub-solution residuals") {
    const auto poly = profile(TailFamily::polynomial, [](TailParams& p) { p.mu = 1; });
    const Kernel k = normalize_kernel(poly, 1);
    const Grid g = make_grid(1, 512, 1 << 12);

    SubsolutionSpec zero{LevelSetSpec{LevelShape::radial, poly, 1.0}, 0.3, 0.0, 1.0, 0.0};
    CHECK(subsolution_residual(zero, k, kModel, g, {5.0, 6.0}) == 0.0);

    CertifyOptions opt;
    opt.n = 1 << 15;
    for (double eps : {0.1, 0.3}) {
        SubsolutionSpec spec{LevelSetSpec{LevelShape::radial, poly, 1.0}, eps, 1e-3, 1.0, 0.0};
        const auto r = certify_subsolution(spec, k, kModel, opt);
        CHECK(r.certified);
        CHECK(r.max_residual <= 1e-8 * spec.lam);
        CHECK(r.tau0 > 0.0);
    }

    const auto ex = profile(TailFamily::exponential_control, [](TailParams& p) { p.rate = 1; });
    const Kernel ke = normalize_kernel(ex, 1);
    SubsolutionSpec control{LevelSetSpec{LevelShape::radial, ex, 1.0}, 0.3, 1e-3, 1.0, 0.0};
    const Grid ge = make_grid(1, 256, 1 << 13);
    CHECK(subsolution_residual(control, ke, kModel, ge, {40.0, 60.0}) > 0.0);
}

TEST_CASE("sub-solution spec validation") {
    const auto poly = profile(TailFamily::polynomial, [](TailParams&) {});
    SubsolutionSpec bad{LevelSetSpec{LevelShape::radial, poly, 1.0}, 1.2, 1e-3, 1.0, 0.0};
    CHECK_THROWS_AS(validate(bad), Error);
    SubsolutionSpec ok{LevelSetSpec{LevelShape::radial, poly, 1.0}, 0.3, 1e-3, 1.0, 0.0};
    CHECK(effective_delta(ok) == doctest::Approx(0.15));
}

TEST_CASE("super-solution ratio") {
    const auto poly = profile(TailFamily::polynomial, [](TailParams& p) { p.mu = 1; });
    const Kernel k = normalize_kernel(poly, 1);
    double prev = INFINITY;
    for (double lam : {1e-2, 1e-3, 1e-4}) {
        const double r = supersolution_ratio(k, poly, lam);
        CHECK(r <= prev + 1e-12);
        CHECK(r >= 1.0 - 1e-3);
        prev = r;
    }
    CHECK(prev <= 1.05);

    const auto gauss = profile(TailFamily::gaussian_control, [](TailParams& p) { p.rate = 1; });
    const double r2 = supersolution_ratio(k, gauss, 1e-2), r4 = supersolution_ratio(k, gauss, 1e-4);
    CHECK(r4 > r2);
    CHECK(r4 > 2.0);
}

TEST_CASE("level inclusion") {
    CHECK(inclusion_h(0.2) == doctest::Approx(1.1 / 1.2).epsilon(1e-15));
    CHECK(inclusion_f(1.0) == 1.0);
    CHECK(inclusion_g(0.5) == doctest::Approx(0.5));
    const auto poly = profile(TailFamily::polynomial, [](TailParams& p) { p.mu = 1; });
    const auto r = check_level_inclusion(poly, 0.2, 0.76, 50.0);
    CHECK(r.holds);
    CHECK(r.root_residual <= 1e-12);
    CHECK(std::abs(inclusion_f(r.alpha) - inclusion_h(0.2)) <= 1e-12);
    REQUIRE(r.times.size() == 3);
    CHECK(r.times[2] == 200.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.radius_weighted[i] <= r.radius_plain[i]);
    try {
        check_level_inclusion(poly, r.eps0 * 1.01, 0.76, 50.0);
        FAIL("expected no-root");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::no_root);
    }
}

TEST_CASE("liminf ratio") {
    const auto poly = profile(TailFamily::polynomial, [](TailParams& p) { p.mu = 1; });
    const Grid g = make_grid(1, 512, 8192);
    Field delta = zero_field(g);
    delta[std::size_t(g.n / 2)] = 1.0 / g.h;
    const auto d = liminf_ratio(poly, delta, {50.0, 100.0, 200.0});
    CHECK(d.mass == doctest::Approx(1.0));
    for (double v : d.ratios) CHECK(v == doctest::Approx(1.0).epsilon(1e-2));

    const Field bump = sample_field(g, [](double x, double) { return std::abs(x) < 1 ? 0.35 : 0.0; });
    const auto p = liminf_ratio(poly, bump, {50.0, 100.0, 200.0});
    CHECK(p.mass == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(p.min_ratio >= 0.7 * 0.95);

    const auto ex = profile(TailFamily::exponential_control, [](TailParams& q) { q.rate = 1; });
    const auto e = liminf_ratio(ex, bump, {50.0, 100.0, 200.0});
    CHECK(e.ratios.back() > 0.7 * 1.05);  // e^{|y|} weights push the control away from the mass
}

TEST_CASE("certification CSV") {
    std::ostringstream os;
    write_certification_csv({{"tube", "runs=2", 0.0, 1e-8, true}}, os);
    CHECK(os.str() == "check,parameters,value,threshold,pass\ntube,runs=2,0,1e-08,true\n");
}
