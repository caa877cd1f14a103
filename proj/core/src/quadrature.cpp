#include "nlfront/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlfront {

namespace {

struct GkResult {
    double value;
    double error;
    double l1;
};

// 31-point Kronrod rule with its embedded 15-point Gauss rule on [a, b]; the
// Gauss nodes are the even-indexed Kronrod abscissae.
GkResult gk31(const ScalarFn& f, double a, double b) {
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
    using Gauss = boost::math::quadrature::gauss<double, 15>;
    const auto& x = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    const double f0 = f(c);
    double K = f0 * wk[0], G = f0 * wg[0], L1 = std::abs(f0) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fp = f(c + r * x[i]), fm = f(c - r * x[i]);
        K += (fp + fm) * wk[i];
        L1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 0) G += (fp + fm) * wg[i / 2];
    }
    return {K * r, std::abs(K - G) * r, L1 * r};
}

// Bisects until the Kronrod-Gauss difference is within tolerance or at roundoff level.
double adaptive_gk(const ScalarFn& f, double a, double b, double rel_tol, int depth) {
    const GkResult q = gk31(f, a, b);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * q.l1;
    if (depth == 0 || q.error <= std::max(rel_tol * std::abs(q.value), floor)) return q.value;
    const double mid = 0.5 * (a + b);
    return adaptive_gk(f, a, mid, rel_tol, depth - 1) + adaptive_gk(f, mid, b, rel_tol, depth - 1);
}

}  // namespace

double integrate(const ScalarFn& f, double a, double b, double rel_tol) {
    if (!(b > a)) return 0.0;
    return adaptive_gk(f, a, b, rel_tol, 20);
}

double bisect_root(const ScalarFn& f, double lo, double hi, double rel_tol) {
    auto tol = [rel_tol](double x, double y) {
        return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
    };
    std::uintmax_t iters = 400;
    auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol, iters);
    return 0.5 * (a + b);
}

}  // namespace nlfront
