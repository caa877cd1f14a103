#include "nlfront/front.hpp"

#include "nlfront/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nlfront {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

// Crossing between node value a (>= level) at position xa and b (< level) at xa + dx.
double interpolate(double xa, double a, double b, double dx, double level) {
    if (a == b) return xa;
    return xa + dx * (a - level) / (a - b);
}

double bilinear(const Field& f, double x, double y) {
    const Grid& g = f.grid;
    const double qx = (x + g.L) / g.h - 0.5;
    const double qy = (y + g.L) / g.h - 0.5;
    const int i0 = int(std::floor(qx)), j0 = int(std::floor(qy));
    const double tx = qx - i0, ty = qy - j0;
    auto val = [&](int i, int j) {
        if (i < 0 || j < 0 || i >= g.n || j >= g.n) return 0.0;
        return f.at(i, j);
    };
    return (1 - tx) * (1 - ty) * val(i0, j0) + tx * (1 - ty) * val(i0 + 1, j0) + (1 - tx) * ty * val(i0, j0 + 1) +
           tx * ty * val(i0 + 1, j0 + 1);
}

// Solve log F(x) = target for x in [lo, inf) with log F decreasing; log F(lo) > target.
double invert_decreasing_log(const std::function<double(double)>& logF, double lo, double target) {
    double hi = std::max(2.0 * lo, lo + 1.0);
    int guard = 0;
    while (logF(hi) >= target) {
        lo = hi;
        hi *= 2.0;
        require(++guard < 3000, ErrorCode::level_above_range, "level set radius overflow");
    }
    for (int it = 0; it < 400 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (logF(mid) >= target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity(); }

}  // namespace

std::string_view to_string(FrontMode m) noexcept {
    switch (m) {
        case FrontMode::radial: return "radial";
        case FrontMode::monotone: return "monotone";
        case FrontMode::diagonal: return "diagonal";
    }
    return "unknown";
}

double angular_average(const Field& field, double r) {
    double acc = 0.0;
    for (int k = 0; k < kAngularSamples; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / kAngularSamples;
        acc += bilinear(field, r * std::cos(phi), r * std::sin(phi));
    }
    return acc / kAngularSamples;
}

std::optional<double> level_crossing(const Field& field, double level, FrontMode mode) {
    const Grid& g = field.grid;
    const int n = g.n;
    const double h = g.h;
    switch (mode) {
        case FrontMode::radial: {
            std::vector<double> prof;
            std::vector<double> radius;
            if (g.dim == 1) {
                for (int k = 0; k < n / 2; ++k) {
                    prof.push_back(0.5 * (field.values[std::size_t(n / 2 + k)] + field.values[std::size_t(n / 2 - 1 - k)]));
                    radius.push_back((k + 0.5) * h);
                }
            } else {
                for (int k = 0; k < n / 2; ++k) {
                    radius.push_back(k * h);
                    prof.push_back(angular_average(field, k * h));
                }
            }
            for (int k = int(prof.size()) - 1; k >= 0; --k) {
                if (prof[std::size_t(k)] >= level) {
                    if (k + 1 == int(prof.size())) return radius[std::size_t(k)];
                    return interpolate(radius[std::size_t(k)], prof[std::size_t(k)], prof[std::size_t(k + 1)], h, level);
                }
            }
            return std::nullopt;
        }
        case FrontMode::monotone: {
            require(g.dim == 1, ErrorCode::grid_mismatch, "monotone crossing needs a 1D field");
            for (int i = n - 1; i >= 0; --i) {
                if (field.values[std::size_t(i)] >= level) {
                    if (i == n - 1) return g.coord(i);
                    return interpolate(g.coord(i), field.values[std::size_t(i)], field.values[std::size_t(i + 1)], h, level);
                }
            }
            return std::nullopt;
        }
        case FrontMode::diagonal: {
            require(g.dim == 2, ErrorCode::grid_mismatch, "diagonal crossing needs a 2D field");
            for (int i = n - 1; i >= 0; --i) {
                if (field.at(i, i) >= level) {
                    if (i == n - 1) return g.coord(i);
                    return interpolate(g.coord(i), field.at(i, i), field.at(i + 1, i + 1), h, level);
                }
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::pair<std::vector<double>, std::vector<double>> FrontTrace::series(double level) const {
    std::size_t li = levels.size();
    for (std::size_t k = 0; k < levels.size(); ++k)
        if (std::abs(levels[k] - level) < 1e-12) li = k;
    require(li < levels.size(), ErrorCode::parameter_out_of_range, "level not recorded in trace");
    std::pair<std::vector<double>, std::vector<double>> out;
    for (std::size_t t = 0; t < times.size(); ++t) {
        if (positions[t][li]) {
            out.first.push_back(times[t]);
            out.second.push_back(*positions[t][li]);
        }
    }
    return out;
}

double lambda_radius(const LevelSetSpec& spec, double t) {
    const TailProfile& b = spec.profile;
    const double target = -spec.beta * t;
    if (spec.shape == LevelShape::radial) {
        require(target < b.log_value(b.rho()), ErrorCode::level_above_range,
                "e^{-beta t} is not below b(rho) at t = " + std::to_string(t));
        return invert_decreasing_log([&](double s) { return b.log_value(s); }, b.rho(), target);
    }
    auto logc = [&](double x) { return safe_log(b.tail_moment(x, 0)); };
    require(target < logc(0.0), ErrorCode::level_above_range,
            "e^{-beta t} is not below c(0) at t = " + std::to_string(t));
    return invert_decreasing_log(logc, 0.0, target);
}

double lambert_w_minus1(double nu) {
    require(nu >= -kInvE && nu < 0.0, ErrorCode::out_of_branch_domain,
            "W_{-1} needs nu in [-1/e, 0)");
    if (nu == -kInvE) return -1.0;
    double w;
    const double q = 1.0 + std::numbers::e * nu;  // distance to the branch point
    if (q < 0.05) {
        const double p = -std::sqrt(2.0 * q);
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else {
        const double l1 = std::log(-nu);
        w = l1 - std::log(-l1);
    }
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - nu;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double dw = f / denom;
        w -= dw;
        if (w > -1.0) w = -1.0 - 1e-16;
        if (std::abs(dw) <= 1e-16 * std::abs(w)) break;
    }
    return w;
}

double predicted_eta_threshold(const TailProfile& profile, double beta, int d) {
    const auto& p = profile.params();
    switch (profile.family()) {
        case TailFamily::polynomial: return std::max(0.0, -std::log(p.M) / beta);
        case TailFamily::almost_linear: return std::pow(std::numbers::e / p.lambda, p.lambda) / beta;
        case TailFamily::table: return -profile.log_value(profile.rho()) / beta;
        default: (void)d; return 0.0;
    }
}

double predicted_eta(const TailProfile& profile, double beta, int d, double t) {
    const auto& p = profile.params();
    const double thr = predicted_eta_threshold(profile, beta, d);
    require(t > thr && t > 0.0, ErrorCode::below_threshold,
            "t = " + std::to_string(t) + " is not above the validity threshold " + std::to_string(thr));
    const double bt = beta * t;
    switch (profile.family()) {
        case TailFamily::polynomial: return std::exp((std::log(p.M) + bt) / (d + p.mu)) - 1.0;
        case TailFamily::log_stretched: return std::exp(std::pow(bt / p.c, 1.0 / (1.0 + p.delta)));
        case TailFamily::stretched_exp: return std::pow(bt / p.c, 1.0 / p.gamma);
        case TailFamily::almost_linear: {
            const double lam = p.lambda;
            const double w = lambert_w_minus1(-1.0 / (lam * std::pow(bt, 1.0 / lam)));
            return std::pow(lam, lam) * bt * std::pow(-w, lam);
        }
        case TailFamily::exponential_control: return bt / p.rate;
        case TailFamily::gaussian_control: return std::sqrt(bt / p.rate);
        case TailFamily::table: return lambda_radius(LevelSetSpec{LevelShape::radial, profile, beta}, t);
    }
    return 0.0;
}

double diagonal_level_function(const TailProfile& profile, double x) {
    return 0.5 * std::numbers::pi * profile.tail_moment(std::sqrt(2.0) * x, 1);
}

double diagonal_mu(const TailProfile& profile, double beta, double t) {
    require(profile.integrable(2), ErrorCode::divergent_tail_integral, "profile is not integrable in d = 2");
    const double target = -beta * t;
    auto logc = [&](double x) { return safe_log(diagonal_level_function(profile, x)); };
    require(target < logc(0.0), ErrorCode::below_threshold,
            "e^{-beta t} is not below c(0) at t = " + std::to_string(t));
    return invert_decreasing_log(logc, 0.0, target);
}

std::pair<double, double> diagonal_front_bounds(const TailProfile& profile, double beta, double t, double eps) {
    require(eps > 0.0 && eps < 1.0, ErrorCode::parameter_out_of_range, "eps must lie in (0,1)");
    const double upper = diagonal_mu(profile, beta, t);
    const double lower = 0.5 * diagonal_mu(profile, beta, t - eps * t);
    return {lower, upper};
}

}  // namespace nlfront
