#include "nlfront/tail_profile.hpp"

#include "nlfront/error.hpp"
#include "nlfront/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nlfront {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) { return std::to_string(v); }

double table_log_value(const TailParams& p, double s) {
    const auto& xs = p.table_s;
    const auto& bs = p.table_b;
    const std::size_t n = xs.size();
    if (s <= xs.front()) return std::log(bs.front());
    if (s >= xs.back()) {
        const double slope = (std::log(bs[n - 1]) - std::log(bs[n - 2])) / (xs[n - 1] - xs[n - 2]);
        return std::log(bs[n - 1]) + slope * (s - xs[n - 1]);
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double w = (s - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - w) * std::log(bs[i]) + w * std::log(bs[i + 1]);
}

double table_last_slope(const TailParams& p) {
    const std::size_t n = p.table_s.size();
    return (std::log(p.table_b[n - 1]) - std::log(p.table_b[n - 2])) /
           (p.table_s[n - 1] - p.table_s[n - 2]);
}

// Derivative of log b (the formula) for s beyond rho.
double dlog_formula(TailFamily f, const TailParams& p, double s) {
    switch (f) {
        case TailFamily::polynomial: return -(p.d + p.mu) / (1.0 + s);
        case TailFamily::log_stretched: {
            const double ls = std::log(s);
            return p.nu / s - p.c * (1.0 + p.delta) * std::pow(ls, p.delta) / s;
        }
        case TailFamily::stretched_exp: return p.nu / s - p.c * p.gamma * std::pow(s, p.gamma - 1.0);
        case TailFamily::almost_linear: {
            const double ls = std::log(s);
            return -std::pow(ls, -p.lambda) * (1.0 - p.lambda / ls);
        }
        case TailFamily::exponential_control: return -p.rate;
        case TailFamily::gaussian_control: return -2.0 * p.rate * s;
        case TailFamily::table: {
            if (s >= p.table_s.back()) return table_last_slope(p);
            const auto it = std::upper_bound(p.table_s.begin(), p.table_s.end(), s);
            std::size_t i = static_cast<std::size_t>(it - p.table_s.begin());
            i = std::clamp<std::size_t>(i, 1, p.table_s.size() - 1);
            return (std::log(p.table_b[i]) - std::log(p.table_b[i - 1])) /
                   (p.table_s[i] - p.table_s[i - 1]);
        }
    }
    return 0.0;
}

void validate(TailFamily f, const TailParams& p) {
    auto check = [](bool ok, const std::string& msg) {
        require(ok, ErrorCode::parameter_out_of_range, msg);
    };
    check(p.M > 0.0 && std::isfinite(p.M), "M must be positive, got " + num(p.M));
    switch (f) {
        case TailFamily::polynomial:
            check(p.d == 1 || p.d == 2, "d must be 1 or 2");
            check(p.d + p.mu > 0.0, "d + mu must be positive, got " + num(p.d + p.mu));
            break;
        case TailFamily::log_stretched:
            check(p.c > 0.0, "c must be positive");
            check(p.delta > 0.0, "delta must be positive");
            break;
        case TailFamily::stretched_exp:
            check(p.c > 0.0, "c must be positive");
            check(p.gamma > 0.0 && p.gamma < 1.0, "gamma must lie in (0,1), got " + num(p.gamma));
            break;
        case TailFamily::almost_linear:
            check(p.lambda > 1.0, "lambda must exceed 1, got " + num(p.lambda));
            break;
        case TailFamily::exponential_control:
        case TailFamily::gaussian_control:
            check(p.rate > 0.0, "rate must be positive");
            break;
        case TailFamily::table: {
            check(p.table_s.size() >= 2 && p.table_s.size() == p.table_b.size(),
                  "table needs at least two (s, b) pairs of equal length");
            check(p.table_s.front() >= 0.0, "table abscissae must be nonnegative");
            for (std::size_t i = 1; i < p.table_s.size(); ++i)
                check(p.table_s[i] > p.table_s[i - 1], "table abscissae must increase strictly");
            for (double b : p.table_b) check(b > 0.0 && std::isfinite(b), "table values must be positive");
            check(table_last_slope(p) < 0.0, "table must decrease on its last segment");
            break;
        }
    }
}

// Smallest abscissa from which the formula is strictly decreasing.
double monotone_start(TailFamily f, const TailParams& p) {
    switch (f) {
        case TailFamily::polynomial: return 0.0;
        case TailFamily::log_stretched: {
            const double nu = std::max(p.nu, 0.0);
            return std::max(1.0, std::exp(std::pow(nu / (p.c * (1.0 + p.delta)), 1.0 / p.delta)));
        }
        case TailFamily::stretched_exp: {
            const double nu = std::max(p.nu, 0.0);
            return std::pow(nu / (p.c * p.gamma), 1.0 / p.gamma);
        }
        case TailFamily::almost_linear: return std::exp(p.lambda);
        case TailFamily::exponential_control:
        case TailFamily::gaussian_control: return 0.0;
        case TailFamily::table: {
            std::size_t i = p.table_b.size() - 1;
            while (i > 0 && p.table_b[i - 1] > p.table_b[i]) --i;
            return p.table_s[i];
        }
    }
    return 0.0;
}

}  // namespace

std::string_view to_string(TailFamily f) noexcept {
    switch (f) {
        case TailFamily::polynomial: return "polynomial";
        case TailFamily::log_stretched: return "log-stretched";
        case TailFamily::stretched_exp: return "stretched-exp";
        case TailFamily::almost_linear: return "almost-linear";
        case TailFamily::exponential_control: return "exponential-control";
        case TailFamily::gaussian_control: return "gaussian-control";
        case TailFamily::table: return "table";
    }
    return "unknown";
}

TailFamily tail_family_from_string(std::string_view name) {
    for (auto f : {TailFamily::polynomial, TailFamily::log_stretched, TailFamily::stretched_exp,
                   TailFamily::almost_linear, TailFamily::exponential_control,
                   TailFamily::gaussian_control, TailFamily::table}) {
        if (to_string(f) == name) return f;
    }
    fail(ErrorCode::parameter_out_of_range, "unknown tail family '" + std::string(name) + "'");
}

TailProfile::TailProfile(TailFamily family, TailParams params, double rho, double inner_value)
    : family_(family), params_(std::move(params)), rho_(rho), inner_value_(inner_value) {}

double TailProfile::log_formula(double s) const {
    const auto& p = params_;
    const double logM = std::log(p.M);
    switch (family_) {
        case TailFamily::polynomial: return logM - (p.d + p.mu) * std::log1p(s);
        case TailFamily::log_stretched: {
            if (s <= 1.0) return logM + (s > 0.0 ? p.nu * std::log(s) : 0.0);
            return logM + p.nu * std::log(s) - p.c * std::pow(std::log(s), 1.0 + p.delta);
        }
        case TailFamily::stretched_exp: {
            const double lead = p.nu == 0.0 ? 0.0 : p.nu * std::log(s);
            return logM + lead - p.c * std::pow(s, p.gamma);
        }
        case TailFamily::almost_linear: {
            if (s <= 1.0) return kInf;
            return logM - s / std::pow(std::log(s), p.lambda);
        }
        case TailFamily::exponential_control: return logM - p.rate * s;
        case TailFamily::gaussian_control: return logM - p.rate * s * s;
        case TailFamily::table: return logM + table_log_value(p, s);
    }
    return 0.0;
}

double TailProfile::log_value(double s) const {
    if (s <= rho_) return std::log(inner_value_);
    return log_formula(s);
}

double TailProfile::operator()(double s) const {
    if (s <= rho_) return inner_value_;
    return std::exp(log_formula(s));
}

bool TailProfile::integrable(int dim) const {
    if (family_ == TailFamily::polynomial) return params_.d + params_.mu > dim;
    return true;
}

TailProfile TailProfile::scaled(double factor) const {
    require(factor > 0.0, ErrorCode::parameter_out_of_range, "scale factor must be positive");
    TailParams p = params_;
    p.M *= factor;
    return TailProfile(family_, std::move(p), rho_, inner_value_ * factor);
}

double TailProfile::moment(double r0, double r1, int power) const {
    if (!(r1 > r0)) return 0.0;
    double total = 0.0;
    if (r0 < rho_) {
        const double hi = std::min(r1, rho_);
        const int q = power + 1;
        total += inner_value_ * (std::pow(hi, q) - std::pow(r0, q)) / q;
        r0 = hi;
        if (!(r1 > r0)) return total;
    }
    auto f = [this, power](double s) {
        const double lv = log_formula(s);
        return power == 0 ? std::exp(lv) : std::exp(lv + power * std::log(s));
    };
    double a = r0;
    if (a < 1.0) {
        // s = u^2 smooths the sqrt-type behaviour some families have at the origin
        const double b = std::min(r1, 1.0);
        total += integrate([&f](double u) { return 2.0 * u * f(u * u); }, std::sqrt(a), std::sqrt(b), 1e-13);
        a = b;
    }
    while (a < r1) {
        const double b = std::min(r1, std::max(2.0 * a, a + 1.0));
        total += integrate(f, a, b, 1e-13);
        a = b;
    }
    return total;
}

double TailProfile::tail_remainder(double S, int power) const {
    const auto& p = params_;
    S = std::max(S, rho_);
    switch (family_) {
        case TailFamily::polynomial: {
            const double q = p.d + p.mu;
            if (!(q > power + 1)) return kInf;
            // integral of (u-1)^power u^{-q} over u >= 1+S, expanded binomially
            const double u = 1.0 + S;
            double sum = 0.0;
            double binom = 1.0;
            for (int k = 0; k <= power; ++k) {
                if (k > 0) binom = binom * (power - k + 1) / k;
                const double sign = ((power - k) % 2 == 0) ? 1.0 : -1.0;
                const double e = k - q + 1.0;
                sum += sign * binom * std::pow(u, e) / (-e);
            }
            return p.M * sum;
        }
        case TailFamily::exponential_control: {
            // M * sum_k power!/k! S^k / rate^{power-k+1} * exp(-rate S)
            double sum = 0.0;
            double fact_ratio = 1.0;  // power!/k!, built downward
            for (int k = power; k >= 0; --k) {
                sum += fact_ratio * std::pow(S, k) / std::pow(p.rate, power - k + 1);
                fact_ratio *= k;
            }
            return std::exp(std::log(p.M) - p.rate * S) * sum;
        }
        case TailFamily::gaussian_control: {
            if (power == 0)
                return p.M * 0.5 * std::sqrt(std::numbers::pi / p.rate) * std::erfc(std::sqrt(p.rate) * S);
            if (power == 1) return std::exp(std::log(p.M) - p.rate * S * S) / (2.0 * p.rate);
            break;
        }
        case TailFamily::table: {
            if (S >= p.table_s.back() && power == 0) {
                const double r = -table_last_slope(p);
                return std::exp(log_formula(S)) / r;
            }
            break;
        }
        default: break;
    }
    // Leading Laplace term b(S) S^power / phi'(S), phi = -log b - power log s.
    const double phi_prime = -dlog_formula(family_, p, S) - (S > 0.0 ? power / S : 0.0);
    if (!(phi_prime > 0.0)) return kInf;
    const double lv = log_formula(S) + (power > 0 ? power * std::log(S) : 0.0);
    return std::exp(lv) / phi_prime;
}

double TailProfile::tail_moment(double r, int power) const {
    if (family_ == TailFamily::polynomial && !(params_.d + params_.mu > power + 1))
        fail(ErrorCode::divergent_tail_integral,
             "polynomial tail with d+mu=" + num(params_.d + params_.mu) + " is not integrable against s^" +
                 std::to_string(power));
    const bool exact_remainder =
        family_ == TailFamily::polynomial || family_ == TailFamily::exponential_control ||
        (family_ == TailFamily::gaussian_control && power <= 1) ||
        (family_ == TailFamily::table && power == 0);
    double total = 0.0;
    double a = r;
    if (a < rho_) {
        total += moment(a, rho_, power);
        a = rho_;
    }
    double S = std::max(a, 1.0);
    total += moment(a, S, power);
    for (int it = 0; it < 2000; ++it) {
        const double rem = tail_remainder(S, power);
        if (std::isfinite(rem)) {
            const bool done = exact_remainder ? (S >= 8.0 * std::max(1.0, rho_) || rem <= 1e-13 * total)
                                              : (rem <= 1e-13 * total || (total == 0.0 && rem == 0.0));
            if (done) return total + rem;
        }
        const double next = std::max(2.0 * S, S + 1.0);
        total += moment(S, next, power);
        S = next;
        if (!std::isfinite(S)) break;
    }
    fail(ErrorCode::divergent_tail_integral, "tail integral did not converge");
}

TailProfile build_profile(TailFamily family, const TailParams& params) {
    validate(family, params);
    TailProfile raw(family, params, 0.0, 1.0);
    const double s0 = monotone_start(family, params);
    auto lf = [&](double s) { return raw.log_formula(s); };
    double rho = s0;
    if (lf(s0) > 0.0) {
        double hi = std::max(2.0 * s0, s0 + 1.0);
        int guard = 0;
        while (lf(hi) > 0.0) {
            hi = 2.0 * hi;
            require(++guard < 2000, ErrorCode::parameter_out_of_range, "profile never drops below 1");
        }
        rho = bisect_root(lf, s0, hi, 1e-15);
        // step onto the side where b <= 1
        while (lf(rho) > 0.0) rho = std::nextafter(rho, kInf);
    }
    const double inner = std::exp(lf(rho));
    return TailProfile(family, params, rho, inner);
}

double eval_tail(const TailProfile& profile, double s) { return profile(s); }

TailClassReport classify_tail(const TailProfile& profile, double horizon, double tolerance) {
    TailClassReport rep;
    rep.horizon = horizon;
    rep.tolerance = tolerance;
    rep.note = "finite-horizon surrogate: shift ratios at S, ratio ladder, log second differences on (rho, S]";
    const double S = horizon;
    const double rho = profile.rho();

    double min_ratio = kInf;
    bool in_band = true;
    for (double tau : {1.0, 2.0, 4.0}) {
        const double ratio = std::exp(profile.log_value(S + tau) - profile.log_value(S));
        min_ratio = std::min(min_ratio, ratio);
        if (ratio < 1.0 - tolerance || ratio > 1.0 + 1e-15) in_band = false;
    }
    bool ladder_ok = true;
    double prev = -kInf;
    for (double s = std::max(2.0 * rho, 1.0); s <= S; s *= 2.0) {
        const double ratio = std::exp(profile.log_value(s + 1.0) - profile.log_value(s));
        if (ratio < prev - 1e-12) ladder_ok = false;
        prev = ratio;
    }
    rep.min_shift_ratio = min_ratio;
    rep.long_tailed = in_band && ladder_ok;

    double min_d2 = kInf;
    const double start = std::max(2.0 * rho, 1e-3);
    for (double s = start; s <= S; s *= 1.1) {
        const double h = 0.05 * s;
        if (s - h <= rho) continue;
        const double d2 = profile.log_value(s + h) - 2.0 * profile.log_value(s) + profile.log_value(s - h);
        min_d2 = std::min(min_d2, d2);
    }
    rep.min_second_diff = min_d2;
    rep.log_convex = min_d2 >= -tolerance;
    rep.integrable = profile.integrable(profile.family() == TailFamily::polynomial ? profile.params().d : 1);
    return rep;
}

bool log_equivalent(const TailProfile& p1, const TailProfile& p2, double horizon, double tolerance) {
    const double floor_s = 2.0 * std::max({p1.rho(), p2.rho(), 1.0});
    double prev = kInf;
    double last = kInf;
    for (int k = 4; k >= 0; --k) {
        const double s = horizon / std::pow(10.0, k);
        if (s < floor_s) continue;
        const double l1 = p1.log_value(s);
        const double l2 = p2.log_value(s);
        if (std::abs(l1) < 1e-300 || std::abs(l2) < 1e-300) continue;
        const double dev = std::max(std::abs(l1 / l2 - 1.0), std::abs(l2 / l1 - 1.0));
        if (dev > prev + 1e-12) return false;
        prev = dev;
        last = dev;
    }
    return last <= tolerance;
}

}  // namespace nlfront
