#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nlfront {

enum class TailFamily {
    polynomial,           // M / (1+s)^{d+mu}
    log_stretched,        // M s^nu exp(-c (log s)^{1+delta})
    stretched_exp,        // M s^nu exp(-c s^gamma)
    almost_linear,        // M exp(-s / (log s)^lambda)
    exponential_control,  // M exp(-rate s)
    gaussian_control,     // M exp(-rate s^2)
    table,                // log-linear interpolation of (s_i, b_i)
};

std::string_view to_string(TailFamily f) noexcept;
TailFamily tail_family_from_string(std::string_view name);

/// Family parameters. Only the fields relevant to the chosen family are read.
struct TailParams {
    double M = 1.0;
    double mu = 1.0;
    int d = 1;  // dimension entering the polynomial exponent d + mu
    double c = 1.0;
    double delta = 1.0;
    double gamma = 0.5;
    double nu = 0.0;
    double lambda = 2.0;
    double rate = 1.0;
    std::vector<double> table_s;
    std::vector<double> table_b;

    bool operator==(const TailParams&) const = default;
};

/// Radial tail b: [0, inf) -> (0, inf), continued by the constant b(rho) on [0, rho].
class TailProfile {
public:
    TailProfile() = default;
    TailProfile(TailFamily family, TailParams params, double rho, double inner_value);

    TailFamily family() const noexcept { return family_; }
    const TailParams& params() const noexcept { return params_; }
    double rho() const noexcept { return rho_; }
    double inner_value() const noexcept { return inner_value_; }

    /// b(s) for s >= 0.
    double operator()(double s) const;
    /// log b(s); finite even where b underflows.
    double log_value(double s) const;
    /// Raw family formula (log) without the inner continuation.
    double log_formula(double s) const;

    /// Radial integrability of b(s) s^{dim-1}.
    bool integrable(int dim) const;

    /// Integral of b(s) s^power over [r0, r1].
    double moment(double r0, double r1, int power) const;
    /// Integral of b(s) s^power over [r, inf), quadrature plus asymptotic remainder.
    double tail_moment(double r, int power) const;
    /// Asymptotic remainder of the integral of b(s) s^power over [S, inf).
    double tail_remainder(double S, int power) const;

    /// Same profile multiplied by a positive constant.
    TailProfile scaled(double factor) const;

private:
    TailFamily family_ = TailFamily::polynomial;
    TailParams params_;
    double rho_ = 0.0;
    double inner_value_ = 1.0;
};

/// Validates params, picks rho as the smallest abscissa from which the
/// formula is strictly decreasing and <= 1, and sets inner_value = b(rho).
TailProfile build_profile(TailFamily family, const TailParams& params);

/// b(s); identical to profile(s).
double eval_tail(const TailProfile& profile, double s);

/// Finite-horizon surrogates for the asymptotic tail classes.
struct TailClassReport {
    bool long_tailed = false;
    bool log_convex = false;
    bool integrable = false;
    double horizon = 0.0;
    double tolerance = 0.0;
    double min_shift_ratio = 0.0;    // min over tau in {1,2,4} of b(S+tau)/b(S)
    double min_second_diff = 0.0;    // most negative second difference of log b
    std::string note;
};

TailClassReport classify_tail(const TailProfile& profile, double horizon, double tolerance);

/// True when log p1 and log p2 agree to `tolerance` (relative, both orderings)
/// at the end of a geometric ladder ending at `horizon`, with a nonincreasing
/// discrepancy along the ladder.
bool log_equivalent(const TailProfile& p1, const TailProfile& p2, double horizon, double tolerance);

}  // namespace nlfront
