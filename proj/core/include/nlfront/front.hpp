#pragma once

#include "nlfront/grid.hpp"
#include "nlfront/tail_profile.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nlfront {

enum class FrontMode { radial, monotone, diagonal };

std::string_view to_string(FrontMode m) noexcept;

/// radial: largest radius where the symmetrized (1D) or angle-averaged (2D)
/// profile is >= level; monotone: rightmost abscissa with u >= level;
/// diagonal: largest X with u(X, X) >= level. Linear interpolation to the
/// next node; empty when the level is never reached.
std::optional<double> level_crossing(const Field& field, double level, FrontMode mode);

/// Number of angular samples used by the 2D radial reduction.
inline constexpr int kAngularSamples = 64;

/// Angle-averaged profile of a 2D field at radius r (bilinear sampling).
double angular_average(const Field& field, double r);

enum class LevelShape { radial, orthant };

struct LevelSetSpec {
    LevelShape shape = LevelShape::radial;
    TailProfile profile;
    double beta = 1.0;
};

/// Radius (radial) or crossing abscissa (orthant, d = 1) of {c >= e^{-beta t}}.
double lambda_radius(const LevelSetSpec& spec, double t);

/// Lower real branch W_{-1} on [-1/e, 0).
double lambert_w_minus1(double nu);

/// Closed-form front law eta(t) for the profile family (numeric inversion for tables).
double predicted_eta(const TailProfile& profile, double beta, int d, double t);

/// Earliest time at which predicted_eta is defined.
double predicted_eta_threshold(const TailProfile& profile, double beta, int d);

/// c(x) = (pi/2) * integral_{sqrt(2) x}^inf b(r) r dr.
double diagonal_level_function(const TailProfile& profile, double x);

/// Inverse of diagonal_level_function at e^{-beta t}.
double diagonal_mu(const TailProfile& profile, double beta, double t);

/// (mu(t - eps t) / 2, mu(t)).
std::pair<double, double> diagonal_front_bounds(const TailProfile& profile, double beta, double t, double eps);

/// Measured crossing positions per time and per level (levels as fractions of theta).
struct FrontTrace {
    FrontMode mode = FrontMode::radial;
    std::vector<double> levels;
    std::vector<double> times;
    std::vector<std::vector<std::optional<double>>> positions;  // [time][level]

    /// (times, positions) at one level, skipping times without a crossing.
    std::pair<std::vector<double>, std::vector<double>> series(double level) const;
};

enum class GrowthLaw { linear, exponential, power, t_log_power };

std::string_view to_string(GrowthLaw law) noexcept;
GrowthLaw growth_law_from_string(std::string_view name);

struct LawFit {
    GrowthLaw law = GrowthLaw::linear;
    bool available = false;
    double coefficient = 0.0;  // c1, exp(c1), c, c
    double parameter = 0.0;    // slope, rate, exponent, lambda
    double residual = 0.0;     // RMS relative deviation of the fitted curve
    int points = 0;
};

struct GrowthFit {
    GrowthLaw law = GrowthLaw::linear;
    std::vector<LawFit> candidates;  // one per law, in enum order

    const LawFit& fit(GrowthLaw l) const { return candidates[static_cast<std::size_t>(l)]; }
    const LawFit& best() const { return fit(law); }
};

/// Least-squares fits of position(t) against the four candidate laws after
/// dropping the first 20% of points; needs at least 12 remaining points.
GrowthFit classify_growth(const std::vector<double>& times, const std::vector<double>& positions);

GrowthFit classify_growth(const FrontTrace& trace, double level);

/// CSV rows: law, coefficient, parameter, residual, points, selected.
void write_fit_csv(const GrowthFit& fit, std::ostream& os);

}  // namespace nlfront
