#pragma once

#include "nlfront/front.hpp"
#include "nlfront/grid.hpp"
#include "nlfront/kernel.hpp"
#include "nlfront/model.hpp"
#include "nlfront/reaction.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace nlfront {

/// integrable: compactly supported / integrable data. In 1D the exterior
/// continues each edge value with the kernel shape b(|x|) unless the policy
/// turns far_field off; in 2D it is zero.
/// monotone: plateau data decreasing in every coordinate; the exterior on the
/// low side of each axis replicates the edge values. The high side continues
/// with the one-sided tail mass of b in 1D and is zero in 2D.
enum class ICClass { integrable, monotone };

std::string_view to_string(ICClass c) noexcept;
ICClass ic_class_from_string(std::string_view name);

/// When and how the domain grows.
struct DomainPolicy {
    double expand_threshold = 1e-8;  // relative to theta
    int n_cap = 1 << 16;             // points per axis before coarsening (or failing)
    double L_cap = 1e15;             // half-width cap; exceeding it is max-domain-exceeded
    bool coarsen = false;            // past n_cap: double h instead of failing
    bool far_field = true;           // integrable: continue u past the edges; false extends by zero

    bool operator==(const DomainPolicy&) const = default;
};

namespace detail {
class Engine;
}

struct SimState {
    ModelParams params;
    ReactionSpec reaction;
    Kernel kernel;
    Field field;
    double time = 0.0;
    ICClass ic_class = ICClass::integrable;
    double boundary_mass = 0.0;
    DomainPolicy policy;
    double lipschitz_G = 0.0;
    int expansions = 0;
    int coarsenings = 0;

    SimState() = default;
    SimState(const SimState& other);
    SimState& operator=(const SimState& other);
    SimState(SimState&&) noexcept = default;
    SimState& operator=(SimState&&) noexcept = default;
    ~SimState();

    std::shared_ptr<detail::Engine> engine;  // rebuilt lazily; never shared between copies
};

SimState make_state(const ModelParams& params, const ReactionSpec& reaction, const Kernel& kernel, Field field,
                    ICClass ic_class, const DomainPolicy& policy = {});

/// 0.1 / (kappa + m + beta + L_G theta).
double dt_max(const SimState& state);

/// kappa a*u - m u - u G(u) with the exterior convention of the state's class.
Field right_hand_side(SimState& state, const Field& u);

/// Max |u| over the outermost two node layers (integrable) or over the two
/// layers on the high side of each axis (monotone).
double measure_boundary_mass(const SimState& state);

/// One RK4 step; clamps violations up to 1e-9 theta, retries once with two
/// half steps, then reports tube-violation.
void advance(SimState& state, double dt);
SimState step(SimState state, double dt);

/// Doubles the domain while the boundary mass exceeds the policy threshold.
/// Returns true when the domain changed.
bool expand_in_place(SimState& state);
SimState expand_domain_if_needed(SimState state);

/// Snapshot-level diagnostics recorded alongside the front trace.
struct SnapshotInfo {
    double boundary_mass = 0.0;
    double sup = 0.0;
    double inf = 0.0;
    double mass = 0.0;
    double L = 0.0;
    int n = 0;
    double h = 0.0;
};

struct Trajectory {
    FrontTrace trace;
    std::vector<SnapshotInfo> info;

    const std::vector<double>& times() const { return trace.times; }
};

struct SolveOptions {
    double snapshot_dt = 1.0;
    std::vector<double> levels{0.1, 0.5, 0.9};  // fractions of theta
    std::optional<FrontMode> mode;               // default follows dimension and class
    double dt = 0.0;                             // 0: use dt_max
    /// Called after every snapshot; returning false stops the run early.
    std::function<bool(const SimState&)> on_snapshot;
};

FrontMode default_front_mode(const SimState& state);

/// Integrates up to absolute time T.
Trajectory solve(SimState& state, double T, const SolveOptions& options);

struct LinearSeriesResult {
    Field w;
    double truncation_bound = 0.0;
    int terms = 0;
};

/// w = e^{-m t} sum_{n=0}^{N} (kappa t)^n / n! a^{*n} * u0 on the grid of u0.
LinearSeriesResult solve_linear_series(const Kernel& kernel, const Field& u0, double t, int n_terms,
                                       const ModelParams& params, double tolerance = 1e-10);

/// Smallest admissible term count ceil(kappa t e) + 20.
int linear_series_terms(double kappa, double t);

/// Rows t, level, position, predicted_eta, boundary_mass; `predicted` may be empty.
void write_trajectory_csv(const Trajectory& traj, double theta, const std::function<std::optional<double>(double)>& predicted,
                          std::ostream& os);

}  // namespace nlfront
