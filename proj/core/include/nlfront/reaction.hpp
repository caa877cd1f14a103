#pragma once

#include "nlfront/grid.hpp"
#include "nlfront/kernel.hpp"
#include "nlfront/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlfront {

enum class LocalReaction { fisher, kpp, none };

std::string_view to_string(LocalReaction f) noexcept;
LocalReaction local_reaction_from_string(std::string_view name);

/// F(u) = alpha f(u) + (1 - alpha) (beta / theta^k) u (theta - a_minus * u)^k.
struct ReactionSpec {
    double alpha = 1.0;
    int k = 1;
    LocalReaction local_f = LocalReaction::fisher;
    double nu_f = 1.0;  // derived from beta and theta by make_reaction
    std::optional<Kernel> comp_kernel;
    double theta = 1.0;
    double beta = 1.0;

    /// f(r) for scalar r.
    double local(double r) const;
    /// f(r) / r, continuous at r = 0.
    double local_over_r(double r) const;
    /// G(r 1) for the constant field r 1 (a_minus * const = const).
    double G_constant(double r) const;
};

/// Builds a spec with nu_f = beta/theta (fisher) or beta/theta^2 (kpp), times
/// nu_scale. nu_scale != 1 deliberately breaks the normalization and exists
/// for seeded-failure checks.
ReactionSpec make_reaction(double alpha, int k, LocalReaction local_f, double theta, double beta,
                           std::optional<Kernel> comp_kernel = std::nullopt, double nu_scale = 1.0);

/// G(u) written into g; `comp` is a_minus * u or null when alpha = 1.
void evaluate_G(const ReactionSpec& spec, const double* u, const double* comp, double* g, std::size_t count);

/// Per-grid evaluator caching the competition convolution engine.
class ReactionEvaluator {
public:
    ReactionEvaluator(const ReactionSpec& spec, const Grid& grid);

    const ReactionSpec& spec() const noexcept { return spec_; }
    bool nonlocal() const noexcept { return bool(comp_); }

    /// a_minus * u on the grid (zero outside the domain).
    void competition(const double* u, double* out);
    /// G(u) written into g; `comp` is a_minus * u or null when alpha = 1.
    void G(const double* u, const double* comp, double* g, std::size_t count) const;

private:
    ReactionSpec spec_;
    std::optional<Convolver> comp_;
};

/// Values in [-tol, theta + tol] are clamped into [0, theta]; anything further out is out-of-tube.
inline constexpr double kTubeTolerance = 1e-8;

Field apply_F(const ReactionSpec& spec, const Field& u);
Field apply_G(const ReactionSpec& spec, const Field& u);

struct ReactionReport {
    double lipschitz_K = 0.0;         // Lipschitz estimate of f(r)/r
    double lipschitz_G = 0.0;         // Lipschitz estimate of G on constants
    bool lipschitz_finite = false;
    bool endpoint_zeros = false;      // f(0) = f(theta) = 0 and F(0) = F(theta) = 0
    bool bound_ok = false;            // 0 <= f(r) <= beta r and 0 <= F(r) <= beta r
    double max_bound_violation = 0.0;
    double p = 0.0;                   // beta + alpha theta K
    std::vector<std::string> untested_hypotheses;

    bool all_pass() const { return lipschitz_finite && endpoint_zeros && bound_ok; }
};

ReactionReport check_reaction_conditions(const ReactionSpec& spec, const std::vector<double>& r_grid);
/// Uniform sample of [0, theta] with `count` points.
std::vector<double> uniform_r_grid(double theta, int count);

struct DominationResult {
    bool holds = false;
    double best_rho = 0.0;
};

/// kappa a(x) >= (1 - alpha) k beta a_minus(x) + rho 1_{B_rho}(x) at every node, for the largest rho on a scan.
DominationResult check_kernel_domination(const ReactionSpec& spec, const Kernel& kernel, const ModelParams& model,
                                         const Grid& grid);

}  // namespace nlfront
