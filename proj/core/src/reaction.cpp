#include "nlfront/reaction.hpp"

#include "nlfront/error.hpp"

#include <algorithm>
#include <cmath>

namespace nlfront {

void validate(const ModelParams& params) {
    require(params.kappa > 0.0, ErrorCode::parameter_out_of_range, "kappa must be positive");
    require(params.m > 0.0, ErrorCode::parameter_out_of_range, "m must be positive");
    require(params.beta() > 0.0, ErrorCode::parameter_out_of_range, "beta = kappa - m must be positive");
}

std::string_view to_string(LocalReaction f) noexcept {
    switch (f) {
        case LocalReaction::fisher: return "fisher";
        case LocalReaction::kpp: return "kpp";
        case LocalReaction::none: return "none";
    }
    return "unknown";
}

LocalReaction local_reaction_from_string(std::string_view name) {
    if (name == "fisher") return LocalReaction::fisher;
    if (name == "kpp") return LocalReaction::kpp;
    if (name == "none") return LocalReaction::none;
    fail(ErrorCode::parameter_out_of_range, "unknown local reaction '" + std::string(name) + "'");
}

double ReactionSpec::local_over_r(double r) const {
    switch (local_f) {
        case LocalReaction::fisher: return nu_f * (theta - r);
        case LocalReaction::kpp: return nu_f * (theta - r) * (theta - r);
        case LocalReaction::none: return 0.0;
    }
    return 0.0;
}

double ReactionSpec::local(double r) const { return r * local_over_r(r); }

double ReactionSpec::G_constant(double r) const {
    if (r == 0.0) return 0.0;
    const double nonlocal = (1.0 - alpha) * beta * std::pow(std::max(theta - r, 0.0) / theta, k);
    return beta - alpha * local_over_r(r) - nonlocal;
}

ReactionSpec make_reaction(double alpha, int k, LocalReaction local_f, double theta, double beta,
                           std::optional<Kernel> comp_kernel, double nu_scale) {
    require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::parameter_out_of_range, "alpha must lie in [0,1]");
    require(k >= 1, ErrorCode::parameter_out_of_range, "k must be a positive integer");
    require(theta > 0.0, ErrorCode::parameter_out_of_range, "theta must be positive");
    require(beta > 0.0, ErrorCode::parameter_out_of_range, "beta must be positive");
    require(nu_scale > 0.0, ErrorCode::parameter_out_of_range, "nu scale must be positive");
    require(alpha == 1.0 || comp_kernel.has_value(), ErrorCode::parameter_out_of_range,
            "alpha < 1 needs a competition kernel");
    require(alpha < 1.0 || local_f != LocalReaction::none, ErrorCode::parameter_out_of_range,
            "alpha = 1 needs a local reaction");
    ReactionSpec s;
    s.alpha = alpha;
    s.k = k;
    s.local_f = local_f;
    s.theta = theta;
    s.beta = beta;
    s.comp_kernel = std::move(comp_kernel);
    switch (local_f) {
        case LocalReaction::fisher: s.nu_f = beta / theta; break;
        case LocalReaction::kpp: s.nu_f = beta / (theta * theta); break;
        case LocalReaction::none: s.nu_f = 0.0; break;
    }
    s.nu_f *= nu_scale;
    return s;
}

ReactionEvaluator::ReactionEvaluator(const ReactionSpec& spec, const Grid& grid) : spec_(spec) {
    if (spec_.alpha < 1.0) comp_.emplace(make_stencil(*spec_.comp_kernel, grid));
}

void ReactionEvaluator::competition(const double* u, double* out) { comp_->apply(u, out); }

void ReactionEvaluator::G(const double* u, const double* comp, double* g, std::size_t count) const {
    evaluate_G(spec_, u, comp, g, count);
}

void evaluate_G(const ReactionSpec& s, const double* u, const double* comp, double* g, std::size_t count) {
    const double w = (1.0 - s.alpha) * s.beta;
    const double inv_theta = 1.0 / s.theta;
    for (std::size_t i = 0; i < count; ++i) {
        const double r = std::clamp(u[i], 0.0, s.theta);
        if (r == 0.0) {
            g[i] = 0.0;
            continue;
        }
        double val = s.beta - s.alpha * s.local_over_r(r);
        if (comp) val -= w * std::pow(std::max(s.theta - comp[i], 0.0) * inv_theta, s.k);
        g[i] = val;
    }
}

namespace {

Field clamp_to_tube(const ReactionSpec& spec, const Field& u) {
    Field out = u;
    const double tol = kTubeTolerance * spec.theta;
    for (double& v : out.values) {
        require(std::isfinite(v) && v >= -tol && v <= spec.theta + tol, ErrorCode::out_of_tube,
                "value " + std::to_string(v) + " outside [0, theta]");
        v = std::clamp(v, 0.0, spec.theta);
    }
    return out;
}

}  // namespace

Field apply_G(const ReactionSpec& spec, const Field& u) {
    Field v = clamp_to_tube(spec, u);
    ReactionEvaluator ev(spec, v.grid);
    Field g = zero_field(v.grid);
    if (ev.nonlocal()) {
        std::vector<double> comp(v.values.size());
        ev.competition(v.values.data(), comp.data());
        ev.G(v.values.data(), comp.data(), g.values.data(), g.values.size());
    } else {
        ev.G(v.values.data(), nullptr, g.values.data(), g.values.size());
    }
    return g;
}

Field apply_F(const ReactionSpec& spec, const Field& u) {
    Field v = clamp_to_tube(spec, u);
    Field F = zero_field(v.grid);
    std::vector<double> comp;
    if (spec.alpha < 1.0) {
        ReactionEvaluator ev(spec, v.grid);
        comp.resize(v.values.size());
        ev.competition(v.values.data(), comp.data());
    }
    const double w = (1.0 - spec.alpha) * spec.beta / std::pow(spec.theta, spec.k);
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        const double r = v.values[i];
        double val = spec.alpha * spec.local(r);
        if (!comp.empty()) val += w * r * std::pow(std::max(spec.theta - comp[i], 0.0), spec.k);
        F.values[i] = val;
    }
    return F;
}

std::vector<double> uniform_r_grid(double theta, int count) {
    std::vector<double> r(std::size_t(std::max(count, 2)));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = theta * double(i) / double(r.size() - 1);
    return r;
}

ReactionReport check_reaction_conditions(const ReactionSpec& spec, const std::vector<double>& r_grid) {
    ReactionReport rep;
    std::vector<double> r = r_grid;
    std::sort(r.begin(), r.end());
    const double theta = spec.theta;
    const double beta = spec.beta;

    double K = 0.0, LG = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        const double dr = r[i] - r[i - 1];
        if (dr <= 0.0) continue;
        K = std::max(K, std::abs(spec.local_over_r(r[i]) - spec.local_over_r(r[i - 1])) / dr);
        if (r[i - 1] > 0.0) LG = std::max(LG, std::abs(spec.G_constant(r[i]) - spec.G_constant(r[i - 1])) / dr);
    }
    rep.lipschitz_K = K;
    rep.lipschitz_G = LG;
    rep.lipschitz_finite = std::isfinite(K) && std::isfinite(LG);

    const double zero_tol = 1e-14 * std::max(1.0, theta);
    auto F_const = [&](double x) { return x * (beta - spec.G_constant(x)); };
    rep.endpoint_zeros = std::abs(spec.local(0.0)) <= zero_tol && std::abs(spec.alpha * spec.local(theta)) <= zero_tol &&
                         std::abs(F_const(0.0)) <= zero_tol && std::abs(F_const(theta)) <= zero_tol * beta;

    double worst = 0.0;
    for (double x : r) {
        const double f = spec.alpha == 0.0 ? 0.0 : spec.local(x);
        const double F = F_const(x);
        const double cap = beta * x;
        worst = std::max({worst, -f, f - cap, -F, F - cap});
    }
    rep.max_bound_violation = worst;
    rep.bound_ok = worst <= 1e-12 * std::max(1.0, beta * theta);
    rep.p = beta + spec.alpha * theta * K;
    rep.untested_hypotheses = {"smooth kernel minorant hypothesis (existence only)",
                               "approximating-sequence hypothesis (existence only)"};
    return rep;
}

DominationResult check_kernel_domination(const ReactionSpec& spec, const Kernel& kernel, const ModelParams& model,
                                         const Grid& grid) {
    require(kernel.dim() == grid.dim, ErrorCode::grid_mismatch, "kernel and grid dimensions differ");
    const double coef = (1.0 - spec.alpha) * spec.k * spec.beta;
    if (coef > 0.0)
        require(spec.comp_kernel && spec.comp_kernel->dim() == grid.dim, ErrorCode::grid_mismatch,
                "competition kernel missing or of another dimension");
    std::vector<double> radius(grid.size()), slack(grid.size());
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        double r;
        if (grid.dim == 1) {
            r = std::abs(grid.coord(int(idx)));
        } else {
            const int i = int(idx / grid.n), j = int(idx % grid.n);
            r = std::hypot(grid.coord(i), grid.coord(j));
        }
        radius[idx] = r;
        double d = model.kappa * kernel.radial(r);
        if (coef > 0.0) d -= coef * spec.comp_kernel->radial(r);
        slack[idx] = d;
    }
    DominationResult res;
    if (*std::min_element(slack.begin(), slack.end()) < 0.0) return res;
    const double r_near = *std::min_element(radius.begin(), radius.end());
    for (int j = 0; j < 400; ++j) {
        const double rho = grid.L * std::pow(2.0, -0.25 * j);
        if (rho <= r_near) break;
        bool ok = true;
        for (std::size_t idx = 0; idx < grid.size() && ok; ++idx)
            if (radius[idx] < rho && slack[idx] < rho) ok = false;
        if (ok) {
            res.holds = true;
            res.best_rho = rho;
            return res;
        }
    }
    return res;
}

}  // namespace nlfront
