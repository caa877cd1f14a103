#pragma once

#include "nlfront/front.hpp"
#include "nlfront/grid.hpp"
#include "nlfront/kernel.hpp"
#include "nlfront/model.hpp"
#include "nlfront/reaction.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nlfront {

/// g(x, t) = lam min(1, c(x) e^{beta (1 - eps) t}) and its time average
/// v(x, t) = (1/sigma) int_t^{t+sigma} g(x, s) ds.
struct SubsolutionSpec {
    LevelSetSpec level_spec;
    double eps = 0.3;
    double lam = 1e-3;
    double sigma = 1.0;
    double delta = 0.0;  // 0 selects eps beta / 2
};

void validate(const SubsolutionSpec& spec);
double effective_delta(const SubsolutionSpec& spec);

/// Largest r in [0, theta] with G(r 1) < delta, found by scan plus bisection.
double lambda0(const ReactionSpec& reaction, double delta);

/// log c(x) on the grid (radial: log b(|x|); orthant, d = 1: log of the integral of b(|y|) over y >= x).
std::vector<double> log_level_function(const LevelSetSpec& spec, const Grid& grid);

/// v and g at one time from precomputed log c values.
double subsolution_g(const SubsolutionSpec& spec, double log_c, double t);
double subsolution_v(const SubsolutionSpec& spec, double log_c, double t);

/// max over the inner half of the grid and over `times` of
/// dv/dt - kappa a*v + (m + delta) v, with dv/dt = (g(t + sigma) - g(t)) / sigma.
double subsolution_residual(const SubsolutionSpec& spec, const Kernel& kernel, const ModelParams& model,
                            const Grid& grid, const std::vector<double>& times);

struct CertifyOptions {
    int n = 1 << 16;          // grid points per axis (d = 1); 2D uses min(n, 1024)
    double width_factor = 32;  // half-width L = width_factor * plateau radius
    double scan_start = 1.0;
    double scan_step = 1.0;
    double scan_end = 200.0;
    double window = 10.0;      // certified interval [tau0, tau0 + window]
    double window_step = 1.0;
    double tolerance = 1e-8;   // relative to lam
};

struct CertificationResult {
    double tau0 = 0.0;
    bool tau0_by_tolerance = false;      // false: scan stalled instead of reaching the tolerance
    std::vector<double> scan_times;
    std::vector<double> scan_residuals;
    std::vector<double> times;           // checked times in [tau0, tau0 + window]
    std::vector<double> residuals;
    double max_residual = 0.0;
    bool certified = false;
};

/// Scans for tau0 and checks the residual on [tau0, tau0 + window], each time
/// on its own grid sized to the plateau radius.
CertificationResult certify_subsolution(const SubsolutionSpec& spec, const Kernel& kernel, const ModelParams& model,
                                        const CertifyOptions& options = {});

struct SupersolutionOptions {
    double alpha = 0.9;          // omega = b^alpha
    double width_factor = 8.0;   // L = width_factor * r_lambda
    int n = 1 << 14;             // d = 1; 2D uses min(n, 512)
};

/// max over the inner half of the grid of (a * omega_lam) / omega_lam with
/// omega_lam = min(lam, b^alpha) and r_lambda the radius where b^alpha = lam.
double supersolution_ratio(const Kernel& kernel, const TailProfile& weight_profile, double lam,
                           const SupersolutionOptions& options = {});

struct InclusionResult {
    double alpha1 = 0.0;      // g^{-1}(alpha0)
    double eps0 = 0.0;        // (1 - alpha1) / (alpha1 - 1/2)
    double alpha = 0.0;       // root of f(alpha) = h(eps)
    double root_residual = 0.0;
    std::vector<double> times;             // t, 2t, 4t
    std::vector<double> radius_weighted;   // radius of Lambda(s + eps s / 2, b^alpha)
    std::vector<double> radius_plain;      // radius of Lambda(s + eps s, b)
    bool holds = false;
};

/// f(alpha) = alpha - sqrt(alpha (1 - alpha)).
double inclusion_f(double alpha);
/// g(alpha) = sqrt(alpha) / (sqrt(alpha) + sqrt(1 - alpha)).
double inclusion_g(double alpha);
/// h(eps) = (1 + eps / 2) / (1 + eps).
double inclusion_h(double eps);

/// Radial inclusion check at t, 2t, 4t; no-root when eps >= eps0(alpha0).
InclusionResult check_level_inclusion(const TailProfile& profile, double eps, double alpha0, double t,
                                      double beta = 1.0);

struct LiminfResult {
    std::vector<double> radii;
    std::vector<double> ratios;
    double min_ratio = 0.0;
    double mass = 0.0;  // h^d sum f
};

/// (c * f)(x) / c(x) at x = (r, 0) with c(x) = b(|x|), by direct summation.
LiminfResult liminf_ratio(const TailProfile& c_profile, const Field& f, const std::vector<double>& radii);

struct CertificationRow {
    std::string check;
    std::string parameters;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// CSV rows: check, parameters, value, threshold, pass.
void write_certification_csv(const std::vector<CertificationRow>& rows, std::ostream& os);

}  // namespace nlfront
