#include "nlfront/theory.hpp"

#include "nlfront/csv.hpp"
#include "nlfront/error.hpp"
#include "nlfront/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace nlfront {

void validate(const SubsolutionSpec& s) {
    require(s.eps > 0.0 && s.eps < 1.0, ErrorCode::parameter_out_of_range, "eps must lie in (0, 1)");
    require(s.lam >= 0.0 && std::isfinite(s.lam), ErrorCode::parameter_out_of_range, "lam must be nonnegative");
    require(s.sigma > 0.0, ErrorCode::parameter_out_of_range, "sigma must be positive");
    const double eb = s.eps * s.level_spec.beta;
    require(s.delta == 0.0 || (s.delta > 0.0 && s.delta < eb), ErrorCode::parameter_out_of_range,
            "delta must lie in (0, eps beta)");
}

double effective_delta(const SubsolutionSpec& s) { return s.delta > 0.0 ? s.delta : 0.5 * s.eps * s.level_spec.beta; }

double lambda0(const ReactionSpec& reaction, double delta) {
    require(delta > 0.0, ErrorCode::parameter_out_of_range, "delta must be positive");
    const int count = 10000;
    const double theta = reaction.theta;
    double prev = 0.0;
    for (int i = 1; i <= count; ++i) {
        const double r = theta * i / count;
        if (reaction.G_constant(r) >= delta) {
            return bisect_root([&](double x) { return reaction.G_constant(x) - delta; }, prev, r, 1e-12);
        }
        prev = r;
    }
    return theta;
}

std::vector<double> log_level_function(const LevelSetSpec& spec, const Grid& grid) {
    const TailProfile& b = spec.profile;
    std::vector<double> out(grid.size());
    if (spec.shape == LevelShape::radial) {
        if (grid.dim == 1) {
            for (int i = 0; i < grid.n; ++i) out[std::size_t(i)] = b.log_value(std::abs(grid.coord(i)));
        } else {
            for (int i = 0; i < grid.n; ++i)
                for (int j = 0; j < grid.n; ++j)
                    out[std::size_t(i) * grid.n + j] = b.log_value(std::hypot(grid.coord(i), grid.coord(j)));
        }
        return out;
    }
    require(grid.dim == 1, ErrorCode::invalid_size, "orthant level functions are evaluated in d = 1");
    // c(x) = int_x^inf b(|y|) dy accumulated from the right end
    const int n = grid.n;
    double c = b.tail_moment(std::max(grid.coord(n - 1), 0.0), 0);
    if (grid.coord(n - 1) < 0.0) c += b.moment(0.0, -grid.coord(n - 1), 0);
    std::vector<double> cv(static_cast<std::size_t>(n));
    cv[std::size_t(n - 1)] = c;
    for (int i = n - 2; i >= 0; --i) {
        const double a = grid.coord(i), e = grid.coord(i + 1);
        double piece;
        if (a >= 0.0)
            piece = b.moment(a, e, 0);
        else if (e <= 0.0)
            piece = b.moment(-e, -a, 0);
        else
            piece = b.moment(0.0, -a, 0) + b.moment(0.0, e, 0);
        c += piece;
        cv[std::size_t(i)] = c;
    }
    for (int i = 0; i < n; ++i) out[std::size_t(i)] = std::log(cv[std::size_t(i)]);
    return out;
}

double subsolution_g(const SubsolutionSpec& s, double log_c, double t) {
    const double k = s.level_spec.beta * (1.0 - s.eps);
    const double e = log_c + k * t;
    return e >= 0.0 ? s.lam : s.lam * std::exp(e);
}

double subsolution_v(const SubsolutionSpec& s, double log_c, double t) {
    const double k = s.level_spec.beta * (1.0 - s.eps);
    const double sig = s.sigma;
    const double star = -log_c / k;  // time at which c e^{k s} reaches 1
    double I;
    if (star <= t) {
        I = sig;
    } else if (star >= t + sig) {
        I = std::exp(log_c + k * t) * std::expm1(k * sig) / k;
    } else {
        I = -std::expm1(log_c + k * t) / k + (t + sig - star);
    }
    return s.lam * I / sig;
}

namespace {

// Residual at one time on one grid, maximized over the inner half.
double residual_at(const SubsolutionSpec& s, const std::vector<double>& logc, Convolver& conv,
                   const std::vector<double>& exterior, const ModelParams& model, const Grid& grid, double t) {
    const std::size_t sz = grid.size();
    std::vector<double> v(sz), av(sz);
    for (std::size_t q = 0; q < sz; ++q) v[q] = subsolution_v(s, logc[q], t);
    conv.apply(v.data(), av.data());
    const double delta = effective_delta(s);
    const double half = 0.5 * grid.L;
    double worst = -std::numeric_limits<double>::infinity();
    auto eval = [&](std::size_t q) {
        const double dv = (subsolution_g(s, logc[q], t + s.sigma) - subsolution_g(s, logc[q], t)) / s.sigma;
        const double a = av[q] + (exterior.empty() ? 0.0 : s.lam * exterior[q]);
        worst = std::max(worst, dv - model.kappa * a + (model.m + delta) * v[q]);
    };
    if (grid.dim == 1) {
        for (int i = 0; i < grid.n; ++i)
            if (std::abs(grid.coord(i)) <= half) eval(std::size_t(i));
    } else {
        for (int i = 0; i < grid.n; ++i)
            for (int j = 0; j < grid.n; ++j)
                if (std::hypot(grid.coord(i), grid.coord(j)) <= half) eval(std::size_t(i) * grid.n + j);
    }
    return worst;
}

// Mass of a to the left of the domain seen from each node (orthant plateau continues there).
std::vector<double> left_exterior(const Kernel& kernel, const KernelStencil& st) {
    const Grid& g = st.grid;
    const int n = g.n;
    std::vector<double> ext(static_cast<std::size_t>(n));
    // node i sees the exterior at distances beyond (i + 1/2) h
    double acc = kernel.profile().tail_moment((n - 0.5) * g.h, 0) / kernel.normalizer();
    ext[std::size_t(n - 1)] = acc;
    for (int i = n - 2; i >= 0; --i) {
        acc += st.at(i + 1) * g.h;
        ext[std::size_t(i)] = acc;
    }
    return ext;
}

struct TimeGrid {
    Grid grid;
    std::vector<double> logc;
    std::vector<double> exterior;
};

TimeGrid grid_for_time(const SubsolutionSpec& s, const Kernel& kernel, const CertifyOptions& opt, double t,
                       KernelStencil& stencil_out) {
    const double k = s.level_spec.beta * (1.0 - s.eps);
    LevelSetSpec plateau = s.level_spec;
    plateau.beta = k;
    double eta = 1.0;
    try {
        eta = std::max(eta, lambda_radius(plateau, t + s.sigma));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::level_above_range) throw;
    }
    eta = std::max(eta, s.level_spec.profile.rho());
    const int dim = kernel.dim();
    const int n = dim == 1 ? opt.n : std::min(opt.n, 1024);
    TimeGrid tg{make_grid(dim, opt.width_factor * eta, n), {}, {}};
    tg.logc = log_level_function(s.level_spec, tg.grid);
    stencil_out = make_stencil(kernel, tg.grid, false);
    if (s.level_spec.shape == LevelShape::orthant) tg.exterior = left_exterior(kernel, stencil_out);
    return tg;
}

}  // namespace

double subsolution_residual(const SubsolutionSpec& s, const Kernel& kernel, const ModelParams& model,
                            const Grid& grid, const std::vector<double>& times) {
    validate(s);
    validate(model);
    require(kernel.dim() == grid.dim, ErrorCode::grid_mismatch, "kernel and grid dimensions differ");
    if (s.lam == 0.0) return 0.0;
    KernelStencil st = make_stencil(kernel, grid, false);
    Convolver conv(st);
    const std::vector<double> logc = log_level_function(s.level_spec, grid);
    std::vector<double> ext;
    if (s.level_spec.shape == LevelShape::orthant) ext = left_exterior(kernel, st);
    double worst = -std::numeric_limits<double>::infinity();
    for (double t : times) worst = std::max(worst, residual_at(s, logc, conv, ext, model, grid, t));
    return worst;
}

CertificationResult certify_subsolution(const SubsolutionSpec& s, const Kernel& kernel, const ModelParams& model,
                                        const CertifyOptions& opt) {
    validate(s);
    validate(model);
    require(opt.scan_step > 0.0 && opt.window_step > 0.0 && opt.scan_end >= opt.scan_start,
            ErrorCode::parameter_out_of_range, "invalid scan settings");
    CertificationResult res;
    const double tol = opt.tolerance * s.lam;
    auto residual = [&](double t) {
        if (s.lam == 0.0) return 0.0;
        KernelStencil st;
        TimeGrid tg = grid_for_time(s, kernel, opt, t, st);
        Convolver conv(st);
        return residual_at(s, tg.logc, conv, tg.exterior, model, tg.grid, t);
    };

    bool found = false;
    bool decreased = false;
    for (double t = opt.scan_start; t <= opt.scan_end + 1e-12; t += opt.scan_step) {
        const double r = residual(t);
        res.scan_times.push_back(t);
        res.scan_residuals.push_back(r);
        if (r <= tol) {
            res.tau0 = t;
            res.tau0_by_tolerance = true;
            found = true;
            break;
        }
        if (res.scan_residuals.size() >= 2) {
            const double prev = res.scan_residuals[res.scan_residuals.size() - 2];
            if (r < prev * 0.99)
                decreased = true;
            else if (decreased) {
                res.tau0 = t;
                found = true;
                break;
            }
        }
    }
    if (!found) res.tau0 = res.scan_times.back();

    res.max_residual = -std::numeric_limits<double>::infinity();
    for (double t = res.tau0; t <= res.tau0 + opt.window + 1e-12; t += opt.window_step) {
        const double r = residual(t);
        res.times.push_back(t);
        res.residuals.push_back(r);
        res.max_residual = std::max(res.max_residual, r);
    }
    res.certified = res.max_residual <= tol;
    return res;
}

double supersolution_ratio(const Kernel& kernel, const TailProfile& wp, double lam, const SupersolutionOptions& opt) {
    require(lam > 0.0, ErrorCode::parameter_out_of_range, "lam must be positive");
    require(opt.alpha > 0.0 && opt.alpha <= 1.0, ErrorCode::parameter_out_of_range, "alpha must lie in (0, 1]");
    const double a = opt.alpha;
    double r_lam = 1.0;
    if (std::log(lam) / a < wp.log_value(wp.rho()))
        r_lam = std::max(r_lam, lambda_radius(LevelSetSpec{LevelShape::radial, wp, 1.0}, -std::log(lam) / a));
    const int dim = kernel.dim();
    const int n = dim == 1 ? opt.n : std::min(opt.n, 512);
    const Grid grid = make_grid(dim, opt.width_factor * r_lam, n);
    auto omega = [&](double r) { return std::min(lam, std::exp(a * wp.log_value(r))); };
    const Field w = sample_field(grid, [&](double x, double y) { return omega(std::hypot(x, y)); });
    const KernelStencil st = make_stencil(kernel, grid, true);
    const double half = 0.5 * grid.L;
    double worst = 0.0;
    if (dim == 1) {
        // direct sums keep the relative accuracy where omega is tiny
        for (int i = 0; i < n; ++i) {
            if (std::abs(grid.coord(i)) > half) continue;
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += st.at(i - j) * w.values[std::size_t(j)];
            worst = std::max(worst, acc * grid.h / w.values[std::size_t(i)]);
        }
        return worst;
    }
    const Field aw = convolve(st, w);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::hypot(grid.coord(i), grid.coord(j)) <= half) worst = std::max(worst, aw.at(i, j) / w.at(i, j));
    return worst;
}

double inclusion_f(double alpha) { return alpha - std::sqrt(alpha * (1.0 - alpha)); }

double inclusion_g(double alpha) {
    const double sa = std::sqrt(alpha);
    return sa / (sa + std::sqrt(1.0 - alpha));
}

double inclusion_h(double eps) { return (1.0 + 0.5 * eps) / (1.0 + eps); }

InclusionResult check_level_inclusion(const TailProfile& profile, double eps, double alpha0, double t, double beta) {
    require(alpha0 > 0.75 && alpha0 < 1.0, ErrorCode::parameter_out_of_range, "alpha0 must lie in (3/4, 1)");
    require(eps > 0.0 && eps < 1.0, ErrorCode::parameter_out_of_range, "eps must lie in (0, 1)");
    require(t > 0.0 && beta > 0.0, ErrorCode::parameter_out_of_range, "t and beta must be positive");
    InclusionResult res;
    res.alpha1 = bisect_root([&](double x) { return inclusion_g(x) - alpha0; }, 0.5, 1.0, 1e-15);
    res.eps0 = (1.0 - res.alpha1) / (res.alpha1 - 0.5);
    require(eps < res.eps0, ErrorCode::no_root,
            "eps = " + format_double(eps) + " is not below eps0 = " + format_double(res.eps0));
    const double target = inclusion_h(eps);
    res.alpha = bisect_root([&](double x) { return inclusion_f(x) - target; }, res.alpha1, 1.0, 1e-16);
    res.root_residual = std::abs(inclusion_f(res.alpha) - target);
    const LevelSetSpec spec{LevelShape::radial, profile, beta};
    res.holds = true;
    for (double s : {t, 2.0 * t, 4.0 * t}) {
        // {b^alpha >= e^{-beta u}} = {b >= e^{-beta u / alpha}}
        const double rw = lambda_radius(spec, (s + 0.5 * eps * s) / res.alpha);
        const double rp = lambda_radius(spec, s + eps * s);
        res.times.push_back(s);
        res.radius_weighted.push_back(rw);
        res.radius_plain.push_back(rp);
        res.holds = res.holds && rw <= rp;
    }
    return res;
}

LiminfResult liminf_ratio(const TailProfile& c, const Field& f, const std::vector<double>& radii) {
    const Grid& g = f.grid;
    LiminfResult res;
    double mass = 0.0;
    for (double v : f.values) mass += v;
    res.mass = mass * g.cell_volume();
    res.min_ratio = std::numeric_limits<double>::infinity();
    for (double r : radii) {
        const double lc = c.log_value(r);
        double acc = 0.0;
        if (g.dim == 1) {
            for (int j = 0; j < g.n; ++j) {
                const double fv = f.values[std::size_t(j)];
                if (fv != 0.0) acc += fv * std::exp(c.log_value(std::abs(r - g.coord(j))) - lc);
            }
        } else {
            for (int i = 0; i < g.n; ++i)
                for (int j = 0; j < g.n; ++j) {
                    const double fv = f.at(i, j);
                    if (fv != 0.0) acc += fv * std::exp(c.log_value(std::hypot(r - g.coord(i), g.coord(j))) - lc);
                }
        }
        const double ratio = acc * g.cell_volume();
        res.radii.push_back(r);
        res.ratios.push_back(ratio);
        res.min_ratio = std::min(res.min_ratio, ratio);
    }
    return res;
}

void write_certification_csv(const std::vector<CertificationRow>& rows, std::ostream& os) {
    CsvWriter csv(os);
    csv.header({"check", "parameters", "value", "threshold", "pass"});
    for (const auto& r : rows) {
        csv.cell(r.check).cell(r.parameters).cell(r.value).cell(r.threshold).cell(r.pass);
        csv.end_row();
    }
}

}  // namespace nlfront
