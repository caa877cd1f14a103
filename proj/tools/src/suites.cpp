#include "nlfront_app/suites.hpp"

#include "nlfront/csv.hpp"
#include "nlfront/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

namespace nlfront::app {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Random tube data: a few boxes of random heights on a quiet background.
Field random_tube_field(const Grid& g, double theta, Rng& rng) {
    Field f = zero_field(g);
    const int boxes = 1 + int(rng() % 4);
    for (int b = 0; b < boxes; ++b) {
        const double cx = uniform(rng, -0.5, 0.5) * g.L, cy = uniform(rng, -0.5, 0.5) * g.L;
        const double r = uniform(rng, 0.05, 0.25) * g.L;
        const double hgt = uniform(rng, 0.05, 1.0) * theta;
        for (std::size_t k = 0; k < f.values.size(); ++k) {
            const int i = g.dim == 1 ? int(k) : int(k / std::size_t(g.n));
            const int j = g.dim == 1 ? 0 : int(k % std::size_t(g.n));
            const double x = g.coord(i), y = g.dim == 1 ? 0.0 : g.coord(j);
            if (std::hypot(x - cx, g.dim == 1 ? 0.0 : y - cy) < r) f.values[k] = std::max(f.values[k], hgt);
        }
    }
    for (double& v : f.values) v = std::min(theta, v + uniform(rng, 0.0, 0.02) * theta);
    return f;
}

// Fixed-domain state on an n-point grid with half-width 16.
SimState fixed_state(const ExperimentConfig& c, Field u0) {
    const Kernel kernel = build_kernel(c.kernel, c.grid.dim);
    DomainPolicy pol;
    pol.expand_threshold = 2.0;  // never expands: boundary values stay below 2 theta
    pol.n_cap = u0.grid.n;
    pol.far_field = false;
    return make_state(c.model, build_reaction(c, kernel), kernel, std::move(u0), ICClass::integrable, pol);
}

Grid suite_grid(const ExperimentConfig& c, int n) { return make_grid(c.grid.dim, 16.0, n); }

std::vector<double> check_times(double T) {
    std::vector<double> ts;
    for (double t : {0.25, 0.5, 1.0, 2.0, 3.0, 5.0})
        if (t <= T) ts.push_back(t);
    if (ts.empty() || ts.back() < T) ts.push_back(T);
    return ts;
}

// Evolves `s` through the checked times, calling f at each.
void evolve_through(SimState& s, const std::vector<double>& times, const std::function<void(const SimState&, double)>& f) {
    for (double t : times) {
        const double limit = dt_max(s);
        const double span = t - s.time;
        if (span > 0.0) {
            const long sub = std::max(1L, long(std::ceil(span / limit * (1.0 - 1e-12))));
            for (long q = 0; q < sub; ++q) advance(s, span / double(sub));
            s.time = t;
        }
        f(s, t);
    }
}

CertificationRow row(std::string check, std::string params, double value, double threshold, bool pass) {
    return {std::move(check), std::move(params), value, threshold, pass};
}

std::string kv(const char* k, double v) { return std::string(k) + "=" + format_double(v); }

}  // namespace

double lambert_ratio(double lambda, double t) {
    TailParams p;
    p.lambda = lambda;
    const TailProfile b = nlfront::build_profile(TailFamily::almost_linear, p);
    return predicted_eta(b, 1.0, 1, t) / (t * std::pow(std::log(t), lambda));
}

double convolution_oracle_gap(int dim, int instances, int n_max, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> sizes;
    for (int n = 16; n <= n_max; n *= 2)
        if (dim == 1 || n * n <= (1 << 12)) sizes.push_back(n);
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
        const int n = sizes[std::size_t(k) % sizes.size()];
        const Grid g = make_grid(dim, uniform(rng, 1.0, 50.0), n);
        KernelStencil st{g, {}};
        const std::size_t w = std::size_t(st.width());
        st.values.resize(dim == 1 ? w : w * w);
        for (double& v : st.values) v = uniform(rng);
        Field u = zero_field(g);
        for (double& v : u.values) v = uniform(rng, -1.0, 1.0);
        const Field a = convolve(st, u);
        const Field b = convolve_direct(st, u);
        double num = 0.0, den = 0.0;
        for (std::size_t q = 0; q < a.values.size(); ++q) {
            num = std::max(num, std::abs(a.values[q] - b.values[q]));
            den = std::max(den, std::abs(b.values[q]));
        }
        worst = std::max(worst, den > 0.0 ? num / den : num);
    }
    return worst;
}

TubeReport tube_suite(const ExperimentConfig& c, int runs, double T, int n, std::uint64_t seed) {
    Rng rng(seed);
    const double theta = c.reaction.theta;
    TubeReport rep;
    for (int r = 0; r < runs; ++r) {
        SimState s = fixed_state(c, random_tube_field(suite_grid(c, n), theta, rng));
        evolve_through(s, check_times(T), [&](const SimState& st, double) {
            for (double v : st.field.values) rep.worst_excursion = std::max({rep.worst_excursion, -v, v - theta});
        });
        ++rep.runs;
    }
    return rep;
}

double comparison_suite(const ExperimentConfig& c, int runs, double T, int n, std::uint64_t seed) {
    Rng rng(seed);
    const double theta = c.reaction.theta;
    double worst = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < runs; ++r) {
        const Grid g = suite_grid(c, n);
        Field u0 = random_tube_field(g, theta, rng);
        Field v0 = u0;
        const Field bump = random_tube_field(g, theta, rng);
        for (std::size_t k = 0; k < v0.values.size(); ++k) v0.values[k] = std::min(theta, v0.values[k] + bump.values[k]);
        SimState su = fixed_state(c, u0);
        SimState sv = fixed_state(c, v0);
        std::vector<std::vector<double>> us;
        evolve_through(su, check_times(T), [&](const SimState& st, double) { us.push_back(st.field.values); });
        std::size_t idx = 0;
        evolve_through(sv, check_times(T), [&](const SimState& st, double) {
            const auto& u = us[idx++];
            for (std::size_t k = 0; k < u.size(); ++k) worst = std::max(worst, u[k] - st.field.values[k]);
        });
    }
    return worst;
}

double majorant_suite(const ExperimentConfig& c, int runs, double T, int n, std::uint64_t seed) {
    Rng rng(seed);
    const double theta = c.reaction.theta;
    const Kernel kernel = build_kernel(c.kernel, c.grid.dim);
    double worst = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < runs; ++r) {
        const Field u0 = random_tube_field(suite_grid(c, n), theta, rng);
        SimState s = fixed_state(c, u0);
        evolve_through(s, check_times(std::min(T, 5.0)), [&](const SimState& st, double t) {
            const auto w = solve_linear_series(kernel, u0, t, linear_series_terms(c.model.kappa, t), c.model);
            for (std::size_t k = 0; k < u0.values.size(); ++k)
                worst = std::max(worst, st.field.values[k] - w.w.values[k]);
        });
    }
    return worst;
}

double minorant_suite(const ExperimentConfig& c, int runs, double T, int n, std::uint64_t seed) {
    Rng rng(seed);
    const double theta = c.reaction.theta;
    const Kernel kernel = build_kernel(c.kernel, c.grid.dim);
    const double kappa = c.model.kappa;
    double worst = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < runs; ++r) {
        const Field u0 = random_tube_field(suite_grid(c, n), theta, rng);
        const Field au0 = convolve(make_stencil(kernel, u0.grid, false), u0);
        SimState s = fixed_state(c, u0);
        evolve_through(s, check_times(std::min(T, 5.0)), [&](const SimState& st, double t) {
            const double f = kappa * t * std::exp(-kappa * t);
            for (std::size_t k = 0; k < u0.values.size(); ++k)
                worst = std::max(worst, f * au0.values[k] - st.field.values[k]);
        });
    }
    return worst;
}

LambertReport lambert_suite(int points) {
    LambertReport rep;
    const double lo = std::log(std::exp(-1.0) * (1.0 - 1e-12)), hi = std::log(1e-8);
    for (int i = 0; i < points; ++i) {
        const double nu = -std::exp(lo + (hi - lo) * i / (points - 1));
        const double w = lambert_w_minus1(nu);
        rep.max_residual = std::max(rep.max_residual, std::abs(w * std::exp(w) - nu));
        if (!(w < -1.0)) rep.below_minus_one = false;
        ++rep.points;
    }
    return rep;
}

double hair_trigger_time(const ExperimentConfig& c, double height, double T_max) {
    ExperimentConfig hc = c;
    hc.initial.ic_class = ICClass::integrable;
    hc.initial.height = height;
    hc.initial.radius = 1.0;
    hc.grid.L = 16.0;
    hc.grid.n = c.grid.dim == 1 ? 256 : 64;
    hc.grid.policy.n_cap = c.grid.dim == 1 ? 4096 : 256;
    hc.grid.policy.coarsen = true;
    hc.grid.policy.expand_threshold = 1e-4;
    SimState s = build_state(hc);
    const double theta = c.reaction.theta;
    double hit = -1.0;
    SolveOptions opt;
    opt.snapshot_dt = 0.5;
    opt.levels = {0.5};
    opt.on_snapshot = [&](const SimState& st) {
        const Grid& g = st.field.grid;
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < st.field.values.size(); ++k) {
            const int i = g.dim == 1 ? int(k) : int(k / std::size_t(g.n));
            const int j = g.dim == 1 ? 0 : int(k % std::size_t(g.n));
            const double r = std::hypot(g.coord(i), g.dim == 1 ? 0.0 : g.coord(j));
            if (r <= 1.0) lo = std::min(lo, st.field.values[k]);
        }
        if (lo >= 0.99 * theta) {
            hit = st.time;
            return false;
        }
        return true;
    };
    solve(s, T_max, opt);
    return hit;
}

int growth_fit_trials(int trials, double noise, std::uint64_t seed) {
    constexpr int kTracePoints = 200;
    Rng rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    struct Gen {
        GrowthLaw law;
        std::function<double(double)> f;
        double t0, t1;
    };
    const std::vector<Gen> gens{
        {GrowthLaw::linear, [](double t) { return 10.0 + t; }, 1.0, 30.0},
        {GrowthLaw::exponential, [](double t) { return std::exp(0.5 * t); }, 1.0, 30.0},
        {GrowthLaw::power, [](double t) { return t * t; }, 1.0, 30.0},
        {GrowthLaw::t_log_power, [](double t) { return t * std::pow(std::log(t), 2.0); }, 100.0, 10000.0},
    };
    int correct = 0;
    for (int k = 0; k < trials; ++k) {
        const Gen& g = gens[std::size_t(k) % gens.size()];
        std::vector<double> ts, xs;
        for (int i = 0; i < kTracePoints; ++i) {
            const double t = g.t0 + (g.t1 - g.t0) * i / (kTracePoints - 1.0);
            ts.push_back(t);
            xs.push_back(g.f(t) * (1.0 + noise * z(rng)));
        }
        if (classify_growth(ts, xs).law == g.law) ++correct;
    }
    return correct;
}

namespace {

using SuiteFn = std::function<void(const ExperimentConfig&, std::uint64_t, std::vector<CertificationRow>&)>;

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r{
        {"reaction",
         [](const ExperimentConfig& c, std::uint64_t, std::vector<CertificationRow>& out) {
             const Kernel k = build_kernel(c.kernel, c.grid.dim);
             const ReactionSpec spec = build_reaction(c, k);
             const ReactionReport rep = check_reaction_conditions(spec, uniform_r_grid(spec.theta, 2001));
             out.push_back(row("reaction-conditions", kv("p", rep.p), rep.max_bound_violation, 0.0, rep.all_pass()));
             const Grid g = make_grid(c.grid.dim, 16.0, c.verify.n);
             const DominationResult dom = check_kernel_domination(spec, k, c.model, g);
             out.push_back(row("kernel-domination", kv("alpha", spec.alpha), dom.best_rho, 0.0, dom.holds));
         }},
        {"convolution",
         [](const ExperimentConfig& c, std::uint64_t seed, std::vector<CertificationRow>& out) {
             for (int d : {1, 2}) {
                 const double gap = convolution_oracle_gap(d, 50, c.verify.n, seed + std::uint64_t(d));
                 out.push_back(row("convolution-oracle", "d=" + std::to_string(d) + " instances=50", gap, 1e-10, gap <= 1e-10));
             }
         }},
        {"tube",
         [](const ExperimentConfig& c, std::uint64_t seed, std::vector<CertificationRow>& out) {
             const TubeReport rep = tube_suite(c, c.verify.runs, c.verify.T, c.verify.n, seed + 11);
             out.push_back(row("tube", "runs=" + std::to_string(rep.runs), rep.worst_excursion, 1e-8,
                               rep.worst_excursion <= 1e-8));
         }},
        {"comparison",
         [](const ExperimentConfig& c, std::uint64_t seed, std::vector<CertificationRow>& out) {
             const double w = comparison_suite(c, c.verify.runs, c.verify.T, c.verify.n, seed + 12);
             out.push_back(row("comparison", "runs=" + std::to_string(c.verify.runs), w, 1e-8, w <= 1e-8));
         }},
        {"majorant",
         [](const ExperimentConfig& c, std::uint64_t seed, std::vector<CertificationRow>& out) {
             const double w = majorant_suite(c, c.verify.runs, c.verify.T, c.verify.n, seed + 13);
             out.push_back(row("linear-majorant", "runs=" + std::to_string(c.verify.runs), w, 1e-6, w <= 1e-6));
         }},
        {"minorant",
         [](const ExperimentConfig& c, std::uint64_t seed, std::vector<CertificationRow>& out) {
             const double w = minorant_suite(c, c.verify.runs, c.verify.T, c.verify.n, seed + 14);
             out.push_back(row("linear-minorant", "runs=" + std::to_string(c.verify.runs), w, 1e-6, w <= 1e-6));
         }},
        {"lambert",
         [](const ExperimentConfig&, std::uint64_t, std::vector<CertificationRow>& out) {
             const LambertReport rep = lambert_suite(1000);
             out.push_back(row("lambert-identity", "points=1000", rep.max_residual, 1e-13,
                               rep.max_residual <= 1e-13 && rep.below_minus_one));
             for (double lam : {1.5, 2.0, 3.0}) {
                 const double last = lambert_ratio(lam, 1e7);
                 bool toward_one = true;
                 double prev = lambert_ratio(lam, 1e4);
                 for (double t : {1e5, 1e6, 1e7}) {
                     const double r = lambert_ratio(lam, t);
                     if (std::abs(r - 1.0) >= std::abs(prev - 1.0)) toward_one = false;
                     prev = r;
                 }
                 out.push_back(row("lambert-trend", kv("lambda", lam) + " t=1e4..1e7", last, 1.0, toward_one));
             }
         }},
        {"subsolution",
         [](const ExperimentConfig& c, std::uint64_t, std::vector<CertificationRow>& out) {
             CertifyOptions opt;
             opt.n = 1 << 15;
             for (TailFamily fam : {TailFamily::polynomial, TailFamily::stretched_exp}) {
                 const TailProfile b = nlfront::build_profile(fam, TailParams{});
                 const Kernel k = normalize_kernel(b, 1);
                 for (double eps : {0.1, 0.3}) {
                     SubsolutionSpec spec{LevelSetSpec{LevelShape::radial, b, c.model.beta()}, eps, 1e-3, 1.0, 0.0};
                     const CertificationResult r = certify_subsolution(spec, k, c.model, opt);
                     out.push_back(row("subsolution", std::string(to_string(fam)) + " " + kv("eps", eps) + " " +
                                                          kv("tau0", r.tau0),
                                       r.max_residual / spec.lam, opt.tolerance, r.certified));
                 }
             }
         }},
        {"inclusion",
         [](const ExperimentConfig&, std::uint64_t, std::vector<CertificationRow>& out) {
             for (TailFamily fam : {TailFamily::polynomial, TailFamily::stretched_exp, TailFamily::log_stretched,
                                    TailFamily::almost_linear}) {
                 const TailProfile b = nlfront::build_profile(fam, TailParams{});
                 const InclusionResult r = check_level_inclusion(b, 0.2, 0.76, 50.0);
                 out.push_back(row("level-inclusion", std::string(to_string(fam)) + " eps=0.2 alpha0=0.76 t=50",
                                   r.root_residual, 1e-12, r.holds && r.root_residual <= 1e-12));
             }
         }},
        {"supersolution",
         [](const ExperimentConfig&, std::uint64_t, std::vector<CertificationRow>& out) {
             const TailProfile b = nlfront::build_profile(TailFamily::polynomial, TailParams{});
             const Kernel k = normalize_kernel(b, 1);
             double prev = std::numeric_limits<double>::infinity();
             bool monotone = true;
             double last = 0.0;
             for (double lam : {1e-2, 1e-3, 1e-4}) {
                 last = supersolution_ratio(k, b, lam);
                 if (last > prev + 1e-12) monotone = false;
                 prev = last;
             }
             out.push_back(row("supersolution-ratio", "polynomial alpha=0.9 lam=1e-4", last, 1.05, monotone && last <= 1.05));
         }},
        {"liminf",
         [](const ExperimentConfig&, std::uint64_t, std::vector<CertificationRow>& out) {
             const Grid g = make_grid(1, 512.0, 8192);
             Field f = sample_field(g, [](double x, double) { return std::abs(x) < 1.0 ? 0.35 : 0.0; });
             const TailProfile poly = nlfront::build_profile(TailFamily::polynomial, TailParams{});
             const LiminfResult r = liminf_ratio(poly, f, {50.0, 100.0, 200.0});
             out.push_back(row("liminf-ratio", "polynomial mass=" + format_double(r.mass), r.min_ratio,
                               0.95 * r.mass, r.min_ratio >= 0.95 * r.mass));
         }},
        {"hair-trigger",
         [](const ExperimentConfig& c, std::uint64_t, std::vector<CertificationRow>& out) {
             const double t = hair_trigger_time(c, 1e-3, 50.0);
             out.push_back(row("hair-trigger", "height=1e-3 T=50", t, 50.0, t >= 0.0));
         }},
        {"growth-fit",
         [](const ExperimentConfig&, std::uint64_t seed, std::vector<CertificationRow>& out) {
             const int clean = growth_fit_trials(4, 0.0, seed + 21);
             out.push_back(row("growth-fit-clean", "trials=4", clean, 4, clean == 4));
             const int noisy = growth_fit_trials(100, 0.01, seed + 22);
             out.push_back(row("growth-fit-noisy", "trials=100 noise=0.01", noisy, 95, noisy >= 95));
         }},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, fn] : registry()) v.push_back(name);
        return v;
    }();
    return names;
}

std::vector<CertificationRow> run_suites(const ExperimentConfig& c, const std::vector<std::string>& names,
                                         std::uint64_t seed) {
    require(!names.empty(), ErrorCode::config_invalid, "empty verification suite selection");
    const bool all = std::find(names.begin(), names.end(), "all") != names.end();
    for (const auto& n : names)
        require(n == "all" || std::find(suite_names().begin(), suite_names().end(), n) != suite_names().end(),
                ErrorCode::config_invalid, "unknown verification suite '" + n + "'");
    std::vector<CertificationRow> out;
    for (const auto& [name, fn] : registry())
        if (all || std::find(names.begin(), names.end(), name) != names.end()) fn(c, seed, out);
    return out;
}

}  // namespace nlfront::app
