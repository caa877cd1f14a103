#include "nlfront/evolve.hpp"

#include "nlfront/csv.hpp"
#include "nlfront/error.hpp"
#include "nlfront/fft.hpp"
#include "nlfront/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace nlfront {

std::string_view to_string(ICClass c) noexcept { return c == ICClass::integrable ? "integrable" : "monotone"; }

ICClass ic_class_from_string(std::string_view name) {
    if (name == "integrable") return ICClass::integrable;
    if (name == "monotone") return ICClass::monotone;
    fail(ErrorCode::config_invalid, "unknown initial-condition class '" + std::string(name) + "'");
}

namespace detail {

// Convolution with a kernel on the domain plus the exterior contribution
// implied by the initial-condition class.
class ExtendedConv {
public:
    // `shape` is the dispersal profile that sets the far field of u.
    ExtendedConv(const Kernel& kernel, const TailProfile& shape, const Grid& grid, ICClass cls, bool far_field)
        : grid_(grid), cls_(cls) {
        if (grid.dim == 1 && cls == ICClass::integrable && !far_field) {
            interior_.emplace(make_stencil(kernel, grid, true));
            right_.assign(std::size_t(grid.n), 0.0);
        } else if (grid.dim == 1) {
            if (cls == ICClass::integrable)
                interior_.emplace(make_stencil(kernel, grid, false));
            else
                build_monotone_1d(kernel);
            build_right_exterior(kernel, shape);
        } else if (cls == ICClass::integrable) {
            interior_.emplace(make_stencil(kernel, grid, true));
        } else {
            build_monotone_2d(kernel);
        }
    }

    void apply(const double* u, double* out) {
        interior_->apply(u, out);
        const int n = grid_.n;
        if (grid_.dim == 1) {
            const double ur = u[n - 1];
            for (int i = 0; i < n; ++i) out[i] += ur * right_[std::size_t(i)];
            if (cls_ == ICClass::integrable) {
                const double ul = u[0];
                for (int i = 0; i < n; ++i) out[i] += ul * right_[std::size_t(n - 1 - i)];
            } else {
                for (int i = 0; i < n; ++i) out[i] += u[0] * tail1d_[std::size_t(i)];
            }
            return;
        }
        if (cls_ == ICClass::integrable) return;
        const int M = 2 * n;
        const std::size_t nc = std::size_t(n + 1);
        double* r = strip_fft_->real();
        std::complex<double>* s = strip_fft_->spectrum();
        // row u(0, .) and column u(., 0)
        std::fill(r, r + M, 0.0);
        for (int j = 0; j < n; ++j) r[j] = u[j];
        strip_fft_->forward();
        row_hat_.assign(s, s + nc);
        std::fill(r, r + M, 0.0);
        for (int i = 0; i < n; ++i) r[i] = u[std::size_t(i) * n];
        strip_fft_->forward();
        col_hat_.assign(s, s + nc);

        for (int i = 0; i < n; ++i) {
            const std::complex<double>* kh = strip_hat_.data() + std::size_t(i) * nc;
            for (std::size_t q = 0; q < nc; ++q) s[q] = row_hat_[q] * kh[q];
            strip_fft_->backward();
            double* row = out + std::size_t(i) * n;
            for (int j = 0; j < n; ++j) row[j] += r[j];
        }
        for (int j = 0; j < n; ++j) {
            const std::complex<double>* kh = strip_hat_.data() + std::size_t(j) * nc;
            for (std::size_t q = 0; q < nc; ++q) s[q] = col_hat_[q] * kh[q];
            strip_fft_->backward();
            for (int i = 0; i < n; ++i) out[std::size_t(i) * n + j] += r[i];
        }
        const double c0 = u[0];
        for (std::size_t k = 0; k < corner_.size(); ++k) out[k] += c0 * corner_[k];
    }

private:
    // right_[i]: mass that cell i receives from x > L when u continues past the
    // last cell as u[n-1] * S(x) / S(x[n-1]). S is b for integrable data and the
    // one-sided tail mass for plateau data. Tabulated on log-spaced distances
    // and interpolated in log-log away from the edge.
    void build_right_exterior(const Kernel& kernel, const TailProfile& shape) {
        const int n = grid_.n;
        const double h = grid_.h, L = grid_.L;
        const double Z = kernel.normalizer();
        const TailProfile& a = kernel.profile();
        const bool plateau = cls_ == ICClass::monotone;
        auto logS = [&](double x) { return plateau ? std::log(shape.tail_moment(x, 0)) : shape.log_value(x); };
        const double logS0 = logS(L - 0.5 * h);
        auto ext = [&](double D) {
            auto f = [&](double z) { return a(D + z) * std::exp(logS(L + z) - logS0) / Z; };
            double total = 0.0, lo = 0.0, w = std::max(D, h);
            for (int k = 0; k < 200; ++k) {
                const double part = integrate(f, lo, lo + w, 1e-10);
                total += part;
                lo += w;
                w *= 2.0;
                if (part <= 1e-16 * total || part == 0.0) break;
            }
            return total;
        };
        right_.assign(std::size_t(n), 0.0);
        constexpr int kExact = 32;
        for (int k = 0; k < std::min(n, kExact); ++k) right_[std::size_t(n - 1 - k)] = ext((k + 0.5) * h);
        if (n <= kExact) return;
        const double d0 = (kExact - 1 + 0.5) * h, d1 = (n - 0.5) * h;
        const int nodes = std::max(2, int(std::ceil(40.0 * std::log10(d1 / d0))) + 1);
        std::vector<double> ld(static_cast<std::size_t>(nodes)), le(static_cast<std::size_t>(nodes));
        for (int k = 0; k < nodes; ++k) {
            const double D = d0 * std::pow(d1 / d0, double(k) / (nodes - 1));
            ld[std::size_t(k)] = std::log(D);
            le[std::size_t(k)] = std::log(std::max(ext(D), 1e-300));
        }
        for (int k = kExact; k < n; ++k) {
            const double x = std::log((k + 0.5) * h);
            const double pos = (x - ld[0]) / (ld[1] - ld[0]);
            const int j = std::clamp(int(pos), 0, nodes - 2);
            const double t = pos - j;
            const double v = std::exp((1.0 - t) * le[std::size_t(j)] + t * le[std::size_t(j + 1)]);
            right_[std::size_t(n - 1 - k)] = v < 1e-290 ? 0.0 : v;
        }
    }

    void build_monotone_1d(const Kernel& kernel) {
        const int n = grid_.n;
        const double h = grid_.h;
        KernelStencil st = make_stencil(kernel, grid_, false);
        tail1d_.assign(std::size_t(n), 0.0);
        tail1d_[std::size_t(n - 1)] = kernel.profile().tail_moment((n - 0.5) * h, 0) / kernel.normalizer();
        for (int i = n - 2; i >= 0; --i) tail1d_[std::size_t(i)] = tail1d_[std::size_t(i + 1)] + st.at(i + 1) * h;
        interior_.emplace(st);
    }

    void build_monotone_2d(const Kernel& kernel) {
        const int n = grid_.n;
        const int W = 2 * n - 1;
        const double h = grid_.h;
        const std::size_t ws = std::size_t(W + 1);
        // symmetric cell-mass table w[a][b] for 0 <= a, b <= W
        std::vector<double> w(ws * ws);
        for (int a = 0; a <= W; ++a)
            for (int b = 0; b <= a; ++b) {
                const double v = cell_mass(kernel, h, a, b);
                w[std::size_t(a) * ws + std::size_t(b)] = v;
                w[std::size_t(b) * ws + std::size_t(a)] = v;
            }
        double total = 0.0;
        for (int a = 0; a <= W; ++a)
            for (int b = 0; b <= W; ++b) total += (a ? 2.0 : 1.0) * (b ? 2.0 : 1.0) * w[std::size_t(a) * ws + std::size_t(b)];
        for (double& v : w) v /= total;
        auto at = [&](int a, int b) { return w[std::size_t(std::abs(a)) * ws + std::size_t(std::abs(b))]; };

        KernelStencil st{grid_, {}};
        const int sw = st.width();
        st.values.resize(std::size_t(sw) * std::size_t(sw));
        const double inv_vol = 1.0 / grid_.cell_volume();
        for (int k1 = -(n - 1); k1 <= n - 1; ++k1)
            for (int k2 = -(n - 1); k2 <= n - 1; ++k2)
                st.values[std::size_t(k1 + n - 1) * sw + std::size_t(k2 + n - 1)] = at(k1, k2) * inv_vol;
        interior_.emplace(st);

        // column suffix sums S[a][b] = sum_{k1 >= a} w(k1, b)
        std::vector<double> S(ws * ws + ws, 0.0);
        for (int a = W; a >= 0; --a)
            for (int b = 0; b <= W; ++b)
                S[std::size_t(a) * ws + std::size_t(b)] = S[std::size_t(a + 1) * ws + std::size_t(b)] + at(a, b);

        const int M = 2 * n;
        const std::size_t nc = std::size_t(n + 1);
        strip_fft_ = std::make_unique<RealFft>(1, M);
        strip_hat_.resize(std::size_t(n) * nc);
        double* r = strip_fft_->real();
        for (int i = 0; i < n; ++i) {
            std::fill(r, r + M, 0.0);
            for (int d = -(n - 1); d <= n - 1; ++d)
                r[d < 0 ? d + M : d] = S[std::size_t(i + 1) * ws + std::size_t(std::abs(d))] / M;
            strip_fft_->forward();
            std::copy(strip_fft_->spectrum(), strip_fft_->spectrum() + nc, strip_hat_.begin() + std::ptrdiff_t(i * nc));
        }

        // corner C(i, j) = sum_{k1 > i, k2 > j} w(k1, k2)
        std::vector<double> CC(ws * ws + ws, 0.0);
        for (int a = W; a >= 1; --a) {
            double rowsum = 0.0;
            for (int b = W; b >= 1; --b) {
                rowsum += at(a, b);
                CC[std::size_t(a) * ws + std::size_t(b)] = CC[std::size_t(a + 1) * ws + std::size_t(b)] + rowsum;
            }
        }
        corner_.resize(grid_.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                corner_[std::size_t(i) * n + j] = CC[std::size_t(i + 1) * ws + std::size_t(j + 1)];
    }

    Grid grid_;
    ICClass cls_;
    std::optional<Convolver> interior_;
    std::vector<double> tail1d_, right_;
    std::unique_ptr<RealFft> strip_fft_;
    std::vector<std::complex<double>> strip_hat_;
    std::vector<std::complex<double>> row_hat_, col_hat_;
    std::vector<double> corner_;
};

class Engine {
public:
    explicit Engine(const SimState& s)
        : grid(s.field.grid), cls(s.ic_class), disp(s.kernel, s.kernel.profile(), s.field.grid, s.ic_class, s.policy.far_field) {
        if (s.reaction.alpha < 1.0)
            comp.emplace(*s.reaction.comp_kernel, s.kernel.profile(), s.field.grid, s.ic_class, s.policy.far_field);
        const std::size_t sz = grid.size();
        conv.resize(sz);
        comp_buf.resize(sz);
        g.resize(sz);
        clamped.resize(sz);
    }

    bool matches(const SimState& s) const { return cls == s.ic_class && same_grid(grid, s.field.grid) && grid.h == s.field.grid.h; }

    void rhs(const SimState& s, const double* u, double* out) {
        const std::size_t sz = grid.size();
        const double theta = s.reaction.theta;
        for (std::size_t k = 0; k < sz; ++k) clamped[k] = std::clamp(u[k], 0.0, theta);
        disp.apply(u, conv.data());
        const double* cp = nullptr;
        if (comp) {
            comp->apply(clamped.data(), comp_buf.data());
            cp = comp_buf.data();
        }
        evaluate_G(s.reaction, clamped.data(), cp, g.data(), sz);
        const double kappa = s.params.kappa, m = s.params.m;
        for (std::size_t k = 0; k < sz; ++k) out[k] = kappa * conv[k] - m * u[k] - u[k] * g[k];
    }

    Grid grid;
    ICClass cls;
    ExtendedConv disp;
    std::optional<ExtendedConv> comp;
    std::vector<double> conv, comp_buf, g, clamped;
    std::vector<double> k1, k2, k3, k4, tmp;
};

}  // namespace detail

SimState::SimState(const SimState& o)
    : params(o.params), reaction(o.reaction), kernel(o.kernel), field(o.field), time(o.time), ic_class(o.ic_class),
      boundary_mass(o.boundary_mass), policy(o.policy), lipschitz_G(o.lipschitz_G), expansions(o.expansions),
      coarsenings(o.coarsenings) {}

SimState& SimState::operator=(const SimState& o) {
    if (this != &o) {
        SimState copy(o);
        *this = std::move(copy);
    }
    return *this;
}

SimState::~SimState() = default;

namespace {

detail::Engine& engine_for(SimState& s) {
    if (!s.engine || !s.engine->matches(s)) s.engine = std::make_shared<detail::Engine>(s);
    return *s.engine;
}

double tube_violation(const std::vector<double>& v, double theta) {
    double worst = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
        worst = std::max({worst, -x, x - theta});
    }
    return worst;
}

// One RK4 step without tube handling.
void rk4(SimState& s, detail::Engine& e, std::vector<double>& u, double dt) {
    const std::size_t sz = u.size();
    e.k1.resize(sz);
    e.k2.resize(sz);
    e.k3.resize(sz);
    e.k4.resize(sz);
    e.tmp.resize(sz);
    e.rhs(s, u.data(), e.k1.data());
    for (std::size_t k = 0; k < sz; ++k) e.tmp[k] = u[k] + 0.5 * dt * e.k1[k];
    e.rhs(s, e.tmp.data(), e.k2.data());
    for (std::size_t k = 0; k < sz; ++k) e.tmp[k] = u[k] + 0.5 * dt * e.k2[k];
    e.rhs(s, e.tmp.data(), e.k3.data());
    for (std::size_t k = 0; k < sz; ++k) e.tmp[k] = u[k] + dt * e.k3[k];
    e.rhs(s, e.tmp.data(), e.k4.data());
    for (std::size_t k = 0; k < sz; ++k) u[k] += dt / 6.0 * (e.k1[k] + 2.0 * e.k2[k] + 2.0 * e.k3[k] + e.k4[k]);
}

constexpr double kClampTolerance = 1e-9;

// Returns false when the step leaves the tube by more than the clamp tolerance.
bool try_step(SimState& s, detail::Engine& e, std::vector<double>& u, double dt) {
    const double theta = s.reaction.theta;
    rk4(s, e, u, dt);
    if (tube_violation(u, theta) > kClampTolerance * theta) return false;
    for (double& x : u) x = std::clamp(x, 0.0, theta);
    return true;
}

// log of the far-field shape used to continue the field past the old edge:
// the kernel profile for integrable data, the one-sided tail mass (1D) or the
// profile at the positive part (2D) for plateau data.
double log_far_field(const SimState& s, double x, double y) {
    const TailProfile& b = s.kernel.profile();
    if (s.ic_class == ICClass::integrable) return b.log_value(s.field.grid.dim == 1 ? std::abs(x) : std::hypot(x, y));
    if (s.field.grid.dim == 1) return std::log(b.tail_moment(std::max(x, 0.0), 0));
    return b.log_value(std::hypot(std::max(x, 0.0), std::max(y, 0.0)));
}

Field reembed(const SimState& s, const Grid& g2, bool coarsen) {
    const Field& f = s.field;
    const Grid& g = f.grid;
    const int n = g.n;
    const bool integrable = s.ic_class == ICClass::integrable;
    Field out = zero_field(g2);
    auto inside = [n](int i) { return i >= 0 && i < n; };
    auto old_value = [&](int i, int j) { return g.dim == 1 ? f.values[std::size_t(i)] : f.at(i, j); };

    // value at new node coordinates (x, y) lying outside the old domain
    auto continue_1d = [&](double x) {
        if (integrable && !s.policy.far_field) return 0.0;
        int q;
        if (integrable)
            q = x < 0.0 ? 0 : n - 1;
        else if (x < 0.0)
            return f.values[0];
        else
            q = n - 1;
        const double xq = g.coord(q);
        return f.values[std::size_t(q)] * std::exp(std::min(0.0, log_far_field(s, x, 0.0) - log_far_field(s, xq, 0.0)));
    };
    auto continue_2d = [&](double x, double y) {
        if (integrable && !s.policy.far_field) return 0.0;
        int qi, qj;
        if (integrable) {
            const double scale = g.coord(n - 1) / std::max(std::abs(x), std::abs(y));
            qi = std::clamp(int(std::floor((scale * x + g.L) / g.h)), 0, n - 1);
            qj = std::clamp(int(std::floor((scale * y + g.L) / g.h)), 0, n - 1);
        } else {
            qi = std::clamp(int(std::floor((x + g.L) / g.h)), 0, n - 1);
            qj = std::clamp(int(std::floor((y + g.L) / g.h)), 0, n - 1);
        }
        const double xq = g.coord(qi), yq = g.coord(qj);
        return f.at(qi, qj) * std::exp(std::min(0.0, log_far_field(s, x, y) - log_far_field(s, xq, yq)));
    };

    const int n2 = g2.n;
    const int shift = n / 2;
    if (g.dim == 1) {
        for (int i = 0; i < n2; ++i) {
            const int o = coarsen ? 2 * i - shift : i - shift;
            double v;
            if (inside(o))
                v = coarsen ? 0.5 * (old_value(o, 0) + old_value(o + 1, 0)) : old_value(o, 0);
            else
                v = continue_1d(g2.coord(i));
            out.values[std::size_t(i)] = v;
        }
        return out;
    }
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) {
            const int oi = coarsen ? 2 * i - shift : i - shift;
            const int oj = coarsen ? 2 * j - shift : j - shift;
            double v;
            if (inside(oi) && inside(oj))
                v = coarsen ? 0.25 * (old_value(oi, oj) + old_value(oi + 1, oj) + old_value(oi, oj + 1) +
                                      old_value(oi + 1, oj + 1))
                            : old_value(oi, oj);
            else
                v = continue_2d(g2.coord(i), g2.coord(j));
            out.at(i, j) = v;
        }
    return out;
}

}  // namespace

SimState make_state(const ModelParams& params, const ReactionSpec& reaction, const Kernel& kernel, Field field,
                    ICClass ic_class, const DomainPolicy& policy) {
    validate(params);
    require(kernel.dim() == field.grid.dim, ErrorCode::grid_mismatch, "kernel and field dimensions differ");
    require(std::abs(reaction.beta - params.beta()) <= 1e-12 * params.beta(), ErrorCode::parameter_out_of_range,
            "reaction beta differs from kappa - m");
    require(policy.expand_threshold > 0.0 && policy.n_cap >= field.grid.n && policy.L_cap >= field.grid.L,
            ErrorCode::parameter_out_of_range, "domain policy caps below the initial grid");
    const double tol = kTubeTolerance * reaction.theta;
    for (double& v : field.values) {
        require(std::isfinite(v) && v >= -tol && v <= reaction.theta + tol, ErrorCode::out_of_tube,
                "initial value outside [0, theta]");
        v = std::clamp(v, 0.0, reaction.theta);
    }
    SimState s;
    s.params = params;
    s.reaction = reaction;
    s.kernel = kernel;
    s.field = std::move(field);
    s.ic_class = ic_class;
    s.policy = policy;
    s.lipschitz_G = check_reaction_conditions(reaction, uniform_r_grid(reaction.theta, 2001)).lipschitz_G;
    s.boundary_mass = measure_boundary_mass(s);
    return s;
}

double dt_max(const SimState& s) {
    return 0.1 / (s.params.kappa + s.params.m + s.params.beta() + s.lipschitz_G * s.reaction.theta);
}

Field right_hand_side(SimState& state, const Field& u) {
    require(same_grid(u.grid, state.field.grid), ErrorCode::grid_mismatch, "field grid differs from the state grid");
    Field out = zero_field(u.grid);
    engine_for(state).rhs(state, u.values.data(), out.values.data());
    return out;
}

double measure_boundary_mass(const SimState& s) {
    const Field& f = s.field;
    const int n = f.grid.n;
    double mx = 0.0;
    if (f.grid.dim == 1) {
        for (int i : {n - 2, n - 1}) mx = std::max(mx, std::abs(f.values[std::size_t(i)]));
        if (s.ic_class == ICClass::integrable)
            for (int i : {0, 1}) mx = std::max(mx, std::abs(f.values[std::size_t(i)]));
        return mx;
    }
    const bool both = s.ic_class == ICClass::integrable;
    for (int a = 0; a < n; ++a)
        for (int layer : {n - 2, n - 1}) {
            mx = std::max({mx, std::abs(f.at(layer, a)), std::abs(f.at(a, layer))});
            if (both) mx = std::max({mx, std::abs(f.at(n - 1 - layer, a)), std::abs(f.at(a, n - 1 - layer))});
        }
    return mx;
}

void advance(SimState& s, double dt) {
    require(dt > 0.0 && std::isfinite(dt), ErrorCode::step_too_large, "time step must be positive");
    const double limit = dt_max(s);
    require(dt <= limit * (1.0 + 1e-12), ErrorCode::step_too_large,
            "dt = " + format_double(dt) + " exceeds dt_max = " + format_double(limit));
    detail::Engine& e = engine_for(s);
    std::vector<double> u = s.field.values;
    if (!try_step(s, e, u, dt)) {
        u = s.field.values;
        const bool ok = try_step(s, e, u, 0.5 * dt) && try_step(s, e, u, 0.5 * dt);
        require(ok, ErrorCode::tube_violation,
                "solution left [0, theta] by more than 1e-9 theta at t = " + format_double(s.time));
    }
    s.field.values = std::move(u);
    s.time += dt;
    s.boundary_mass = measure_boundary_mass(s);
}

SimState step(SimState state, double dt) {
    advance(state, dt);
    return state;
}

bool expand_in_place(SimState& s) {
    bool changed = false;
    for (int guard = 0; guard < 64; ++guard) {
        s.boundary_mass = measure_boundary_mass(s);
        if (s.boundary_mass <= s.policy.expand_threshold * s.reaction.theta) break;
        const Grid& g = s.field.grid;
        const double L2 = 2.0 * g.L;
        require(L2 <= s.policy.L_cap, ErrorCode::max_domain_exceeded,
                "half-width " + format_double(L2) + " would exceed the cap " + format_double(s.policy.L_cap));
        Grid g2;
        bool coarsen = false;
        if (2 * g.n <= s.policy.n_cap) {
            g2 = make_grid(g.dim, L2, 2 * g.n);
        } else {
            require(s.policy.coarsen, ErrorCode::max_domain_exceeded,
                    "grid size " + std::to_string(2 * g.n) + " would exceed the cap " + std::to_string(s.policy.n_cap));
            g2 = make_grid(g.dim, L2, g.n);
            coarsen = true;
        }
        s.field = reembed(s, g2, coarsen);
        if (coarsen)
            ++s.coarsenings;
        else
            ++s.expansions;
        changed = true;
    }
    if (changed) s.engine.reset();
    return changed;
}

SimState expand_domain_if_needed(SimState state) {
    expand_in_place(state);
    return state;
}

FrontMode default_front_mode(const SimState& s) {
    if (s.ic_class == ICClass::integrable) return FrontMode::radial;
    return s.field.grid.dim == 1 ? FrontMode::monotone : FrontMode::diagonal;
}

namespace {

SnapshotInfo snapshot_info(const SimState& s) {
    SnapshotInfo info;
    const auto [lo, hi] = std::minmax_element(s.field.values.begin(), s.field.values.end());
    info.sup = *hi;
    info.inf = *lo;
    double sum = 0.0;
    for (double v : s.field.values) sum += v;
    info.mass = sum * s.field.grid.cell_volume();
    info.boundary_mass = s.boundary_mass;
    info.L = s.field.grid.L;
    info.n = s.field.grid.n;
    info.h = s.field.grid.h;
    return info;
}

}  // namespace

Trajectory solve(SimState& state, double T, const SolveOptions& opt) {
    require(T > 0.0 && T >= state.time, ErrorCode::parameter_out_of_range, "horizon must be positive and not in the past");
    require(opt.snapshot_dt > 0.0, ErrorCode::parameter_out_of_range, "snapshot_dt must be positive");
    Trajectory traj;
    traj.trace.mode = opt.mode.value_or(default_front_mode(state));
    traj.trace.levels = opt.levels;
    const double theta = state.reaction.theta;

    auto record = [&]() {
        std::vector<std::optional<double>> row;
        row.reserve(opt.levels.size());
        for (double lv : opt.levels) row.push_back(level_crossing(state.field, lv * theta, traj.trace.mode));
        traj.trace.times.push_back(state.time);
        traj.trace.positions.push_back(std::move(row));
        traj.info.push_back(snapshot_info(state));
        return !opt.on_snapshot || opt.on_snapshot(state);
    };

    expand_in_place(state);
    if (!record()) return traj;
    const double t0 = state.time;
    for (long k = 1;; ++k) {
        const double t_next = std::min(T, t0 + double(k) * opt.snapshot_dt);
        if (t_next <= state.time) break;
        const double limit = dt_max(state);
        const double dt = opt.dt > 0.0 ? opt.dt : limit;
        require(dt <= limit * (1.0 + 1e-12), ErrorCode::step_too_large, "requested dt exceeds dt_max");
        const double span = t_next - state.time;
        const long sub = std::max(1L, long(std::ceil(span / dt * (1.0 - 1e-12))));
        const double h = span / double(sub);
        for (long q = 0; q < sub; ++q) {
            advance(state, h);
            expand_in_place(state);
        }
        state.time = t_next;
        if (!record() || t_next >= T) break;
    }
    return traj;
}

int linear_series_terms(double kappa, double t) { return int(std::ceil(kappa * t * std::exp(1.0))) + 20; }

LinearSeriesResult solve_linear_series(const Kernel& kernel, const Field& u0, double t, int n_terms,
                                       const ModelParams& params, double tolerance) {
    validate(params);
    require(t >= 0.0 && std::isfinite(t), ErrorCode::parameter_out_of_range, "t must be nonnegative");
    require(n_terms >= linear_series_terms(params.kappa, t), ErrorCode::parameter_out_of_range,
            "n_terms must be at least kappa t e + 20");
    const double kt = params.kappa * t;
    double sup = 0.0;
    for (double v : u0.values) sup = std::max(sup, std::abs(v));
    // sum_{n > N} (kt)^n / n! in log space
    double tail = 0.0;
    if (kt > 0.0) {
        for (int q = n_terms + 1; q < n_terms + 10000; ++q) {
            const double term = std::exp(q * std::log(kt) - std::lgamma(q + 1.0));
            tail += term;
            if (term <= 1e-17 * tail || term == 0.0) break;
        }
    }
    LinearSeriesResult res;
    res.terms = n_terms;
    res.truncation_bound = std::exp(-params.m * t) * sup * tail;
    require(res.truncation_bound <= tolerance, ErrorCode::truncation_bound_exceeded,
            "truncation bound " + format_double(res.truncation_bound) + " above tolerance");

    Field w = u0;
    if (kt > 0.0) {
        Convolver conv(make_stencil(kernel, u0.grid, true));
        std::vector<double> cur = u0.values, next(cur.size());
        for (int q = 1; q <= n_terms; ++q) {
            conv.apply(cur.data(), next.data());
            const double f = kt / q;
            for (std::size_t k = 0; k < cur.size(); ++k) {
                cur[k] = next[k] * f;
                w.values[k] += cur[k];
            }
        }
    }
    const double decay = std::exp(-params.m * t);
    for (double& v : w.values) v *= decay;
    res.w = std::move(w);
    return res;
}

void write_trajectory_csv(const Trajectory& traj, double theta,
                          const std::function<std::optional<double>(double)>& predicted, std::ostream& os) {
    CsvWriter csv(os);
    csv.header({"t", "level", "position", "predicted_eta", "boundary_mass"});
    for (std::size_t a = 0; a < traj.trace.times.size(); ++a) {
        const double t = traj.trace.times[a];
        const std::optional<double> eta = predicted ? predicted(t) : std::nullopt;
        for (std::size_t l = 0; l < traj.trace.levels.size(); ++l) {
            csv.cell(t).cell(traj.trace.levels[l] * theta).cell(traj.trace.positions[a][l]).cell(eta);
            csv.cell(traj.info[a].boundary_mass);
            csv.end_row();
        }
    }
}

}  // namespace nlfront
