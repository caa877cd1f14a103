#include "nlfront/grid.hpp"

#include "nlfront/csv.hpp"
#include "nlfront/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <ostream>

namespace nlfront {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

constexpr std::array<double, 5> kGl5x = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                         0.9061798459386640};
constexpr std::array<double, 5> kGl5w = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                         0.4786286704993665, 0.2369268850561891};
constexpr std::array<double, 3> kGl3x = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGl3w = {0.5555555555555556, 0.8888888888888888, 0.5555555555555556};

// Integral of b over [a, b] (1D), cheap Gauss rule when log b varies little.
double radial_segment(const TailProfile& p, double a, double b) {
    if (a >= p.rho() && std::abs(p.log_value(b) - p.log_value(a)) < 0.25) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (std::size_t q = 0; q < kGl5x.size(); ++q) acc += kGl5w[q] * p(mid + half * kGl5x[q]);
        return acc * half;
    }
    return p.moment(a, b, 0);
}

double square_integral(const TailProfile& p, double x0, double x1, double y0, double y1, int depth) {
    const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
    const double hx = 0.5 * (x1 - x0), hy = 0.5 * (y1 - y0);
    // nearest and farthest radius of the box
    const double nx = (x0 <= 0.0 && x1 >= 0.0) ? 0.0 : std::min(std::abs(x0), std::abs(x1));
    const double ny = (y0 <= 0.0 && y1 >= 0.0) ? 0.0 : std::min(std::abs(y0), std::abs(y1));
    const double fx = std::max(std::abs(x0), std::abs(x1));
    const double fy = std::max(std::abs(y0), std::abs(y1));
    const double rmin = std::hypot(nx, ny), rmax = std::hypot(fx, fy);
    const bool smooth = (rmin >= p.rho() || rmax <= p.rho()) &&
                        std::abs(p.log_value(rmax) - p.log_value(rmin)) < 0.2;
    if (smooth || depth >= 7) {
        double acc = 0.0;
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
                acc += kGl3w[a] * kGl3w[b] * p(std::hypot(xm + hx * kGl3x[a], ym + hy * kGl3x[b]));
        return acc * hx * hy;
    }
    return square_integral(p, x0, xm, y0, ym, depth + 1) + square_integral(p, xm, x1, y0, ym, depth + 1) +
           square_integral(p, x0, xm, ym, y1, depth + 1) + square_integral(p, xm, x1, ym, y1, depth + 1);
}

}  // namespace

Grid make_grid(int dim, double L, int n) {
    require(dim == 1 || dim == 2, ErrorCode::invalid_size, "dimension must be 1 or 2");
    require(is_pow2(n) && n >= 16, ErrorCode::invalid_size,
            "n must be a power of two >= 16, got " + std::to_string(n));
    require(L > 0.0 && std::isfinite(L), ErrorCode::invalid_size, "L must be positive and finite");
    require(dim == 1 ? n <= (1 << 26) : n <= (1 << 14), ErrorCode::invalid_size, "grid too large");
    return Grid{dim, n, L, 2.0 * L / n};
}

bool same_grid(const Grid& a, const Grid& b) {
    return a.dim == b.dim && a.n == b.n && std::abs(a.L - b.L) <= 1e-12 * std::max(a.L, b.L);
}

Field zero_field(const Grid& grid) { return Field{grid, std::vector<double>(grid.size(), 0.0)}; }

Field sample_field(const Grid& grid, const Generator& generator) {
    Field f = zero_field(grid);
    if (grid.dim == 1) {
        for (int i = 0; i < grid.n; ++i) f.values[i] = generator(grid.coord(i), 0.0);
    } else {
        for (int i = 0; i < grid.n; ++i)
            for (int j = 0; j < grid.n; ++j) f.at(i, j) = generator(grid.coord(i), grid.coord(j));
    }
    return f;
}

Field sample_orthant_integral(const Grid& grid, const Generator& density) {
    const int n = grid.n;
    const double h = grid.h;
    Field q = sample_field(grid, density);
    // cumulative trapezoid from the far end of one line; the half cell to +L
    // uses the edge value of the density.
    auto cumulate = [&](auto&& get, auto&& set, double edge_value) {
        double acc = 0.25 * h * (get(n - 1) + edge_value);
        double prev = get(n - 1);
        set(n - 1, acc);
        for (int i = n - 2; i >= 0; --i) {
            const double cur = get(i);
            acc += 0.5 * h * (cur + prev);
            prev = cur;
            set(i, acc);
        }
    };
    if (grid.dim == 1) {
        const double edge = density(grid.L, 0.0);
        std::vector<double> src = q.values;
        cumulate([&](int i) { return src[i]; }, [&](int i, double v) { q.values[i] = v; }, edge);
        return q;
    }
    Field rows = q;
    for (int i = 0; i < n; ++i) {
        std::vector<double> src(q.values.begin() + std::ptrdiff_t(i) * n, q.values.begin() + std::ptrdiff_t(i + 1) * n);
        const double edge = density(grid.coord(i), grid.L);
        cumulate([&](int j) { return src[j]; }, [&](int j, double v) { rows.at(i, j) = v; }, edge);
    }
    Field out = rows;
    for (int j = 0; j < n; ++j) {
        std::vector<double> src(n);
        for (int i = 0; i < n; ++i) src[i] = rows.at(i, j);
        cumulate([&](int i) { return src[i]; }, [&](int i, double v) { out.at(i, j) = v; }, 0.0);
    }
    return out;
}

double KernelStencil::mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.cell_volume();
}

double cell_mass(const Kernel& kernel, double h, long k) {
    const TailProfile& p = kernel.profile();
    const long a = std::labs(k);
    if (a == 0) return 2.0 * p.moment(0.0, 0.5 * h, 0) / kernel.normalizer();
    return radial_segment(p, (a - 0.5) * h, (a + 0.5) * h) / kernel.normalizer();
}

double cell_mass(const Kernel& kernel, double h, long k1, long k2) {
    const double x0 = (std::labs(k1) - 0.5) * h, y0 = (std::labs(k2) - 0.5) * h;
    return square_integral(kernel.profile(), x0, x0 + h, y0, y0 + h, 0) / kernel.normalizer();
}

KernelStencil make_stencil(const Kernel& kernel, const Grid& grid, bool renormalize) {
    require(kernel.dim() == grid.dim, ErrorCode::grid_mismatch, "kernel and grid dimensions differ");
    const int n = grid.n;
    KernelStencil st{grid, {}};
    const int w = st.width();
    if (grid.dim == 1) {
        st.values.assign(std::size_t(w), 0.0);
        for (int k = 0; k <= n - 1; ++k) {
            const double v = cell_mass(kernel, grid.h, k) / grid.h;
            st.values[std::size_t(n - 1 + k)] = v;
            st.values[std::size_t(n - 1 - k)] = v;
        }
    } else {
        st.values.assign(std::size_t(w) * std::size_t(w), 0.0);
        const double vol = grid.cell_volume();
        for (int k1 = 0; k1 <= n - 1; ++k1)
            for (int k2 = 0; k2 <= k1; ++k2) {
                const double v = cell_mass(kernel, grid.h, k1, k2) / vol;
                for (int s1 : {-1, 1})
                    for (int s2 : {-1, 1}) {
                        const std::size_t a = std::size_t(n - 1 + s1 * k1), b = std::size_t(n - 1 + s2 * k2);
                        st.values[a * w + b] = v;
                        st.values[b * w + a] = v;
                    }
            }
    }
    if (renormalize) {
        const double m = st.mass();
        for (double& v : st.values) v /= m;
    }
    return st;
}

KernelStencil sample_stencil(const Grid& grid, const Generator& density) {
    const int n = grid.n;
    KernelStencil st{grid, {}};
    const int w = st.width();
    if (grid.dim == 1) {
        st.values.resize(std::size_t(w));
        for (int k = -(n - 1); k <= n - 1; ++k) st.values[std::size_t(k + n - 1)] = density(k * grid.h, 0.0);
    } else {
        st.values.resize(std::size_t(w) * std::size_t(w));
        for (int k1 = -(n - 1); k1 <= n - 1; ++k1)
            for (int k2 = -(n - 1); k2 <= n - 1; ++k2)
                st.values[std::size_t(k1 + n - 1) * w + std::size_t(k2 + n - 1)] = density(k1 * grid.h, k2 * grid.h);
    }
    return st;
}

KernelStencil delta_stencil(const Grid& grid) {
    const int n = grid.n;
    KernelStencil st{grid, {}};
    const int w = st.width();
    st.values.assign(grid.dim == 1 ? std::size_t(w) : std::size_t(w) * std::size_t(w), 0.0);
    if (grid.dim == 1)
        st.values[std::size_t(n - 1)] = 1.0 / grid.h;
    else
        st.values[std::size_t(n - 1) * w + std::size_t(n - 1)] = 1.0 / grid.cell_volume();
    return st;
}

void write_field_csv(const Field& field, std::ostream& os) {
    CsvWriter csv(os);
    const Grid& g = field.grid;
    if (g.dim == 1) {
        csv.header({"x", "value"});
        for (int i = 0; i < g.n; ++i) {
            csv.cell(g.coord(i)).cell(field.values[i]);
            csv.end_row();
        }
    } else {
        csv.header({"x", "y", "value"});
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                csv.cell(g.coord(i)).cell(g.coord(j)).cell(field.at(i, j));
                csv.end_row();
            }
    }
}

void write_field_csv(const Field& field, const std::string& path) {
    std::ofstream os(path);
    require(bool(os), ErrorCode::config_invalid, "cannot open " + path + " for writing");
    write_field_csv(field, os);
}

}  // namespace nlfront
