#pragma once

#include "nlfront/fft.hpp"
#include "nlfront/kernel.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace nlfront {

/// Uniform cell-centred grid on [-L, L]^dim with n points per axis; node i
/// sits at -L + (i + 1/2) h, so the grid is symmetric about the origin.
struct Grid {
    int dim = 1;
    int n = 16;
    double L = 1.0;
    double h = 0.125;

    std::size_t size() const noexcept { return dim == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n); }
    double coord(int i) const noexcept { return -L + (i + 0.5) * h; }
    double cell_volume() const noexcept { return dim == 1 ? h : h * h; }
};

Grid make_grid(int dim, double L, int n);
bool same_grid(const Grid& a, const Grid& b);

/// Grid function; 2D values are row-major with index i * n + j for (x_i, y_j).
struct Field {
    Grid grid;
    std::vector<double> values;

    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }
    double& at(int i, int j) { return values[std::size_t(i) * grid.n + j]; }
    double at(int i, int j) const { return values[std::size_t(i) * grid.n + j]; }
};

Field zero_field(const Grid& grid);

/// Point generator; y is ignored in one dimension.
using Generator = std::function<double(double x, double y)>;

Field sample_field(const Grid& grid, const Generator& generator);

/// u(x) = integral of density over the upper orthant {y >= x}, accumulated by
/// trapezoid sums from the far corner of the domain.
Field sample_orthant_integral(const Grid& grid, const Generator& density);

/// Kernel values on the offset lattice k h, k in [-(n-1), n-1]^dim, stored as
/// densities (weights / h^dim). Index of offset k is k + n - 1 per axis.
struct KernelStencil {
    Grid grid;
    std::vector<double> values;

    int width() const noexcept { return 2 * grid.n - 1; }
    double at(int k) const { return values[std::size_t(k + grid.n - 1)]; }
    double at(int k1, int k2) const {
        return values[std::size_t(k1 + grid.n - 1) * std::size_t(width()) + std::size_t(k2 + grid.n - 1)];
    }
    /// h^dim * sum of values.
    double mass() const;
};

/// Cell mass of the kernel over the cell of offset k (1D).
double cell_mass(const Kernel& kernel, double h, long k);
/// Cell mass of the kernel over the square cell of offset (k1, k2) (2D).
double cell_mass(const Kernel& kernel, double h, long k1, long k2);

/// Stencil of cell-averaged kernel densities. With `renormalize` the discrete
/// mass of the stencil is rescaled to exactly 1.
KernelStencil make_stencil(const Kernel& kernel, const Grid& grid, bool renormalize = true);

/// Stencil sampled pointwise from a density generator at offsets k h.
KernelStencil sample_stencil(const Grid& grid, const Generator& density);

/// All mass at offset 0.
KernelStencil delta_stencil(const Grid& grid);

/// Zero-padded linear convolution h^d * sum_j k(x_i - x_j) u(x_j), via FFT.
Field convolve(const KernelStencil& kernel_field, const Field& field);

/// Same sum evaluated directly; guarded to n^dim <= 2^14.
Field convolve_direct(const KernelStencil& kernel_field, const Field& field);

/// Reusable transform engine for repeated convolutions with one stencil.
/// Not thread-safe; each simulation owns its own instance.
class Convolver {
public:
    explicit Convolver(const KernelStencil& stencil);

    const Grid& grid() const noexcept { return grid_; }
    void apply(const double* in, double* out);
    Field apply(const Field& field);

private:
    Grid grid_;
    std::unique_ptr<RealFft> fft_;
    std::vector<std::complex<double>> kernel_hat_;
};

/// CSV rows "x,value" (1D) or "x,y,value" (2D) with a header row.
void write_field_csv(const Field& field, std::ostream& os);
void write_field_csv(const Field& field, const std::string& path);

}  // namespace nlfront
