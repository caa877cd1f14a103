#include "nlfront/error.hpp"
#include "nlfront/fft.hpp"
#include "nlfront/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

namespace nlfront {

namespace {
// The FFTW planner keeps global state; plan creation and destruction are serialized.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

RealFft::RealFft(int dim, int M) : dim_(dim), M_(M) {
    require(dim == 1 || dim == 2, ErrorCode::invalid_size, "transform dimension must be 1 or 2");
    real_size_ = dim == 1 ? std::size_t(M) : std::size_t(M) * std::size_t(M);
    complex_size_ = dim == 1 ? std::size_t(M / 2 + 1) : std::size_t(M) * std::size_t(M / 2 + 1);
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(real_size_);
    auto* c = fftw_alloc_complex(complex_size_);
    spectrum_ = reinterpret_cast<std::complex<double>*>(c);
    const unsigned flags = FFTW_ESTIMATE;
    if (dim == 1) {
        plan_fwd_ = fftw_plan_dft_r2c_1d(M, real_, c, flags);
        plan_bwd_ = fftw_plan_dft_c2r_1d(M, c, real_, flags);
    } else {
        plan_fwd_ = fftw_plan_dft_r2c_2d(M, M, real_, c, flags);
        plan_bwd_ = fftw_plan_dft_c2r_2d(M, M, c, real_, flags);
    }
}

RealFft::~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(real_);
    fftw_free(spectrum_);
}

void RealFft::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }

void RealFft::backward() { fftw_execute(static_cast<fftw_plan>(plan_bwd_)); }

Convolver::Convolver(const KernelStencil& stencil) : grid_(stencil.grid) {
    const int n = grid_.n;
    const int M = 2 * n;
    fft_ = std::make_unique<RealFft>(grid_.dim, M);
    double* r = fft_->real();
    std::fill(r, r + fft_->real_size(), 0.0);
    auto wrap = [M](int k) { return k < 0 ? k + M : k; };
    if (grid_.dim == 1) {
        for (int k = -(n - 1); k <= n - 1; ++k) r[wrap(k)] = stencil.at(k);
    } else {
        for (int k1 = -(n - 1); k1 <= n - 1; ++k1)
            for (int k2 = -(n - 1); k2 <= n - 1; ++k2)
                r[std::size_t(wrap(k1)) * M + wrap(k2)] = stencil.at(k1, k2);
    }
    fft_->forward();
    const double scale = grid_.cell_volume() / static_cast<double>(fft_->real_size());
    kernel_hat_.assign(fft_->spectrum(), fft_->spectrum() + fft_->complex_size());
    for (auto& z : kernel_hat_) z *= scale;
}

void Convolver::apply(const double* in, double* out) {
    const int n = grid_.n;
    const int M = 2 * n;
    double* r = fft_->real();
    std::fill(r, r + fft_->real_size(), 0.0);
    if (grid_.dim == 1) {
        std::memcpy(r, in, sizeof(double) * n);
    } else {
        for (int i = 0; i < n; ++i) std::memcpy(r + std::size_t(i) * M, in + std::size_t(i) * n, sizeof(double) * n);
    }
    fft_->forward();
    auto* s = fft_->spectrum();
    for (std::size_t k = 0; k < kernel_hat_.size(); ++k) s[k] *= kernel_hat_[k];
    fft_->backward();
    if (grid_.dim == 1) {
        std::memcpy(out, r, sizeof(double) * n);
    } else {
        for (int i = 0; i < n; ++i) std::memcpy(out + std::size_t(i) * n, r + std::size_t(i) * M, sizeof(double) * n);
    }
}

Field Convolver::apply(const Field& field) {
    require(same_grid(field.grid, grid_), ErrorCode::grid_mismatch, "field grid differs from stencil grid");
    Field out{grid_, std::vector<double>(grid_.size())};
    apply(field.values.data(), out.values.data());
    return out;
}

Field convolve(const KernelStencil& kernel_field, const Field& field) {
    require(same_grid(kernel_field.grid, field.grid), ErrorCode::grid_mismatch,
            "kernel stencil and field live on different grids");
    Convolver conv(kernel_field);
    return conv.apply(field);
}

Field convolve_direct(const KernelStencil& kernel_field, const Field& field) {
    require(same_grid(kernel_field.grid, field.grid), ErrorCode::grid_mismatch,
            "kernel stencil and field live on different grids");
    const Grid& g = field.grid;
    require(g.size() <= (std::size_t(1) << 14), ErrorCode::too_large,
            "direct convolution limited to n^dim <= 16384");
    Field out{g, std::vector<double>(g.size(), 0.0)};
    const double vol = g.cell_volume();
    const int n = g.n;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += kernel_field.at(i - j) * field.values[j];
            out.values[i] = vol * acc;
        }
    } else {
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                double acc = 0.0;
                for (int j1 = 0; j1 < n; ++j1)
                    for (int j2 = 0; j2 < n; ++j2) acc += kernel_field.at(i1 - j1, i2 - j2) * field.at(j1, j2);
                out.at(i1, i2) = vol * acc;
            }
    }
    return out;
}

}  // namespace nlfront
