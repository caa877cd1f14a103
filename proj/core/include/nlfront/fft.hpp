#pragma once

#include <complex>
#include <cstddef>
#include <memory>

namespace nlfront {

/// Real-to-complex transform pair of size M (d = 1) or M x M (d = 2) with
/// owned, aligned buffers. Plans are created with deterministic planning so
/// repeated runs produce bit-identical output.
class RealFft {
public:
    RealFft(int dim, int M);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    int dim() const noexcept { return dim_; }
    int size() const noexcept { return M_; }
    std::size_t real_size() const noexcept { return real_size_; }
    std::size_t complex_size() const noexcept { return complex_size_; }

    double* real() noexcept { return real_; }
    std::complex<double>* spectrum() noexcept { return spectrum_; }

    /// real() -> spectrum()
    void forward();
    /// spectrum() -> real(); unnormalized (scaled by M^d). Clobbers spectrum().
    void backward();

private:
    int dim_;
    int M_;
    std::size_t real_size_;
    std::size_t complex_size_;
    double* real_ = nullptr;
    std::complex<double>* spectrum_ = nullptr;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

}  // namespace nlfront
