#pragma once

#include "nlfront/tail_profile.hpp"

namespace nlfront {

/// Normalized radial dispersal density a(x) = b(|x|) / Z in dimension 1 or 2.
class Kernel {
public:
    Kernel() = default;
    Kernel(TailProfile profile, int dim, double normalizer);

    const TailProfile& profile() const noexcept { return profile_; }
    int dim() const noexcept { return dim_; }
    double normalizer() const noexcept { return Z_; }

    /// a at radius r = |x|.
    double radial(double r) const { return profile_(r) / Z_; }
    double operator()(double x) const;
    double operator()(double x, double y) const;

    /// Mass of a outside the ball of radius r (outside [-r, r] in d = 1).
    double mass_beyond(double r) const;

private:
    TailProfile profile_;
    int dim_ = 1;
    double Z_ = 1.0;
};

/// Surface measure of the unit sphere S^{d-1}: 2 for d = 1, 2 pi for d = 2.
double unit_sphere_measure(int dim);

/// Builds the normalized kernel; Z from adaptive radial quadrature plus the
/// family's analytic tail remainder.
Kernel normalize_kernel(const TailProfile& profile, int dim);

}  // namespace nlfront
