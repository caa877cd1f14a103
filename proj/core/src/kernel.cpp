#include "nlfront/kernel.hpp"

#include "nlfront/error.hpp"

#include <cmath>
#include <numbers>

namespace nlfront {

Kernel::Kernel(TailProfile profile, int dim, double normalizer)
    : profile_(std::move(profile)), dim_(dim), Z_(normalizer) {}

double Kernel::operator()(double x) const { return radial(std::abs(x)); }

double Kernel::operator()(double x, double y) const { return radial(std::hypot(x, y)); }

double Kernel::mass_beyond(double r) const {
    return unit_sphere_measure(dim_) * profile_.tail_moment(r, dim_ - 1) / Z_;
}

double unit_sphere_measure(int dim) { return dim == 1 ? 2.0 : 2.0 * std::numbers::pi; }

Kernel normalize_kernel(const TailProfile& profile, int dim) {
    require(dim == 1 || dim == 2, ErrorCode::parameter_out_of_range, "kernel dimension must be 1 or 2");
    if (!profile.integrable(dim))
        fail(ErrorCode::divergent_tail_integral,
             "profile is not radially integrable in dimension " + std::to_string(dim));
    const double Z = unit_sphere_measure(dim) * profile.tail_moment(0.0, dim - 1);
    require(std::isfinite(Z) && Z > 0.0, ErrorCode::divergent_tail_integral, "normalizer is not finite");
    return Kernel(profile, dim, Z);
}

}  // namespace nlfront
