#pragma once

namespace nlfront {

/// Dispersal intensity kappa and mortality m; the linearized growth rate is beta = kappa - m.
struct ModelParams {
    double kappa = 2.0;
    double m = 1.0;

    double beta() const noexcept { return kappa - m; }
    bool operator==(const ModelParams&) const = default;
};

/// Throws parameter-out-of-range unless kappa > 0, m > 0 and beta > 0.
void validate(const ModelParams& params);

}  // namespace nlfront
