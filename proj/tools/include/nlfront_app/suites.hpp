#pragma once

#include "nlfront_app/config.hpp"
#include "nlfront/theory.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nlfront::app {

/// Max relative (sup-norm) gap between FFT and direct convolution over
/// `instances` random (stencil, field) pairs with n drawn from {16, ..., n_max}.
double convolution_oracle_gap(int dim, int instances, int n_max, std::uint64_t seed);

/// Random data in the tube evolved without domain growth. Reports the worst
/// excursion below 0 or above theta over all snapshots.
struct TubeReport {
    double worst_excursion = 0.0;
    int runs = 0;
};
TubeReport tube_suite(const ExperimentConfig& config, int runs, double T, int n, std::uint64_t seed);

/// Ordered pairs u0 <= v0; reports max over snapshots and nodes of u - v.
double comparison_suite(const ExperimentConfig& config, int runs, double T, int n, std::uint64_t seed);

/// max of u - w over checked times, w the truncated linear series.
double majorant_suite(const ExperimentConfig& config, int runs, double T, int n, std::uint64_t seed);

/// max of kappa t e^{-kappa t} (a * u0) - u over checked times in (0, min(T, 5)].
double minorant_suite(const ExperimentConfig& config, int runs, double T, int n, std::uint64_t seed);

struct LambertReport {
    double max_residual = 0.0;
    bool below_minus_one = true;
    int points = 0;
};
LambertReport lambert_suite(int points);

/// eta(t) / (t (log t)^lambda) for the almost-linear family with beta = 1.
double lambert_ratio(double lambda, double t);

/// First time at which u >= 0.99 theta on the unit ball, starting from a bump
/// of height `height` theta; negative when not reached by T_max.
double hair_trigger_time(const ExperimentConfig& config, double height, double T_max);

/// Number of correct classifications among noisy synthetic traces of 200
/// points, cycling through the four laws.
int growth_fit_trials(int trials, double noise, std::uint64_t seed);

/// Every available suite name, in execution order.
const std::vector<std::string>& suite_names();

/// Runs the named suites; throws config-invalid for unknown names.
std::vector<CertificationRow> run_suites(const ExperimentConfig& config, const std::vector<std::string>& names,
                                         std::uint64_t seed);

}  // namespace nlfront::app
