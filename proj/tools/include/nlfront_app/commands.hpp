#pragma once

#include "nlfront_app/config.hpp"
#include "nlfront/theory.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nlfront::app {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2 };

struct SimulateResult {
    Trajectory trajectory;
    std::optional<GrowthFit> fit;  // empty when the trace is too short
    double final_L = 0.0;
    int final_n = 0;
};

/// Runs one simulation and writes trace.csv, fit.csv and snapshots/ under `dir`.
SimulateResult run_simulate(const ExperimentConfig& config, const std::string& dir);

/// Writes verification.csv under `dir`; returns the rows.
std::vector<CertificationRow> run_verify(const ExperimentConfig& config, const std::string& dir, std::uint64_t seed);

struct SweepRow {
    std::string family;
    bool ok = false;
    std::string predicted_law;          // empty when the family has no law on the menu
    std::optional<double> predicted_parameter;
    std::string measured_law;
    double fitted_parameter = 0.0;
    std::optional<double> relative_error;
    std::string message;
};

/// Predicted growth law and its parameter for the configured data class.
std::pair<std::string, std::optional<double>> predicted_law(const ExperimentConfig& config);

/// One row per family in config.sweep.families, run on `jobs` threads; each
/// row writes into dir/<family>/. Writes dir/sweep.csv.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const std::string& dir, int jobs);

struct PredictRow {
    double t = 0.0;
    std::optional<double> eta;
    std::optional<double> lower;  // 2D diagonal bounds only
    std::optional<double> upper;
};

/// Predicted positions on the [predict] time grid; writes dir/predict.csv.
std::vector<PredictRow> run_predict(const ExperimentConfig& config, const std::string& dir);

/// CLI entry point; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace nlfront::app
