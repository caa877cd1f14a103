#pragma once

#include "nlfront/evolve.hpp"
#include "nlfront/front.hpp"
#include "nlfront/model.hpp"
#include "nlfront/reaction.hpp"
#include "nlfront/tail_profile.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nlfront::app {

/// Parsed key = value file with [section] headers; '#' and ';' start comments.
struct IniEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct IniSection {
    std::string name;
    int line = 0;
    std::vector<IniEntry> entries;
};

struct IniDocument {
    std::vector<IniSection> sections;
};

/// Throws config-invalid with "line N: ..." on malformed input.
IniDocument parse_ini(const std::string& text);

struct KernelConfig {
    TailFamily family = TailFamily::polynomial;
    TailParams params;

    bool operator==(const KernelConfig&) const = default;
};

struct ReactionConfig {
    double alpha = 1.0;
    int k = 1;
    LocalReaction local_f = LocalReaction::fisher;
    double theta = 1.0;
    double nu_scale = 1.0;
    std::optional<KernelConfig> competition;  // a_minus; defaults to the dispersal kernel

    bool operator==(const ReactionConfig&) const = default;
};

struct InitialConfig {
    ICClass ic_class = ICClass::integrable;
    double radius = 1.0;  // bump radius (integrable)
    double height = 1.0;  // fraction of theta

    bool operator==(const InitialConfig&) const = default;
};

struct GridConfig {
    int dim = 1;
    double L = 32.0;
    int n = 512;
    DomainPolicy policy;

    bool operator==(const GridConfig&) const = default;
};

struct RunConfig {
    double T = 30.0;
    double snapshot_dt = 1.0;
    std::vector<double> levels{0.1, 0.5, 0.9};
    double fit_level = 0.5;
    double dt = 0.0;
    std::optional<FrontMode> mode;
    int snapshot_stride = 0;  // write every k-th snapshot; 0 writes the final one only

    bool operator==(const RunConfig&) const = default;
};

struct VerifyConfig {
    std::vector<std::string> suites{"all"};  // "all" expands to every suite; an empty list is rejected by verify
    int n = 64;
    int runs = 20;
    double T = 5.0;

    bool operator==(const VerifyConfig&) const = default;
};

struct SweepConfig {
    std::vector<TailFamily> families;
    /// family name -> (parameter key -> value), applied on top of [kernel].
    std::map<std::string, std::map<std::string, std::string>> overrides;

    bool operator==(const SweepConfig&) const = default;
};

struct PredictConfig {
    double t_start = 1.0;
    double t_end = 30.0;
    int points = 30;
    double eps = 0.25;

    bool operator==(const PredictConfig&) const = default;
};

struct OutputConfig {
    std::string dir = "out";

    bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
    ModelParams model;
    KernelConfig kernel;
    ReactionConfig reaction;
    InitialConfig initial;
    GridConfig grid;
    RunConfig run;
    VerifyConfig verify;
    SweepConfig sweep;
    PredictConfig predict;
    OutputConfig output;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates. Unknown sections or keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Full INI text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Throws config-invalid when module-level invariants fail (beta > 0, profile
/// ranges, kernel integrability, grid sizes, levels in (0, 1)).
void validate(const ExperimentConfig& config);

/// Applies one "key = value" pair to kernel params; false when the key is unknown.
bool set_kernel_param(KernelConfig& kernel, const std::string& key, const std::string& value);

TailProfile build_profile(const KernelConfig& kernel, int dim);
Kernel build_kernel(const KernelConfig& kernel, int dim);
ReactionSpec build_reaction(const ExperimentConfig& config, const Kernel& dispersal);
Field build_initial(const ExperimentConfig& config);
SimState build_state(const ExperimentConfig& config);

/// Predicted front position for the configured data class, or nothing when
/// the law is undefined at t.
std::optional<double> predicted_position(const ExperimentConfig& config, const TailProfile& profile, double t);

}  // namespace nlfront::app
