#include "nlfront_app/commands.hpp"

#include "nlfront/csv.hpp"
#include "nlfront/error.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

namespace nlfront::app {

namespace {

struct Flags {
    std::string config;
    std::string out;
    int jobs = 1;
    std::uint64_t seed = 1;
};

void add_flags(CLI::App* sub, Flags& f, bool jobs) {
    sub->add_option("--config", f.config, "Experiment config (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "Output directory (overrides [output] dir)");
    sub->add_option("--seed", f.seed, "Seed for randomized suites");
    if (jobs) sub->add_option("--jobs", f.jobs, "Concurrent sweep rows")->check(CLI::PositiveNumber);
}

std::string out_dir(const Flags& f, const ExperimentConfig& c) { return f.out.empty() ? c.output.dir : f.out; }

int simulate(const Flags& f) {
    const ExperimentConfig c = load_config(f.config);
    const std::string dir = out_dir(f, c);
    const SimulateResult r = run_simulate(c, dir);
    std::cout << "simulated to t = " << format_double(r.trajectory.times().empty() ? 0.0 : r.trajectory.times().back())
              << " (L = " << format_double(r.final_L) << ", n = " << r.final_n << ")\n";
    if (r.fit) {
        const LawFit& b = r.fit->best();
        std::cout << "fitted law: " << to_string(r.fit->law) << ", parameter " << format_double(b.parameter)
                  << ", residual " << format_double(b.residual) << "\n";
    }
    std::cout << "wrote " << dir << "/trace.csv, fit.csv, snapshots/\n";
    return exit_ok;
}

int verify(const Flags& f) {
    const ExperimentConfig c = load_config(f.config);
    const std::string dir = out_dir(f, c);
    const auto rows = run_verify(c, dir, f.seed);
    int failed = 0;
    for (const auto& r : rows) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.check << " [" << r.parameters << "] value "
                  << format_double(r.value) << " threshold " << format_double(r.threshold) << "\n";
        if (!r.pass) ++failed;
    }
    std::cout << rows.size() - std::size_t(failed) << "/" << rows.size() << " checks passed; wrote " << dir
              << "/verification.csv\n";
    return failed ? exit_failure : exit_ok;
}

int sweep(const Flags& f) {
    const ExperimentConfig c = load_config(f.config);
    validate(c);
    const std::string dir = out_dir(f, c);
    const auto rows = run_sweep(c, dir, f.jobs);
    bool any_failed = false;
    for (const auto& r : rows) {
        if (r.ok) {
            std::cout << r.family << ": measured " << r.measured_law << " (predicted "
                      << (r.predicted_law.empty() ? "-" : r.predicted_law) << "), parameter "
                      << format_double(r.fitted_parameter) << "\n";
        } else {
            std::cout << r.family << ": FAILED " << r.message << "\n";
            any_failed = true;
        }
    }
    std::cout << "wrote " << dir << "/sweep.csv\n";
    return any_failed ? exit_failure : exit_ok;
}

int predict(const Flags& f) {
    const ExperimentConfig c = load_config(f.config);
    const std::string dir = out_dir(f, c);
    const auto rows = run_predict(c, dir);
    CsvWriter w(std::cout);
    w.header({"t", "eta", "lower", "upper"});
    for (const auto& r : rows) {
        w.cell(r.t).cell(r.eta).cell(r.lower).cell(r.upper);
        w.end_row();
    }
    return exit_ok;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Nonlocal reaction-diffusion front laboratory"};
    app.require_subcommand(1);
    Flags flags;
    CLI::App* sim = app.add_subcommand("simulate", "Run one simulation and fit its front");
    CLI::App* ver = app.add_subcommand("verify", "Run invariant and certification suites");
    CLI::App* swp = app.add_subcommand("sweep", "Simulate several kernel families concurrently");
    CLI::App* pre = app.add_subcommand("predict", "Print predicted front positions");
    add_flags(sim, flags, false);
    add_flags(ver, flags, false);
    add_flags(swp, flags, true);
    add_flags(pre, flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*sim) return simulate(flags);
        if (*ver) return verify(flags);
        if (*swp) return sweep(flags);
        return predict(flags);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::config_invalid ? exit_config : exit_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

}  // namespace nlfront::app
