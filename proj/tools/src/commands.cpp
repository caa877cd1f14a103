#include "nlfront_app/commands.hpp"

#include "nlfront_app/suites.hpp"
#include "nlfront/csv.hpp"
#include "nlfront/error.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;

namespace nlfront::app {

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    require(bool(os), ErrorCode::config_invalid, "cannot write '" + path.string() + "'");
    return os;
}

std::string snapshot_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%05d.csv", index);
    return buf;
}

}  // namespace

SimulateResult run_simulate(const ExperimentConfig& config, const std::string& dir) {
    validate(config);
    const fs::path root(dir);
    fs::create_directories(root / "snapshots");

    SimState state = build_state(config);
    const TailProfile profile = build_profile(config.kernel, config.grid.dim);

    std::ofstream index = open_out(root / "snapshots" / "index.csv");
    CsvWriter idx(index);
    idx.header({"index", "t", "L", "n", "file"});
    int count = 0;
    auto dump = [&](const SimState& s) {
        const std::string name = snapshot_name(count);
        write_field_csv(s.field, (root / "snapshots" / name).string());
        idx.cell(count).cell(s.time).cell(s.field.grid.L).cell(s.field.grid.n).cell(name);
        idx.end_row();
    };

    SolveOptions opt;
    opt.snapshot_dt = config.run.snapshot_dt;
    opt.levels = config.run.levels;
    opt.mode = config.run.mode;
    opt.dt = config.run.dt;
    const int stride = config.run.snapshot_stride;
    opt.on_snapshot = [&](const SimState& s) {
        if (stride > 0 && count % stride == 0) dump(s);
        ++count;
        return true;
    };
    SimulateResult res;
    res.trajectory = solve(state, config.run.T, opt);
    if (stride == 0 || (count - 1) % stride != 0) dump(state);
    res.final_L = state.field.grid.L;
    res.final_n = state.field.grid.n;

    std::ofstream trace = open_out(root / "trace.csv");
    write_trajectory_csv(res.trajectory, config.reaction.theta,
                         [&](double t) { return predicted_position(config, profile, t); }, trace);

    std::ofstream fit = open_out(root / "fit.csv");
    try {
        res.fit = classify_growth(res.trajectory.trace, config.run.fit_level);
        write_fit_csv(*res.fit, fit);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::insufficient_data) throw;
        CsvWriter w(fit);
        w.header({"law", "coefficient", "parameter", "residual", "points", "selected"});
        std::cerr << "warning: " << e.what() << "; fit.csv has no rows\n";
    }
    return res;
}

std::vector<CertificationRow> run_verify(const ExperimentConfig& config, const std::string& dir, std::uint64_t seed) {
    validate(config);
    const auto rows = run_suites(config, config.verify.suites, seed);
    fs::create_directories(dir);
    std::ofstream os = open_out(fs::path(dir) / "verification.csv");
    write_certification_csv(rows, os);
    return rows;
}

std::pair<std::string, std::optional<double>> predicted_law(const ExperimentConfig& config) {
    const auto& p = config.kernel.params;
    const double beta = config.model.beta();
    const bool integrable = config.initial.ic_class == ICClass::integrable;
    switch (config.kernel.family) {
        case TailFamily::polynomial:
            return {"exponential-in-t", integrable ? beta / (config.grid.dim + p.mu) : beta / p.mu};
        case TailFamily::stretched_exp: return {"power", 1.0 / p.gamma};
        case TailFamily::almost_linear: return {"t-log-power", p.lambda};
        case TailFamily::exponential_control:
        case TailFamily::gaussian_control: return {"linear", std::nullopt};
        case TailFamily::log_stretched:
        case TailFamily::table: return {"", std::nullopt};
    }
    return {"", std::nullopt};
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const std::string& dir, int jobs) {
    const auto& families = config.sweep.families;
    require(!families.empty(), ErrorCode::config_invalid, "sweep needs at least one family");
    std::vector<SweepRow> rows(families.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < families.size(); i = next++) {
            SweepRow& row = rows[i];
            const std::string name(to_string(families[i]));
            row.family = name;
            try {
                ExperimentConfig c = config;
                c.kernel.family = families[i];
                if (auto it = config.sweep.overrides.find(name); it != config.sweep.overrides.end())
                    for (const auto& [key, value] : it->second)
                        require(set_kernel_param(c.kernel, key, value), ErrorCode::config_invalid,
                                "unknown kernel parameter '" + key + "' for " + name);
                auto [law, param] = predicted_law(c);
                row.predicted_law = law;
                row.predicted_parameter = param;
                const SimulateResult sim = run_simulate(c, (fs::path(dir) / name).string());
                require(sim.fit.has_value(), ErrorCode::insufficient_data, "trace too short to classify");
                const GrowthFit& fit = *sim.fit;
                row.measured_law = std::string(to_string(fit.law));
                const LawFit& target = law.empty() ? fit.best() : fit.fit(growth_law_from_string(law));
                row.fitted_parameter = target.parameter;
                if (param) row.relative_error = std::abs(target.parameter - *param) / std::abs(*param);
                row.ok = true;
            } catch (const std::exception& e) {
                row.ok = false;
                row.message = e.what();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(jobs, int(families.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    fs::create_directories(dir);
    std::ofstream os = open_out(fs::path(dir) / "sweep.csv");
    CsvWriter w(os);
    w.header({"family", "status", "predicted_law", "predicted_parameter", "measured_law", "fitted_parameter",
              "relative_error", "law_match", "message"});
    for (const auto& r : rows) {
        w.cell(r.family).cell(r.ok ? "ok" : "failed").cell(r.predicted_law).cell(r.predicted_parameter);
        if (r.ok) {
            w.cell(r.measured_law).cell(r.fitted_parameter);
        } else {
            w.cell("").cell("");
        }
        w.cell(r.relative_error);
        w.cell(r.ok && !r.predicted_law.empty() ? (r.measured_law == r.predicted_law ? "true" : "false") : "");
        w.cell(r.message);
        w.end_row();
    }
    return rows;
}

std::vector<PredictRow> run_predict(const ExperimentConfig& config, const std::string& dir) {
    validate(config);
    const TailProfile profile = build_profile(config.kernel, config.grid.dim);
    const auto& p = config.predict;
    const bool diagonal = config.grid.dim == 2 && config.initial.ic_class == ICClass::monotone;
    std::vector<PredictRow> rows;
    for (int i = 0; i < p.points; ++i) {
        const double t = p.points == 1 ? p.t_start : p.t_start + (p.t_end - p.t_start) * i / (p.points - 1);
        PredictRow r;
        r.t = t;
        r.eta = predicted_position(config, profile, t);
        if (diagonal) {
            try {
                std::tie(r.lower, r.upper) = diagonal_front_bounds(profile, config.model.beta(), t, p.eps);
            } catch (const Error&) {
            }
        }
        rows.push_back(r);
    }
    fs::create_directories(dir);
    std::ofstream os = open_out(fs::path(dir) / "predict.csv");
    CsvWriter w(os);
    w.header({"t", "eta", "lower", "upper"});
    for (const auto& r : rows) {
        w.cell(r.t).cell(r.eta).cell(r.lower).cell(r.upper);
        w.end_row();
    }
    return rows;
}

}  // namespace nlfront::app
