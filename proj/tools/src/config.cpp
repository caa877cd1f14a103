#include "nlfront_app/config.hpp"

#include "nlfront/csv.hpp"
#include "nlfront/error.hpp"
#include "nlfront/kernel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace nlfront::app {

namespace {

[[noreturn]] void bad(int line, const std::string& what) {
    if (line > 0) fail(ErrorCode::config_invalid, "line " + std::to_string(line) + ": " + what);
    fail(ErrorCode::config_invalid, what);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double to_double(const IniEntry& e) {
    const std::string& v = e.value;
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
        bad(e.line, "'" + e.key + "' expects a finite number, got '" + v + "'");
    return x;
}

int to_int(const IniEntry& e) {
    const std::string& v = e.value;
    long long x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || x < -(1LL << 31) || x > (1LL << 31) - 1)
        bad(e.line, "'" + e.key + "' expects an integer, got '" + v + "'");
    return int(x);
}

bool to_bool(const IniEntry& e) {
    if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
    if (e.value == "false" || e.value == "no" || e.value == "0") return false;
    bad(e.line, "'" + e.key + "' expects true or false, got '" + e.value + "'");
}

std::vector<double> to_doubles(const IniEntry& e) {
    std::vector<double> out;
    for (const auto& item : split_list(e.value)) out.push_back(to_double({e.key, item, e.line}));
    return out;
}

// Runs `f` and rewraps library errors with the entry's line number.
template <class F>
auto at_line(const IniEntry& e, F&& f) {
    try {
        return f();
    } catch (const Error& err) {
        if (err.code() == ErrorCode::config_invalid) throw;
        bad(e.line, "'" + e.key + "': " + err.what());
    }
}

using Handler = std::function<void(const IniEntry&)>;

void dispatch(const IniSection& sec, const std::map<std::string, Handler>& handlers,
              const std::function<bool(const IniEntry&)>& fallback = {}) {
    for (const auto& e : sec.entries) {
        const auto it = handlers.find(e.key);
        if (it != handlers.end()) {
            it->second(e);
            continue;
        }
        if (fallback && fallback(e)) continue;
        bad(e.line, "unknown key '" + e.key + "' in [" + sec.name + "]");
    }
}

bool apply_kernel_entry(KernelConfig& k, const IniEntry& e) {
    TailParams& p = k.params;
    if (e.key == "family") {
        k.family = at_line(e, [&] { return tail_family_from_string(e.value); });
        return true;
    }
    static const std::map<std::string, double TailParams::*> reals{
        {"M", &TailParams::M},         {"mu", &TailParams::mu},       {"c", &TailParams::c},
        {"delta", &TailParams::delta}, {"gamma", &TailParams::gamma}, {"nu", &TailParams::nu},
        {"lambda", &TailParams::lambda}, {"rate", &TailParams::rate}};
    if (const auto it = reals.find(e.key); it != reals.end()) {
        p.*(it->second) = to_double(e);
        return true;
    }
    if (e.key == "table_s") {
        p.table_s = to_doubles(e);
        return true;
    }
    if (e.key == "table_b") {
        p.table_b = to_doubles(e);
        return true;
    }
    return false;
}

bool kernel_key(KernelConfig& k, const IniEntry& e) { return apply_kernel_entry(k, e); }

void read_kernel_section(const IniSection& sec, KernelConfig& k) {
    dispatch(sec, {}, [&](const IniEntry& e) { return kernel_key(k, e); });
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v[i]);
    }
    return out;
}

void write_kernel(std::ostream& os, const KernelConfig& k) {
    const TailParams& p = k.params;
    os << "family = " << to_string(k.family) << '\n';
    os << "M = " << format_double(p.M) << '\n';
    os << "mu = " << format_double(p.mu) << '\n';
    os << "c = " << format_double(p.c) << '\n';
    os << "delta = " << format_double(p.delta) << '\n';
    os << "gamma = " << format_double(p.gamma) << '\n';
    os << "nu = " << format_double(p.nu) << '\n';
    os << "lambda = " << format_double(p.lambda) << '\n';
    os << "rate = " << format_double(p.rate) << '\n';
    if (!p.table_s.empty()) {
        os << "table_s = " << join(p.table_s) << '\n';
        os << "table_b = " << join(p.table_b) << '\n';
    }
}

}  // namespace

IniDocument parse_ini(const std::string& text) {
    IniDocument doc;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        const auto cpos = s.find_first_of("#;");
        if (cpos != std::string::npos) s.erase(cpos);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') bad(line, "unterminated section header");
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (name.empty()) bad(line, "empty section name");
            for (const auto& sec : doc.sections)
                if (sec.name == name) bad(line, "duplicate section [" + name + "]");
            doc.sections.push_back({name, line, {}});
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) bad(line, "expected 'key = value'");
        if (doc.sections.empty()) bad(line, "key outside of any section");
        IniEntry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
        if (e.key.empty()) bad(line, "empty key");
        for (const auto& prev : doc.sections.back().entries)
            if (prev.key == e.key) bad(line, "duplicate key '" + e.key + "'");
        doc.sections.back().entries.push_back(std::move(e));
    }
    return doc;
}

bool set_kernel_param(KernelConfig& k, const std::string& key, const std::string& value) {
    return apply_kernel_entry(k, {key, value, 0});
}

ExperimentConfig parse_config(const std::string& text) {
    const IniDocument doc = parse_ini(text);
    ExperimentConfig c;
    for (const auto& sec : doc.sections) {
        if (sec.name == "model") {
            dispatch(sec, {{"kappa", [&](auto& e) { c.model.kappa = to_double(e); }},
                           {"m", [&](auto& e) { c.model.m = to_double(e); }}});
        } else if (sec.name == "kernel") {
            read_kernel_section(sec, c.kernel);
        } else if (sec.name == "competition") {
            KernelConfig k;
            read_kernel_section(sec, k);
            c.reaction.competition = k;
        } else if (sec.name == "reaction") {
            dispatch(sec, {{"alpha", [&](auto& e) { c.reaction.alpha = to_double(e); }},
                           {"k", [&](auto& e) { c.reaction.k = to_int(e); }},
                           {"local", [&](auto& e) {
                                c.reaction.local_f = at_line(e, [&] { return local_reaction_from_string(e.value); });
                            }},
                           {"theta", [&](auto& e) { c.reaction.theta = to_double(e); }},
                           {"nu_scale", [&](auto& e) { c.reaction.nu_scale = to_double(e); }}});
        } else if (sec.name == "initial") {
            dispatch(sec, {{"class", [&](auto& e) {
                                c.initial.ic_class = at_line(e, [&] { return ic_class_from_string(e.value); });
                            }},
                           {"radius", [&](auto& e) { c.initial.radius = to_double(e); }},
                           {"height", [&](auto& e) { c.initial.height = to_double(e); }}});
        } else if (sec.name == "grid") {
            dispatch(sec, {{"dim", [&](auto& e) { c.grid.dim = to_int(e); }},
                           {"L", [&](auto& e) { c.grid.L = to_double(e); }},
                           {"n", [&](auto& e) { c.grid.n = to_int(e); }},
                           {"n_cap", [&](auto& e) { c.grid.policy.n_cap = to_int(e); }},
                           {"L_cap", [&](auto& e) { c.grid.policy.L_cap = to_double(e); }},
                           {"coarsen", [&](auto& e) { c.grid.policy.coarsen = to_bool(e); }},
                           {"far_field", [&](auto& e) { c.grid.policy.far_field = to_bool(e); }},
                           {"expand_threshold", [&](auto& e) { c.grid.policy.expand_threshold = to_double(e); }}});
        } else if (sec.name == "run") {
            dispatch(sec, {{"T", [&](auto& e) { c.run.T = to_double(e); }},
                           {"snapshot_dt", [&](auto& e) { c.run.snapshot_dt = to_double(e); }},
                           {"levels", [&](auto& e) { c.run.levels = to_doubles(e); }},
                           {"fit_level", [&](auto& e) { c.run.fit_level = to_double(e); }},
                           {"dt", [&](auto& e) { c.run.dt = to_double(e); }},
                           {"snapshot_stride", [&](auto& e) { c.run.snapshot_stride = to_int(e); }},
                           {"mode", [&](auto& e) {
                                if (e.value == "radial") c.run.mode = FrontMode::radial;
                                else if (e.value == "monotone") c.run.mode = FrontMode::monotone;
                                else if (e.value == "diagonal") c.run.mode = FrontMode::diagonal;
                                else if (e.value == "auto") c.run.mode.reset();
                                else bad(e.line, "unknown front mode '" + e.value + "'");
                            }}});
        } else if (sec.name == "verify") {
            dispatch(sec, {{"suites", [&](auto& e) { c.verify.suites = split_list(e.value); }},
                           {"n", [&](auto& e) { c.verify.n = to_int(e); }},
                           {"runs", [&](auto& e) { c.verify.runs = to_int(e); }},
                           {"T", [&](auto& e) { c.verify.T = to_double(e); }}});
        } else if (sec.name == "sweep") {
            dispatch(sec,
                     {{"families", [&](auto& e) {
                          c.sweep.families.clear();
                          for (const auto& f : split_list(e.value))
                              c.sweep.families.push_back(at_line(e, [&] { return tail_family_from_string(f); }));
                      }}},
                     [&](const IniEntry& e) {
                         // <family>.<parameter> = value
                         const auto dot = e.key.find('.');
                         if (dot == std::string::npos) return false;
                         const std::string fam = e.key.substr(0, dot), key = e.key.substr(dot + 1);
                         at_line(e, [&] { return tail_family_from_string(fam); });
                         KernelConfig probe;
                         if (!kernel_key(probe, {key, e.value, e.line}) || key == "family")
                             bad(e.line, "unknown kernel parameter '" + key + "'");
                         c.sweep.overrides[fam][key] = e.value;
                         return true;
                     });
        } else if (sec.name == "predict") {
            dispatch(sec, {{"t_start", [&](auto& e) { c.predict.t_start = to_double(e); }},
                           {"t_end", [&](auto& e) { c.predict.t_end = to_double(e); }},
                           {"points", [&](auto& e) { c.predict.points = to_int(e); }},
                           {"eps", [&](auto& e) { c.predict.eps = to_double(e); }}});
        } else if (sec.name == "output") {
            dispatch(sec, {{"dir", [&](auto& e) { c.output.dir = e.value; }}});
        } else {
            bad(sec.line, "unknown section [" + sec.name + "]");
        }
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::config_invalid, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "[model]\n";
    os << "kappa = " << format_double(c.model.kappa) << '\n';
    os << "m = " << format_double(c.model.m) << "\n\n";
    os << "[kernel]\n";
    write_kernel(os, c.kernel);
    os << '\n';
    os << "[reaction]\n";
    os << "alpha = " << format_double(c.reaction.alpha) << '\n';
    os << "k = " << c.reaction.k << '\n';
    os << "local = " << to_string(c.reaction.local_f) << '\n';
    os << "theta = " << format_double(c.reaction.theta) << '\n';
    os << "nu_scale = " << format_double(c.reaction.nu_scale) << "\n\n";
    if (c.reaction.competition) {
        os << "[competition]\n";
        write_kernel(os, *c.reaction.competition);
        os << '\n';
    }
    os << "[initial]\n";
    os << "class = " << to_string(c.initial.ic_class) << '\n';
    os << "radius = " << format_double(c.initial.radius) << '\n';
    os << "height = " << format_double(c.initial.height) << "\n\n";
    os << "[grid]\n";
    os << "dim = " << c.grid.dim << '\n';
    os << "L = " << format_double(c.grid.L) << '\n';
    os << "n = " << c.grid.n << '\n';
    os << "n_cap = " << c.grid.policy.n_cap << '\n';
    os << "L_cap = " << format_double(c.grid.policy.L_cap) << '\n';
    os << "coarsen = " << (c.grid.policy.coarsen ? "true" : "false") << '\n';
    os << "far_field = " << (c.grid.policy.far_field ? "true" : "false") << '\n';
    os << "expand_threshold = " << format_double(c.grid.policy.expand_threshold) << "\n\n";
    os << "[run]\n";
    os << "T = " << format_double(c.run.T) << '\n';
    os << "snapshot_dt = " << format_double(c.run.snapshot_dt) << '\n';
    os << "levels = " << join(c.run.levels) << '\n';
    os << "fit_level = " << format_double(c.run.fit_level) << '\n';
    os << "dt = " << format_double(c.run.dt) << '\n';
    os << "mode = " << (c.run.mode ? std::string(to_string(*c.run.mode)) : std::string("auto")) << '\n';
    os << "snapshot_stride = " << c.run.snapshot_stride << "\n\n";
    os << "[verify]\n";
    os << "suites = ";
    for (std::size_t i = 0; i < c.verify.suites.size(); ++i) os << (i ? ", " : "") << c.verify.suites[i];
    os << '\n';
    os << "n = " << c.verify.n << '\n';
    os << "runs = " << c.verify.runs << '\n';
    os << "T = " << format_double(c.verify.T) << "\n\n";
    os << "[sweep]\n";
    os << "families = ";
    for (std::size_t i = 0; i < c.sweep.families.size(); ++i) os << (i ? ", " : "") << to_string(c.sweep.families[i]);
    os << '\n';
    for (const auto& [fam, kv] : c.sweep.overrides)
        for (const auto& [k, v] : kv) os << fam << '.' << k << " = " << v << '\n';
    os << '\n';
    os << "[predict]\n";
    os << "t_start = " << format_double(c.predict.t_start) << '\n';
    os << "t_end = " << format_double(c.predict.t_end) << '\n';
    os << "points = " << c.predict.points << '\n';
    os << "eps = " << format_double(c.predict.eps) << "\n\n";
    os << "[output]\n";
    os << "dir = " << c.output.dir << '\n';
    return os.str();
}

void validate(const ExperimentConfig& c) {
    auto check = [](bool ok, const std::string& what) {
        if (!ok) bad(0, what);
    };
    auto wrap = [](const char* where, auto&& f) {
        try {
            f();
        } catch (const Error& err) {
            if (err.code() == ErrorCode::config_invalid) throw;
            bad(0, std::string(where) + ": " + err.what());
        }
    };
    wrap("[model]", [&] { validate(c.model); });
    check(c.grid.dim == 1 || c.grid.dim == 2, "[grid] dim must be 1 or 2");
    wrap("[grid]", [&] { make_grid(c.grid.dim, c.grid.L, c.grid.n); });
    check(c.grid.policy.n_cap >= c.grid.n, "[grid] n_cap must be at least n");
    check(c.grid.policy.L_cap >= c.grid.L, "[grid] L_cap must be at least L");
    check(c.grid.policy.expand_threshold > 0.0, "[grid] expand_threshold must be positive");
    wrap("[kernel]", [&] { build_kernel(c.kernel, c.grid.dim); });
    if (c.reaction.competition) wrap("[competition]", [&] { build_kernel(*c.reaction.competition, c.grid.dim); });
    check(c.reaction.alpha >= 0.0 && c.reaction.alpha <= 1.0, "[reaction] alpha must lie in [0, 1]");
    check(c.reaction.k >= 1, "[reaction] k must be a positive integer");
    check(c.reaction.theta > 0.0, "[reaction] theta must be positive");
    check(c.reaction.nu_scale > 0.0, "[reaction] nu_scale must be positive");
    check(c.initial.height > 0.0 && c.initial.height <= 1.0, "[initial] height must lie in (0, 1]");
    check(c.initial.radius > 0.0, "[initial] radius must be positive");
    check(c.run.T > 0.0, "[run] T must be positive");
    check(c.run.snapshot_dt > 0.0, "[run] snapshot_dt must be positive");
    check(!c.run.levels.empty(), "[run] levels must not be empty");
    for (double lv : c.run.levels) check(lv > 0.0 && lv < 1.0, "[run] levels must lie in (0, 1)");
    check(c.run.fit_level > 0.0 && c.run.fit_level < 1.0, "[run] fit_level must lie in (0, 1)");
    check(c.run.dt >= 0.0, "[run] dt must be nonnegative");
    check(c.run.snapshot_stride >= 0, "[run] snapshot_stride must be nonnegative");
    check(c.verify.n >= 16 && c.verify.n <= 128 && (c.verify.n & (c.verify.n - 1)) == 0,
          "[verify] n must be a power of two in [16, 128]");
    check(c.verify.runs >= 1, "[verify] runs must be positive");
    check(c.verify.T > 0.0, "[verify] T must be positive");
    check(c.predict.t_end > c.predict.t_start && c.predict.t_start > 0.0, "[predict] needs 0 < t_start < t_end");
    check(c.predict.points >= 2, "[predict] points must be at least 2");
    check(c.predict.eps > 0.0 && c.predict.eps < 1.0, "[predict] eps must lie in (0, 1)");
    check(!c.output.dir.empty(), "[output] dir must not be empty");
}

TailProfile build_profile(const KernelConfig& kernel, int dim) {
    TailParams p = kernel.params;
    p.d = dim;
    return nlfront::build_profile(kernel.family, p);
}

Kernel build_kernel(const KernelConfig& kernel, int dim) { return normalize_kernel(build_profile(kernel, dim), dim); }

ReactionSpec build_reaction(const ExperimentConfig& c, const Kernel& dispersal) {
    std::optional<Kernel> comp;
    if (c.reaction.alpha < 1.0)
        comp = c.reaction.competition ? build_kernel(*c.reaction.competition, c.grid.dim) : dispersal;
    return make_reaction(c.reaction.alpha, c.reaction.k, c.reaction.local_f, c.reaction.theta, c.model.beta(), comp,
                         c.reaction.nu_scale);
}

Field build_initial(const ExperimentConfig& c) {
    const Grid g = make_grid(c.grid.dim, c.grid.L, c.grid.n);
    const double top = c.initial.height * c.reaction.theta;
    const double R = c.initial.radius;
    if (c.initial.ic_class == ICClass::integrable)
        return sample_field(g, [&](double x, double y) { return std::hypot(x, y) < R ? top : 0.0; });
    if (c.grid.dim == 1) return sample_field(g, [&](double x, double) { return x < 0.0 ? top : 0.0; });
    return sample_field(g, [&](double x, double y) { return x < 0.0 && y < 0.0 ? top : 0.0; });
}

SimState build_state(const ExperimentConfig& c) {
    const Kernel kernel = build_kernel(c.kernel, c.grid.dim);
    return make_state(c.model, build_reaction(c, kernel), kernel, build_initial(c), c.initial.ic_class, c.grid.policy);
}

std::optional<double> predicted_position(const ExperimentConfig& c, const TailProfile& profile, double t) {
    const double beta = c.model.beta();
    try {
        if (c.initial.ic_class == ICClass::integrable) {
            if (t < predicted_eta_threshold(profile, beta, c.grid.dim)) return std::nullopt;
            return predicted_eta(profile, beta, c.grid.dim, t);
        }
        if (c.grid.dim == 1) return lambda_radius(LevelSetSpec{LevelShape::orthant, profile, beta}, t);
        return diagonal_mu(profile, beta, t);
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace nlfront::app
