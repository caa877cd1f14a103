#include <doctest.h>

#include "nlfront_app/config.hpp"
#include "nlfront/error.hpp"

#include <string>

using namespace nlfront;
using namespace nlfront::app;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config_invalid);
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("ini parsing") {
    const auto doc = parse_ini("# comment\n[a]\nx = 1 ; trailing\n\n[b]\ny=two words\n");
    REQUIRE(doc.sections.size() == 2);
    CHECK(doc.sections[0].entries[0].value == "1");
    CHECK(doc.sections[0].entries[0].line == 3);
    CHECK(doc.sections[1].entries[0].value == "two words");
}

TEST_CASE("defaults round-trip") {
    const ExperimentConfig c = parse_config("");
    CHECK(c == ExperimentConfig{});
    CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("a full config round-trips losslessly") {
    const std::string text = R"(
[model]
kappa = 3
m = 0.5
[kernel]
family = stretched-exp
M = 0.3183098861837907
gamma = 0.3
nu = -1.5
[competition]
family = exponential-control
rate = 0.7
[reaction]
alpha = 0.25
k = 2
local = kpp
theta = 2
[initial]
class = monotone
radius = 3
height = 0.5
[grid]
dim = 2
L = 8
n = 64
n_cap = 256
coarsen = true
far_field = false
expand_threshold = 1e-3
[run]
T = 12.5
snapshot_dt = 0.25
levels = 0.2, 0.4
fit_level = 0.4
mode = diagonal
snapshot_stride = 3
[verify]
suites = tube, lambert
n = 32
runs = 3
T = 1.5
[sweep]
families = polynomial, table
table.table_s = 1, 2, 4
table.table_b = 0.5, 0.1, 0.01
[predict]
t_start = 2
t_end = 9
points = 8
eps = 0.1
[output]
dir = somewhere/else
)";
    const ExperimentConfig c = parse_config(text);
    CHECK(c.model.kappa == 3.0);
    CHECK(c.kernel.params.nu == -1.5);
    REQUIRE(c.reaction.competition.has_value());
    CHECK(c.reaction.competition->params.rate == 0.7);
    CHECK(c.grid.policy.coarsen);
    CHECK_FALSE(c.grid.policy.far_field);
    CHECK(c.run.mode == FrontMode::diagonal);
    CHECK(c.run.levels == std::vector<double>{0.2, 0.4});
    CHECK(c.sweep.overrides.at("table").at("table_s") == "1, 2, 4");
    const ExperimentConfig back = parse_config(serialize_config(c));
    CHECK(back == c);
    CHECK(serialize_config(back) == serialize_config(c));
}

TEST_CASE("malformed input reports line numbers") {
    CHECK(error_of("[grid]\nn = abc\n").find("line 2") != std::string::npos);
    CHECK(error_of("[grid]\nn = 64\n[grid]\n").find("line 3") != std::string::npos);
    CHECK(error_of("[model]\nkappa = 2\nkappa = 3\n").find("line 3") != std::string::npos);
    CHECK(error_of("x = 1\n").find("line 1") != std::string::npos);
    CHECK(error_of("[model]\n\n\nbogus = 1\n").find("line 4") != std::string::npos);
    CHECK(error_of("[nowhere]\n").find("line 1") != std::string::npos);
    CHECK(error_of("[model\n").find("line 1") != std::string::npos);
    CHECK(error_of("[kernel]\nfamily = cauchy\n").find("line 2") != std::string::npos);
    CHECK(error_of("[model]\njust words\n").find("line 2") != std::string::npos);
}

TEST_CASE("validation") {
    CHECK_FALSE(error_of("[model]\nkappa = 1\nm = 1\n").empty());
    CHECK_FALSE(error_of("[grid]\nn = 100\n").empty());
    CHECK_FALSE(error_of("[kernel]\nfamily = polynomial\nmu = -0.5\n").empty());
    CHECK_FALSE(error_of("[run]\nlevels = 0.5, 1.5\n").empty());
    CHECK_FALSE(error_of("[kernel]\nfamily = stretched-exp\ngamma = 1.5\n").empty());
    CHECK_FALSE(error_of("[predict]\nt_start = 5\nt_end = 2\n").empty());
    CHECK(error_of("[grid]\ndim = 2\nn = 64\nn_cap = 128\n").empty());
}

TEST_CASE("builders follow the config") {
    ExperimentConfig c = parse_config("[initial]\nclass = monotone\n[grid]\nL = 4\nn = 16\n");
    const Field u = build_initial(c);
    CHECK(u[0] == 1.0);
    CHECK(u[15] == 0.0);
    c.initial.ic_class = ICClass::integrable;
    c.initial.radius = 1.0;
    c.initial.height = 0.25;
    const Field b = build_initial(c);
    CHECK(b[8] == 0.25);
    CHECK(b[0] == 0.0);
    const SimState s = build_state(c);
    CHECK(s.params.beta() == 1.0);
    CHECK(s.field.grid.n == 16);
    CHECK(predicted_position(c, build_profile(c.kernel, 1), 10.0) == doctest::Approx(std::exp(5.0) - 1.0));
    CHECK_FALSE(predicted_position(c, build_profile(c.kernel, 1), -1.0).has_value());
}
