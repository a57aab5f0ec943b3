#include <doctest.h>

#include <string>

#include "petic/config.hpp"
#include "petic/errors.hpp"
#include "petic/scenario.hpp"
#include "test_helpers.hpp"

using namespace petic;

namespace {

// Minimal two-scalar-agent scenario used to probe the loader.
std::string minimal_scenario(const std::string& patch_key = "", const std::string& patch_val = "") {
    std::string text = R"([virtual]
m = 1

[leader]
n = 1
C = [[0]]
D = [[0]]
x0 = [0]

[agent.1]
n = 1
C = [[0.1]]
D = [[0.2]]
Xi = [[0]]
gain = -0.5
x0 = [1.0]
[agent.1.energy]
tau0 = 0.01
beta = 0.005

[agent.2]
n = 1
C = [[0.1]]
D = [[0.2]]
Xi = [[0]]
gain = -0.4
x0 = [2.0]
[agent.2.energy]
tau0 = 0.01
beta = 0.005

[topology]
alpha = 2.0
abar = [[0, 1], [1, 0]]
bbar = [1, 0]

[trigger]
delta = 0.01
psi1 = 1.4
psi2 = 1.001
gamma = 0.002
p = {scalar = 0.95}

[control]
mode = "no_delay"

[sim]
step = 0.001
horizon = 1.0
runs = 4
seed = 11
record_stride = 1
)";
    if (!patch_key.empty()) {
        const size_t pos = text.find(patch_key + " = ");
        REQUIRE(pos != std::string::npos);
        const size_t eol = text.find('\n', pos);
        text.replace(pos, eol - pos, patch_key + " = " + patch_val);
    }
    return text;
}

} // namespace

TEST_CASE("config parser handles the value grammar") {
    const std::string text = R"(# top comment
[alpha]
count = 42
ratio = -1.5e-3
name = "hello world"
flag = true
vec = [1, 2.5, 3]
mat = [[1, 0],
       [0, 1]]  # trailing comment
inline = {scalar = 0.95}
)";
    config::Table root = config::parse(text, "<test>");
    config::Section top(&root, "");
    auto alpha = top.subsection("alpha");
    REQUIRE(alpha.has_value());
    CHECK(alpha->get_int("count") == 42);
    CHECK(alpha->get_double("ratio") == doctest::Approx(-0.0015));
    CHECK(alpha->get_string("name") == "hello world");
    CHECK(alpha->get_vector("vec").size() == 3);
    CHECK(alpha->get_matrix("mat") == Eigen::MatrixXd::Identity(2, 2));
    const config::Value& raw = alpha->get_raw("inline");
    CHECK(raw.is_table());
    CHECK(alpha->get_raw("flag").data.index() == 2); // bool alternative
    alpha->finish();
}

TEST_CASE("config parser reports malformed input with line numbers") {
    CHECK_THROWS_AS(config::parse("", "<t>"), ConfigError);
    CHECK_THROWS_AS(config::parse("[s]\nkey 5\n", "<t>"), ConfigError);
    CHECK_THROWS_AS(config::parse("[s]\nkey = [1, 2\n", "<t>"), ConfigError);
    CHECK_THROWS_AS(config::parse("[s]\nkey = \"abc\n", "<t>"), ConfigError);
    CHECK_THROWS_AS(config::parse("[s]\nk = 1\nk = 2\n", "<t>"), ConfigError);
    try {
        config::parse("[s]\nkey = @\n", "<t>");
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("strict schema rejects unknown keys with their path") {
    std::string text = minimal_scenario();
    text += "\n[sim2]\nx = 1\n";
    CHECK_THROWS_WITH_AS(parse_scenario(text, "<t>"), doctest::Contains("sim2"), ConfigError);

    std::string text2 = minimal_scenario();
    text2.insert(text2.find("[control]"), "stray = 1\n");
    CHECK_THROWS_WITH_AS(parse_scenario(text2, "<t>"), doctest::Contains("stray"), ConfigError);
}

TEST_CASE("scenario loads and validates") {
    Scenario s = parse_scenario(minimal_scenario(), "<t>");
    CHECK(s.dim() == 2);
    CHECK(s.agents.size() == 2);
    CHECK(s.mode == ControlMode::NoDelay);
    CHECK(s.trigger.P == 0.95 * Eigen::MatrixXd::Identity(2, 2));
    // derived H = -L + B for the two-agent chain
    Eigen::MatrixXd h = information_matrix(s.topology);
    Eigen::MatrixXd expected(2, 2);
    expected << 0, 1, 1, -1;
    CHECK(h == expected);
}

TEST_CASE("scenario validation failures name the field and constraint") {
    SUBCASE("empty file is a parse error") {
        CHECK_THROWS_AS(parse_scenario("", "<t>"), ConfigError);
    }
    SUBCASE("psi2 below one") {
        CHECK_THROWS_WITH_AS(parse_scenario(minimal_scenario("psi2", "0.5"), "<t>"),
                             doctest::Contains("psi2"), ConfigError);
    }
    SUBCASE("delta not aligned to the step") {
        CHECK_THROWS_WITH_AS(parse_scenario(minimal_scenario("delta", "0.0105"), "<t>"),
                             doctest::Contains("delta"), ConfigError);
    }
    SUBCASE("nonnegative gain in no-delay mode") {
        CHECK_THROWS_WITH_AS(parse_scenario(minimal_scenario("gain", "0.5"), "<t>"),
                             doctest::Contains("gain"), ConfigError);
    }
    SUBCASE("delayed mode requires tau_s < Delta") {
        std::string text = minimal_scenario("mode", "\"delayed\"");
        const size_t pos = text.find("mode = \"delayed\"");
        text.insert(text.find('\n', pos) + 1, "actuation_delay = 0.02\n");
        CHECK_THROWS_WITH_AS(parse_scenario(text, "<t>"), doctest::Contains("Assumption 8"),
                             ConfigError);
    }
    SUBCASE("delayed mode requires grid-aligned tau_s") {
        std::string text = minimal_scenario("mode", "\"delayed\"");
        const size_t pos = text.find("mode = \"delayed\"");
        text.insert(text.find('\n', pos) + 1, "actuation_delay = 0.0015\n");
        CHECK_THROWS_WITH_AS(parse_scenario(text, "<t>"),
                             doctest::Contains("integer multiple"), ConfigError);
    }
    SUBCASE("unsupported nonlinearity kind is rejected") {
        CHECK_THROWS_WITH_AS(
            parse_scenario(minimal_scenario("gain", "-0.5\nnonlinearity = \"tanh\""), "<t>"),
            doctest::Contains("nonlinearity"), ConfigError);
    }
}

TEST_CASE("serialization round trip preserves every field") {
    Scenario s = parse_scenario(minimal_scenario(), "<t>");
    Scenario again = parse_scenario(serialize_scenario(s), "<roundtrip>");
    CHECK(scenario_equal(s, again));

    Scenario bundled = load_scenario(petic_test::scenario_path("uav_ugv_no_delay.toml"));
    Scenario bundled_again = parse_scenario(serialize_scenario(bundled), "<roundtrip>");
    CHECK(scenario_equal(bundled, bundled_again));

    Scenario delayed = load_scenario(petic_test::scenario_path("uav_ugv_delayed.toml"));
    Scenario delayed_again = parse_scenario(serialize_scenario(delayed), "<roundtrip>");
    CHECK(scenario_equal(delayed, delayed_again));
}
