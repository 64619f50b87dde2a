#include "nonsmooth/config.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace nonsmooth;

namespace {

const char* chain_text = R"(model:
  id: chain
  params: {k0: 2, k1: 1, k2: 1}
transform: unfold-two-sided
initial_state: [0.5, 0.0, 1.0, 0.0]
time: {start: 0, end: 10, output_step: 0.5}
integrator:
  rel_tol: 1e-10
  max_step: .inf
output: {dir: somewhere}
)";

std::size_t error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    FAIL("expected a ConfigError");
    return 0;
}

std::string error_field(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    FAIL("expected a ConfigError");
    return {};
}

}  // namespace

TEST_CASE("parses a full config and fills defaults") {
    const auto c = parse_config(chain_text);
    CHECK(c.model == "chain");
    CHECK(c.params.at("k0") == 2.0);
    CHECK(c.params.at("masses") == 2.0);
    CHECK(c.transform == "unfold-two-sided");
    CHECK(c.initial_state == State{0.5, 0.0, 1.0, 0.0});
    CHECK(c.time.end == 10.0);
    CHECK(c.output_step == 0.5);
    CHECK(c.integrator.rel_tol == 1e-10);
    CHECK(std::isinf(c.integrator.max_step));
    CHECK(c.integrator.abs_tol == IntegratorConfig{}.abs_tol);
    CHECK(c.output_dir == "somewhere");
    CHECK(!c.seed);
}

TEST_CASE("unknown keys and bad values name their line") {
    CHECK(error_line("model:\n  id: chain\n  colour: red\ntime: {end: 1}\n") == 3);
    CHECK(error_field("model:\n  id: chain\n  colour: red\ntime: {end: 1}\n") == "model.colour");
    CHECK(error_line("model: {id: pwl}\ntime: {end: 1}\nintegrator:\n  reltol: 1e-9\n") == 4);
    CHECK(error_field("model: {id: pwl}\ntime: {end: 1}\nintegrator:\n  reltol: 1e-9\n") ==
          "integrator.reltol");
    CHECK(error_field("model: {id: pwl, params: {epsilon: 0.1}}\ntime: {end: 1}\n") ==
          "model.params.epsilon");
    CHECK(error_line("model: {id: pwl}\ntime:\n  end: 1x\n") == 3);
    CHECK(error_field("model: {id: nope}\ntime: {end: 1}\n") == "model.id");
    CHECK(error_field("model: {id: pwl}\n") == "time");
    // Cross-field failure located at the offending key.
    CHECK(error_line("model: {id: pwl}\ntime:\n  start: 3\n  end: 1\n") == 4);
    CHECK_THROWS_AS(parse_config("model: [unclosed\n"), ConfigError);
}

TEST_CASE("compatibility table") {
    CHECK(transform_compatible("chain", "unfold-two-sided"));
    CHECK(transform_compatible("inelastic", "ivanov"));
    CHECK(transform_compatible("duffing", "time-decomposition"));
    CHECK(transform_compatible("cubic-damping", "theta-substitution"));
    CHECK(transform_compatible("pwl", "nstt-asymptotic"));
    CHECK(transform_compatible("one-sided", "unfold-one-sided"));
    CHECK(!transform_compatible("chain", "ivanov"));
    CHECK(!transform_compatible("pwl", "time-decomposition"));
    for (const auto& m : model_catalog()) CHECK(transform_compatible(m.id, "none"));
    CHECK(error_field("model: {id: chain}\ntransform: ivanov\ninitial_state: [0,0,0,0]\n"
                      "time: {end: 1}\n") == "transform");
}

TEST_CASE("stochastic models need a seed; state sizes are checked") {
    CHECK(error_field("model: {id: duffing}\ntime: {end: 1}\n") == "seed");
    CHECK(parse_config("model: {id: duffing}\ntime: {end: 1}\nseed: 7\n").seed == 7u);
    CHECK(error_field("model: {id: duffing}\ntime: {end: 1}\nseed: -1\n") == "seed");
    CHECK(error_field("model: {id: inelastic}\ntime: {end: 1}\n") == "initial_state");
    CHECK(error_field("model: {id: inelastic}\ninitial_state: [1]\ntime: {end: 1}\n") ==
          "initial_state");
    CHECK(error_field("model: {id: chain}\ninitial_state: [1.5, 0, 0, 0]\ntime: {end: 1}\n") ==
          "initial_state");
    // Three masses need six components.
    const auto c = parse_config(
        "model: {id: chain, params: {masses: 3}}\ninitial_state: [0,0,0,1,0,0]\ntime: {end: 1}\n");
    CHECK(c.params.at("k3") == 1.0);
    CHECK(error_field("model: {id: chain, params: {k3: 1}}\ninitial_state: [0,0,0,0]\n"
                      "time: {end: 1}\n") == "model.params.k3");
}

TEST_CASE("config hash") {
    const auto a = parse_config(chain_text);
    auto b = a;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.output_dir = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.params["k1"] = 1.0000000000000002;
    CHECK(config_hash(a) != config_hash(b));
    // Reference FNV-1a 64 values.
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("set_config_value") {
    auto c = parse_config(chain_text);
    set_config_value(c, "k1", 3.0);
    CHECK(c.params.at("k1") == 3.0);
    set_config_value(c, "integrator.rel_tol", 1e-8);
    CHECK(c.integrator.rel_tol == 1e-8);
    set_config_value(c, "initial_state.2", 0.7);
    CHECK(c.initial_state[2] == 0.7);
    set_config_value(c, "seed", 12);
    CHECK(*c.seed == 12u);
    CHECK_THROWS_AS(set_config_value(c, "k9", 1.0), ConfigError);
    CHECK_THROWS_AS(set_config_value(c, "masses", 3.0), ConfigError);
    CHECK_THROWS_AS(set_config_value(c, "initial_state.4", 1.0), ConfigError);
    CHECK_THROWS_AS(set_config_value(c, "k1", -1.0), ConfigError);
}
