#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "secd/config.hpp"

using namespace secd;

TEST_CASE("an empty object keeps the reference defaults") {
    const PipelineConfig c = parse_config("{}");
    CHECK(c.seed == 42u);
    CHECK(c.limits.v_min == 0.9);
    CHECK(c.limits.v_max == 1.1);
    CHECK(c.limits.i_max == 0.249);
    CHECK(c.dataset.samples == 10000u);
    CHECK(c.dataset.unsafe_fraction == 0.6);
    CHECK(c.dataset.train_fraction == 0.7);
    CHECK(c.train.hidden == std::vector<int>{8, 8});
    CHECK(c.widths(99) == std::vector<int>{99, 8, 8, 2});
    CHECK(c.scenario.thermal.capacitance == 1.0);
    CHECK(c.scenario.thermal.resistance == 50.0);
    CHECK(c.scenario.thermal.cop == 3.6);
    CHECK(c.scenario.comfort.theta_min == 24.0);
    CHECK(c.scenario.comfort.theta_max == 28.0);
    CHECK(c.scenario.price_buy == 0.1122);
    CHECK(c.scenario.price_sell == 0.056);
    CHECK(c.dispatch.safety_margin == 4.0);
    CHECK(c.dispatch.node_limit == 150u);
    c.validate();
}

TEST_CASE("the shipped reference config parses and validates") {
    const PipelineConfig c = load_config(std::filesystem::path(SECD_SOURCE_DIR) / "config/reference.json");
    c.validate();
    CHECK(c.scenario.pv_capacity == 1.0);
    CHECK(c.dataset.sampling.pv_capacity == 1.5);
    const DispatchOptions o = c.dispatch.options(DispatchMode::NoFlex);
    CHECK(o.p2.mode == DispatchMode::NoFlex);
    CHECK(o.p2.safety_margin == 4.0);
    CHECK(o.solver.node_limit == 150u);
}

TEST_CASE("unknown keys and bad values are rejected") {
    CHECK_THROWS_AS(parse_config("{\"sead\": 1}"), ParseError);
    CHECK_THROWS_AS(parse_config("{\"dispatch\": {\"margin\": 1}}"), ParseError);
    CHECK_THROWS_AS(parse_config("{\"dataset\": {\"sampling\": {\"rho\": 1}}}"), ParseError);
    CHECK_THROWS_AS(parse_config("{\"seed\": \"x\"}"), ParseError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), ParseError);
    CHECK_THROWS_AS(parse_config("{"), ParseError);
    CHECK_THROWS_AS(parse_config("{\"dataset\": {\"unsafe_fraction\": 1.5}}").validate(), InvalidArgument);
    CHECK_THROWS_AS(parse_config("{\"limits\": {\"v_min\": 1.2}}").validate(), InvalidArgument);
    CHECK_THROWS_AS(parse_config("{\"train\": {\"hidden\": [8, 0]}}").validate(), InvalidArgument);
}

TEST_CASE("serialization round trips") {
    PipelineConfig c;
    c.seed = 7;
    c.dataset.samples = 123;
    c.train.hidden = {4, 6, 5};
    c.scenario.load_profile = {1.0, 0.5};
    c.scenario.horizon = 2;
    c.dispatch.encoding.tighten = false;
    c.validation.current_tolerance_ka = 0.01;
    const PipelineConfig back = parse_config(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.train.hidden == c.train.hidden);
    CHECK(back.scenario.load_profile == c.scenario.load_profile);
    CHECK_FALSE(back.dispatch.encoding.tighten);
}
