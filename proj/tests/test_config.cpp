#include <doctest.h>

#include "footsim/config.hpp"

using namespace footsim;

TEST_CASE("config round trips through its canonical JSON") {
    RunConfig cfg;
    cfg.sim.seed = 42;
    cfg.reward.nts_enabled = false;
    cfg.train.residual = true;
    cfg.scenario.id = "match";
    cfg.scenario.formation_anchors = {{-40.0, 0.0}, {-5.0, 6.0}, {-30.0, -8.0}};
    cfg.scenario.chase.lead_time = 0.4;
    cfg.protocol_scale = 0.25;
    const RunConfig back = parse_config(to_json(cfg));
    CHECK(to_json(back) == to_json(cfg));
    CHECK(config_hash(back) == config_hash(cfg));
    CHECK(back.sim.seed == 42);
    CHECK(!back.reward.nts_enabled);
    REQUIRE(back.train.residual);
    CHECK(*back.train.residual);
    CHECK(back.scenario.formation_anchors.size() == 3);
    CHECK(back.scenario.chase.lead_time == 0.4);
}

TEST_CASE("partial configs keep defaults and every field feeds the hash") {
    const RunConfig def = parse_config("{}");
    CHECK(config_hash(def) == config_hash(RunConfig{}));
    const RunConfig g = parse_config(R"({"sim": {"gravity": 9.81}})");
    CHECK(g.sim.gravity == 9.81);
    CHECK(g.sim.dt_sim == SimConfig{}.dt_sim);
    CHECK(config_hash(g) != config_hash(def));
    const RunConfig t = parse_config(R"({"train": {"residual": null}, "rollout": {"degcl_fraction": 0.5}})");
    CHECK(!t.train.residual);
    CHECK(config_hash(t) != config_hash(def));
}

TEST_CASE("derived configs carry the shared sections") {
    RunConfig cfg;
    cfg.sim.gravity = 9.7;
    cfg.reward.move_coeff = 0.3;
    cfg.episode.use_sti = false;
    CHECK(cfg.train_config().rollout.sim.gravity == 9.7);
    CHECK(!cfg.train_config().rollout.episode.use_sti);
    CHECK(cfg.scenario_config().reward.move_coeff == 0.3);
    const ProtocolConfig p = cfg.protocol_config();
    CHECK(p.config_hash == config_hash(cfg));
    CHECK(p.sim.gravity == 9.7);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("{"), Error);
    CHECK_THROWS_AS(parse_config("[]"), Error);
    CHECK_THROWS_AS(parse_config(R"({"physics": {}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"sim": {"gravty": 9.8}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"sim": {"gravity": "high"}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"sim": {"gravity": -1}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"scenario": {"chase": {"sped": 3}}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"scenario": {"formation_anchors": [[1]]}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"protocol": {"scale": 0}})"), Error);
    CHECK_THROWS_AS(load_config("/nonexistent/footsim.json"), Error);
}
