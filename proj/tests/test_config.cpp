#include "doctest.h"

#include "imc/config.hpp"
#include "imc/errors.hpp"

using namespace imc;

TEST_CASE("empty config is the reference experiment") {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text("{}");
    CHECK(cfg.sim.chain.order == 2);
    CHECK(cfg.sim.graph.n() == 4);
    CHECK(cfg.sim.design.c0 == 6);
    CHECK(cfg.sim.design.c1 == 20.0);
    CHECK(cfg.sim.design.c2 == 10.0);
    CHECK(cfg.sim.design.c3 == 3.0);
    CHECK(cfg.sim.schedule.on_lo == 0.5);
    CHECK(cfg.sim.schedule.on_hi == 2.0);
    CHECK(cfg.sim.schedule.off_fraction == 0.9);
    CHECK(cfg.sim.noise.power == 1.0);
    CHECK(cfg.sim.noise.correlation_time == 0.1);
    CHECK(cfg.sim.noise_seeds == std::vector<std::uint64_t>{23341, 34243, 23343, 34241});
    CHECK(cfg.sim.controller.kappa == 15.0);
    CHECK(cfg.sim.controller.sigma == 0.5);
    CHECK(cfg.sim.controller.gamma == 10.0);
    CHECK(cfg.sim.dt == 1e-3);
    CHECK(cfg.sim.horizon == 20.0);
    CHECK(cfg.sim.plant_model == "reference");
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_WITH_AS(static_cast<void>(ExperimentConfig::from_json_text(R"({"foo": 1})")),
                         doctest::Contains("unknown key"), ValidationError);
    CHECK_THROWS_WITH_AS(
        static_cast<void>(ExperimentConfig::from_json_text(R"({"sim": {"dtt": 0.1}})")),
        doctest::Contains("unknown key"), ValidationError);
    CHECK_THROWS_AS(
        static_cast<void>(ExperimentConfig::from_json_text(R"({"noise": {"seed": 1}})")),
        ValidationError);
}

TEST_CASE("invalid values fail before any stepping") {
    CHECK_THROWS_AS(static_cast<void>(ExperimentConfig::from_json_text(
                        R"({"schedule": {"off_fraction": 1.5}})")),
                    ValidationError);
    CHECK_THROWS_AS(static_cast<void>(ExperimentConfig::from_json_text(R"({"sim": {"dt": 0.0}})")),
                    ValidationError);
    CHECK_THROWS_AS(static_cast<void>(ExperimentConfig::from_json_text("not json")),
                    ValidationError);
}

TEST_CASE("custom graph section") {
    const char* text = R"({
      "system": {"order": 2, "n_followers": 3},
      "graph": {"edges": [[1,2,1.0],[2,3,1.0]], "pinning": [1,0,0]},
      "noise": {"seeds": [5,6,7]}
    })";
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(text);
    CHECK(cfg.sim.graph.n() == 3);
    CHECK(cfg.sim.design.n_followers == 3);
    CHECK(cfg.sim.graph.adjacency()(0, 1) == 1.0);
    CHECK(cfg.sim.graph.adjacency()(0, 2) == 0.0);

    // Pinning length mismatch.
    CHECK_THROWS_AS(static_cast<void>(ExperimentConfig::from_json_text(
                        R"({"system": {"n_followers": 3},
                            "graph": {"edges": [[1,2,1.0]], "pinning": [1,0]},
                            "noise": {"seeds": [5,6,7]}})")),
                    ValidationError);
}

TEST_CASE("overrides rewrite nested values") {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(
        "{}", {"sim.horizon=5.0", "schedule.off_fraction=0", "plant.model=\"zero\""});
    CHECK(cfg.sim.horizon == 5.0);
    CHECK(cfg.sim.schedule.off_fraction == 0.0);
    CHECK(cfg.sim.plant_model == "zero");

    CHECK_THROWS_AS(
        static_cast<void>(ExperimentConfig::from_json_text("{}", {"sim.horizon"})),
        ValidationError);
    CHECK_THROWS_AS(
        static_cast<void>(ExperimentConfig::from_json_text("{}", {"sim.bogus=1"})),
        ValidationError);
}

TEST_CASE("constant reference kind") {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(
        R"({"reference": {"kind": "constant", "value": 0.25}})");
    CHECK(cfg.sim.reference.kind() == ReferenceSignal::Kind::constant);
    CHECK(cfg.sim.reference.eval(3.0, 0) == 0.25);
    CHECK_THROWS_AS(static_cast<void>(ExperimentConfig::from_json_text(
                        R"({"reference": {"kind": "sawtooth"}})")),
                    ValidationError);
}

TEST_CASE("eta0 rows configure the virtual layer start") {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(
        R"({"virtual": {"eta0": [[0.1, 0.0], [0.2, 0.0], [0.3, 0.0], [0.4, 0.0]]}})");
    REQUIRE(cfg.sim.eta0.size() == 8);
    CHECK(cfg.sim.eta0(0, 2) == 0.3);
}
