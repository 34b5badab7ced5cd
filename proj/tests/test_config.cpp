#include <doctest.h>

#include "obstructa/config.hpp"
#include "obstructa/num.hpp"

using namespace obstructa;

TEST_CASE("every builtin loads and round-trips through JSON") {
  for (const auto& name : builtin_names()) {
    auto cfg = make_builtin(name);
    CHECK(cfg.name == name);
    auto j = config_to_json(cfg);
    auto back = config_from_json(j);
    CHECK(config_to_json(back).dump() == j.dump());

    // dynamic equivalence of the reparsed dynamics
    if (!cfg.dynamics.empty()) {
      SplitMix64 rng(99);
      for (int trial = 0; trial < 20; ++trial) {
        VarAssignment a;
        for (const auto& n : cfg.space->names())
          a.set(n, rng.uniform(-1, 1));
        for (const auto& c : cfg.controls) a.set(c, rng.uniform(-1, 1));
        for (std::size_t i = 0; i < cfg.dynamics.size(); ++i)
          CHECK(cfg.dynamics[i].eval(a) ==
                doctest::Approx(back.dynamics[i].eval(a)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("unknown builtin names are rejected") {
  CHECK_THROWS_AS(make_builtin("pendulum"), ConfigError);
}

TEST_CASE("unknown keys are rejected with a location") {
  nlohmann::json j = {
      {"name", "x"},
      {"space",
       {{"coordinates", {{{"name", "x"}, {"kind", "real"}}}}}},
      {"dinamics", {"0"}}};
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("dinamics") != std::string::npos);
  }
}

TEST_CASE("bad expressions carry their location") {
  nlohmann::json j = {
      {"name", "x"},
      {"space",
       {{"coordinates", {{{"name", "x"}, {"kind", "real"}}}}}},
      {"dynamics", {"x +"}}};
  try {
    config_from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("config.dynamics[0]") !=
          std::string::npos);
  }
}

TEST_CASE("dimension mismatches surface at load time") {
  nlohmann::json j = {
      {"name", "x"},
      {"space",
       {{"coordinates",
         {{{"name", "x"}, {"kind", "real"}},
          {{"name", "y"}, {"kind", "real"}}}}}},
      {"dynamics", {"x"}}};
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
}

TEST_CASE("region JSON round trip") {
  auto cfg = make_builtin("unicycle");
  const Region& camera = cfg.region("camera_n1");
  auto j = region_to_json(camera);
  Region back = region_from_json(cfg.space, j, "test");
  CHECK(back.base_kind() == Region::BaseKind::Annulus);
  CHECK(back.obstacle_count() == 1);
  CHECK(back.constraints().size() == 1);
  CHECK(region_to_json(back).dump() == j.dump());

  CHECK_THROWS_AS(
      region_from_json(cfg.space, {{"base", {{"kind", "cube"}}}}, "test"),
      ConfigError);
  CHECK_THROWS_AS(region_from_json(cfg.space,
                                   {{"base", {{"kind", "ball"}}},
                                    {"bogus", 1}},
                                   "test"),
                  ConfigError);
}

TEST_CASE("builtin registry content matches the named systems") {
  auto heis = make_builtin("heisenberg");
  CHECK(heis.dynamics[2].eval(
            {{"x", 1.0}, {"y", 2.0}, {"u", 3.0}, {"v", 4.0}}) == 2.0);
  CHECK(heis.affine.has_value());
  CHECK(heis.regions.count("unit_box") == 1);

  auto uni = make_builtin("unicycle");
  CHECK(uni.dynamics[0].eval({{"th", 0.0}, {"u", 5.0}}) == 5.0);
  CHECK(uni.space->kind(2) == FactorKind::Angle);

  auto ex3 = make_builtin("ex3_field");
  CHECK(ex3.dynamics[1].eval({{"x", 1.0}, {"y", 2.0}}) == 16.0);
  CHECK(ex3.controls.empty());

  auto ex4 = make_builtin("ex4_field");
  CHECK(ex4.dynamics[1].eval({{"x", 1.0}, {"y", 2.0}}) == 4.0);

  auto disk = make_builtin("vertical_disk");
  CHECK(disk.lagrangian.has_value());
  CHECK(disk.lagrangian->constraints.rows == 2);
  CHECK(disk.dynamics.empty());
  auto sys = disk.lagrangian_system();
  CHECK(sys.dof() == 4);
  CHECK(sys.control_dim() == 2);
}
