#include "pascrowd/world.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace pascrowd;

TEST_CASE("sample_scenario without noise places humans symmetrically") {
  ScenarioConfig cfg;
  cfg.position_noise_halfwidth = 0.0;
  const WorldState w = sample_scenario(cfg, 12345);
  REQUIRE(w.humans.size() == 6);
  CHECK(w.humans[0].position.x() == doctest::Approx(4.0));
  CHECK(w.humans[0].position.y() == doctest::Approx(0.0));
  CHECK(w.humans[0].goal.x() == doctest::Approx(-4.0));
  CHECK(w.humans[0].goal.y() == doctest::Approx(0.0));
  const double a = std::numbers::pi / 3;
  CHECK(w.humans[1].position.x() == doctest::Approx(4 * std::cos(a)));
  CHECK(w.humans[1].position.y() == doctest::Approx(4 * std::sin(a)));
  CHECK((w.humans[1].goal + w.humans[1].position).norm() == doctest::Approx(0.0));
  CHECK(w.robot.goal == Vector2::Zero());
}

TEST_CASE("sample_scenario respects ranges over 10000 seeds") {
  const ScenarioConfig cfg;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const WorldState w = sample_scenario(cfg, seed);
    REQUIRE(w.humans.size() == 6);
    for (const auto& h : w.humans) {
      REQUIRE(h.radius >= 0.3);
      REQUIRE(h.radius < 0.4);
      REQUIRE(h.preferred_speed >= 0.5);
      REQUIRE(h.preferred_speed < 1.5);
      REQUIRE((h.goal + h.position).norm() == 0.0);
    }
    REQUIRE(w.robot.position.norm() >= 6.0);
    REQUIRE(std::abs(w.robot.position.x()) <= 5.0);
    REQUIRE(std::abs(w.robot.position.y()) <= 5.0);
    REQUIRE(w.robot.radius == 0.3);
  }
}

TEST_CASE("sample_scenario is a pure function of the seed") {
  const ScenarioConfig cfg;
  const WorldState a = sample_scenario(cfg, 99);
  const WorldState b = sample_scenario(cfg, 99);
  const WorldState c = sample_scenario(cfg, 100);
  CHECK(a.robot.position == b.robot.position);
  for (std::size_t i = 0; i < a.humans.size(); ++i) {
    CHECK(a.humans[i].position == b.humans[i].position);
    CHECK(a.humans[i].radius == b.humans[i].radius);
  }
  CHECK(a.robot.position != c.robot.position);
}

TEST_CASE("sample_scenario: human sub-streams do not depend on the crowd size") {
  ScenarioConfig six;
  ScenarioConfig seven;
  seven.human_count = 7;
  const WorldState a = sample_scenario(six, 5);
  const WorldState b = sample_scenario(seven, 5);
  CHECK(a.robot.position == b.robot.position);
  CHECK(a.humans[0].radius == b.humans[0].radius);
  CHECK(a.humans[3].preferred_speed == b.humans[3].preferred_speed);
}

TEST_CASE("sample_scenario fails when the spawn constraint is unsatisfiable") {
  ScenarioConfig cfg;
  cfg.robot_min_goal_distance = 7.1;  // half-diagonal is 7.07
  CHECK_THROWS_AS(sample_scenario(cfg, 1), Error);
}

TEST_CASE("apply_command clamps acceleration then speed") {
  RobotAgent r;
  SUBCASE("acceleration clamp from rest") {
    const RobotAgent n = apply_command(r, {Vector2(2, 0)}, 0.25);
    CHECK(n.velocity.x() == doctest::Approx(0.25));
    CHECK(n.velocity.y() == 0.0);
    CHECK(n.position.x() == doctest::Approx(0.0625));
  }
  SUBCASE("steady state") {
    r.velocity = Vector2(2, 0);
    const RobotAgent n = apply_command(r, {Vector2(2, 0)}, 0.25);
    CHECK(n.velocity.x() == doctest::Approx(2.0));
    CHECK(n.position.x() == doctest::Approx(0.5));
  }
  SUBCASE("speed clamp") {
    r.velocity = Vector2(2, 0);
    const RobotAgent n = apply_command(r, {Vector2(3, 0)}, 0.25);
    CHECK(n.velocity.x() == doctest::Approx(2.0));
  }
  SUBCASE("NaN command") {
    CHECK_THROWS_AS(apply_command(r, {Vector2(std::nan(""), 0)}, 0.25), Error);
  }
  SUBCASE("non-positive dt") {
    CHECK_THROWS_AS(apply_command(r, {Vector2(1, 0)}, 0.0), Error);
  }
}

TEST_CASE("step_world") {
  const OrcaParams params;
  SUBCASE("zero humans only moves the robot") {
    WorldState w;
    w.robot.position = Vector2(6, 0);
    const WorldState n = step_world(w, {Vector2(-2, 0)}, params);
    CHECK(n.humans.empty());
    CHECK(n.step_index == 1);
    CHECK(n.time == 0.25);
    CHECK(n.robot.position.x() == doctest::Approx(6 - 0.0625));
  }
  SUBCASE("a human at its goal stands still") {
    WorldState w;
    w.robot.position = Vector2(6, 0);
    HumanAgent h;
    h.position = Vector2(1, 1);
    h.goal = Vector2(1, 1);
    h.velocity = Vector2(0.3, 0);
    w.humans.push_back(h);
    const WorldState n = step_world(w, {}, params);
    CHECK(n.humans[0].position == h.position);
    CHECK(n.humans[0].velocity == Vector2::Zero());
  }
  SUBCASE("bit-identical for identical inputs") {
    const WorldState w = sample_scenario(ScenarioConfig{}, 3);
    WorldState a = w;
    WorldState b = w;
    for (int i = 0; i < 50; ++i) {
      a = step_world(a, {Vector2(0.3, -0.7)}, params);
      b = step_world(b, {Vector2(0.3, -0.7)}, params);
    }
    CHECK(a.robot.position == b.robot.position);
    for (std::size_t i = 0; i < a.humans.size(); ++i) CHECK(a.humans[i].position == b.humans[i].position);
  }
}

TEST_CASE("kinematic and speed bounds hold along random rollouts") {
  const OrcaParams params;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4, 4);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    WorldState w = sample_scenario(ScenarioConfig{}, seed);
    for (int t = 0; t < 100; ++t) {
      const WorldState n = step_world(w, {Vector2(u(rng), u(rng))}, params);
      REQUIRE((n.robot.velocity - w.robot.velocity).norm() <= 1.0 * 0.25 + 1e-9);
      REQUIRE(n.robot.velocity.norm() <= 2.0 + 1e-9);
      for (const auto& h : n.humans) REQUIRE(h.velocity.norm() <= h.preferred_speed + 1e-9);
      w = n;
    }
  }
}

TEST_CASE("min_separation is a surface distance") {
  WorldState w;
  w.robot.radius = 0.3;
  CHECK(std::isinf(min_separation(w)));
  HumanAgent h;
  h.radius = 0.4;
  h.position = Vector2(1, 0);
  w.humans = {h};
  CHECK(min_separation(w) == doctest::Approx(0.3));
  w.humans[0].position = Vector2(0.5, 0);
  CHECK(min_separation(w) == doctest::Approx(-0.2));
  h.position = Vector2(0, 1.0);
  HumanAgent g = h;
  g.position = Vector2(0.8, 0);
  w.humans = {h, g};
  CHECK(min_separation(w) == doctest::Approx(0.1));
}
