#include "lp_cases.hpp"
#include "oracles.hpp"
#include "pascrowd/linear_program.hpp"

#include <doctest.h>

#include <random>

using namespace pascrowd;
using testing::LpCase;

TEST_CASE("no constraints returns the preferred velocity clipped to the disc") {
  const std::vector<OrcaLine> none;
  auto s = solve_velocity(none, Vector2(1, 0), 2.0);
  CHECK(s.feasible);
  CHECK(s.velocity == Vector2(1, 0));
  s = solve_velocity(none, Vector2(3, 0), 2.0);
  CHECK(s.velocity.x() == doctest::Approx(2.0));
  CHECK(s.velocity.y() == doctest::Approx(0.0));
}

TEST_CASE("single half-plane projects the preferred velocity") {
  // Permitted side is y >= 0.5 (left of +x through (0, 0.5)).
  const std::vector<OrcaLine> lines = {{Vector2(0, 0.5), Vector2(1, 0)}};
  const auto s = solve_velocity(lines, Vector2(1, 0), 2.0);
  CHECK(s.feasible);
  CHECK(s.velocity.x() == doctest::Approx(1.0));
  CHECK(s.velocity.y() == doctest::Approx(0.5));
}

TEST_CASE("non-positive max speed is rejected") {
  const std::vector<OrcaLine> none;
  CHECK_THROWS_AS(solve_velocity(none, Vector2(1, 0), 0.0), Error);
}

TEST_CASE("infeasible program minimizes the worst violation") {
  // y >= 1 and y <= -1 cannot both hold; best compromise is y = 0.
  const std::vector<OrcaLine> lines = {{Vector2(0, 1), Vector2(1, 0)}, {Vector2(0, -1), Vector2(-1, 0)}};
  const auto s = solve_velocity(lines, Vector2(1, 0), 2.0);
  CHECK_FALSE(s.feasible);
  CHECK(s.velocity.y() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(max_violation<double>(lines, s.velocity) == doctest::Approx(1.0));
}

TEST_CASE("works in single precision") {
  const std::vector<OrcaLineT<float>> lines = {{Vec2<float>(0, 0.5f), Vec2<float>(1, 0)}};
  const auto s = solve_velocity(lines, Vec2<float>(1, 0), 2.0f);
  CHECK(s.velocity.y() == doctest::Approx(0.5f));
}

TEST_CASE("five random half-planes match the dense-sampling oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    LpCase c = testing::random_lp_case(rng, 5);
    while (c.lines.size() < 5) c = testing::random_lp_case(rng, 5);
    const auto s = solve_velocity(c.lines, c.preferred, c.max_speed);
    const auto ref = oracle::dense_sampling_lp(c.lines, c.preferred, c.max_speed, 100 + trial);
    CHECK(s.velocity.norm() <= c.max_speed + 1e-9);
    CHECK(std::abs(testing::objective_gap(c, s.velocity, ref)) <= 2e-3);
  }
}

TEST_CASE("feasible solutions satisfy every half-plane and match vertex enumeration") {
  std::mt19937_64 rng(77);
  int feasible = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const LpCase c = testing::random_lp_case(rng, 8);
    const auto s = solve_velocity(c.lines, c.preferred, c.max_speed);
    REQUIRE(s.velocity.norm() <= c.max_speed + 1e-9);
    const auto exact = oracle::enumerate_lp(c.lines, c.preferred, c.max_speed);
    if (s.feasible) {
      ++feasible;
      for (const auto& l : c.lines) REQUIRE(violation(l, s.velocity) <= 1e-6);
      REQUIRE(exact.feasible);
      REQUIRE((s.velocity - c.preferred).norm() == doctest::Approx(exact.distance).epsilon(1e-6));
    } else {
      REQUIRE_FALSE(exact.feasible);
    }
  }
  CHECK(feasible > 500);
}
