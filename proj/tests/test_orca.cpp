#include "oracles.hpp"
#include "pascrowd/ogm.hpp"
#include "pascrowd/orca.hpp"
#include "pascrowd/world.hpp"

#include <doctest.h>

#include <random>

using namespace pascrowd;

TEST_CASE("preferred_velocity") {
  CHECK(preferred_velocity(Vector2(0, 0), Vector2(10, 0), 1.0, 0.25) == Vector2(1, 0));
  CHECK(preferred_velocity(Vector2(3, 3), Vector2(3, 3), 1.0, 0.25) == Vector2::Zero());
  const Vector2 near = preferred_velocity(Vector2(0, 0), Vector2(0.1, 0), 1.0, 0.25);
  CHECK(near.x() == doctest::Approx(0.4));
  CHECK(near.y() == 0.0);
}

TEST_CASE("orca_lines neighbor filtering") {
  const OrcaParams params;
  const OrcaAgent self{Vector2(0, 0), Vector2(1, 0), 0.3};
  CHECK(orca_lines(self, {}, params).empty());
  const std::vector<OrcaAgent> far = {{Vector2(20, 0), Vector2::Zero(), 0.3}};
  CHECK(orca_lines(self, far, params).empty());

  OrcaParams few = params;
  few.max_neighbors = 2;
  const std::vector<OrcaAgent> many = {{Vector2(5, 0), Vector2::Zero(), 0.3},
                                       {Vector2(2, 0), Vector2::Zero(), 0.3},
                                       {Vector2(0, 3), Vector2::Zero(), 0.3}};
  const auto lines = orca_lines(self, many, few);
  CHECK(lines.size() == 2);
  for (const auto& l : lines) CHECK(l.direction.norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("non-colliding line excludes the velocity obstacle apex region") {
  // Self heading straight at a static neighbor: current velocity must be cut.
  OrcaParams params;
  params.reciprocity_share = 1.0;
  const OrcaAgent self{Vector2(0, 0), Vector2(1, 0), 0.3};
  const std::vector<OrcaAgent> other = {{Vector2(2, 0), Vector2::Zero(), 0.3}};
  const auto lines = orca_lines(self, other, params);
  REQUIRE(lines.size() == 1);
  CHECK(violation(lines[0], self.velocity) > 0.0);
  // Exact head-on: the tie goes to the left leg, so the line steers left (+y).
  const Vector2 v = solve_velocity(lines, Vector2(1, 0), 1.0).velocity;
  CHECK(v.y() > 0.0);
}

TEST_CASE("overlapping discs: permitted velocities resolve penetration within one step") {
  // Centers 0.5 m apart, radii 0.3 and 0.4. The oracle samples candidate
  // velocities and checks the one-step separation directly.
  OrcaParams params;
  params.reciprocity_share = 1.0;
  const OrcaAgent self{Vector2(0, 0), Vector2(0.2, 0.1), 0.3};
  const OrcaAgent other{Vector2(0.5, 0), Vector2(-0.1, 0.0), 0.4};
  const std::vector<OrcaAgent> others = {other};
  const auto lines = orca_lines(self, others, params);
  REQUIRE(lines.size() == 1);
  const OrcaLine& line = lines[0];
  CHECK(violation(line, self.velocity) > 0.0);

  const double combined = 0.7;
  auto separation_after = [&](const Vector2& v) {
    return ((other.position + other.velocity * params.dt) - (self.position + v * params.dt)).norm();
  };
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4, 4);
  int permitted = 0;
  double tightest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10000; ++i) {
    const Vector2 v(u(rng), u(rng));
    if (violation(line, v) > 0.0) continue;
    ++permitted;
    const double sep = separation_after(v);
    REQUIRE(sep >= combined - 1e-9);
    tightest = std::min(tightest, sep);
  }
  CHECK(permitted > 1000);
  // The half-plane is tangent to the penetration disc, not a loose bound.
  CHECK(tightest < combined + 0.05);
  CHECK(separation_after(self.velocity) < combined);
}

TEST_CASE("coincident centers fall back to the +x separation axis") {
  OrcaParams params;
  const OrcaAgent self{Vector2(1, 1), Vector2::Zero(), 0.3};
  const std::vector<OrcaAgent> other = {{Vector2(1, 1), Vector2::Zero(), 0.3}};
  const auto a = orca_lines(self, other, params);
  const auto b = orca_lines(self, other, params);
  REQUIRE(a.size() == 1);
  CHECK(a[0].point == b[0].point);
  CHECK(a[0].direction.x() == doctest::Approx(0.0));
  CHECK(a[0].direction.y() == doctest::Approx(-1.0));
}

TEST_CASE("human_policy_step") {
  const OrcaParams params;
  SUBCASE("lone human walks at its preferred velocity") {
    WorldState w;
    HumanAgent h;
    h.position = Vector2(-4, 0);
    h.goal = Vector2(4, 0);
    h.preferred_speed = 1.2;
    w.humans = {h};
    const auto v = human_policy_step(w, params);
    CHECK(v[0].x() == doctest::Approx(1.2));
    CHECK(v[0].y() == doctest::Approx(0.0));
  }
  SUBCASE("robot on the path is ignored") {
    WorldState w = sample_scenario(ScenarioConfig{}, 42);
    WorldState with_robot = w;
    with_robot.robot.position = w.humans[0].position + Vector2(-0.6, 0);
    with_robot.robot.velocity = Vector2(1, 0);
    const auto a = human_policy_step(w, params);
    const auto b = human_policy_step(with_robot, params);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
  SUBCASE("mirror scene across the x axis mirrors every velocity") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      WorldState w = sample_scenario(ScenarioConfig{}, seed);
      for (int t = 0; t < 10; ++t) w = step_world(w, {}, params);
      WorldState m = w;
      auto flip = [](Vector2& v) { v.y() = -v.y(); };
      for (auto& h : m.humans) {
        flip(h.position);
        flip(h.velocity);
        flip(h.goal);
      }
      const auto a = human_policy_step(w, params);
      const auto b = human_policy_step(m, params);
      for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(std::abs(a[i].x() - b[i].x()) <= 1e-9);
        REQUIRE(std::abs(a[i].y() + b[i].y()) <= 1e-9);
      }
    }
  }
}

TEST_CASE("orca_robot_policy") {
  const OrcaParams params;
  WorldState w;
  w.robot.position = Vector2(6, 0);
  SUBCASE("no humans: full speed toward the goal") {
    const auto cmd = orca_robot_policy(w, {}, params);
    CHECK(cmd.desired_velocity.x() == doctest::Approx(-2.0));
    CHECK(cmd.desired_velocity.y() == doctest::Approx(0.0));
  }
  SUBCASE("occluded human is ignored by OBS but not GT") {
    HumanAgent front;
    front.position = Vector2(5, 0);
    front.radius = 0.35;
    HumanAgent hidden = front;
    hidden.position = Vector2(3.5, 0);
    hidden.velocity = Vector2(2, 0);
    hidden.radius = 0.3;
    w.humans = {front, hidden};
    GridSpec spec = grid_around(GridSpec{}, w.robot.position);
    const auto detected = detected_agents(w, spec, 3.0);
    REQUIRE(detected == std::vector<int>{0});
    // Oracle: every cell of the hidden disc has its sight line blocked.
    for (int r = 0; r < spec.height_cells; ++r) {
      for (int c = 0; c < spec.width_cells; ++c) {
        const Vector2 q = spec.cell_center(r, c);
        if ((q - hidden.position).norm() >= hidden.radius) continue;
        CHECK(oracle::segment_hits_disc(w.robot.position, q, front.position, front.radius));
      }
    }
    OrcaParams robot = params;
    robot.reciprocity_share = 1.0;
    const std::vector<OrcaAgent> seen = {orca_view(front)};
    const std::vector<OrcaAgent> all = {orca_view(front), orca_view(hidden)};
    CHECK(orca_lines(orca_view(w.robot), all, robot).size() > orca_lines(orca_view(w.robot), seen, robot).size());
    const std::vector<int> everyone = {0, 1};
    const auto gt = orca_robot_policy(w, everyone, params);
    const auto obs = orca_robot_policy(w, detected, params);
    CHECK(gt.desired_velocity != obs.desired_velocity);
  }
  SUBCASE("GT and OBS agree when everyone is visible") {
    HumanAgent h;
    h.position = Vector2(4.5, 1.0);
    w.humans = {h};
    const auto detected = detected_agents(w, grid_around(GridSpec{}, w.robot.position), 3.0);
    REQUIRE(detected.size() == 1);
    const std::vector<int> everyone = {0};
    CHECK(orca_robot_policy(w, everyone, params).desired_velocity ==
          orca_robot_policy(w, detected, params).desired_velocity);
  }
}
