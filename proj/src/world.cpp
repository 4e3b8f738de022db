#include "pascrowd/world.hpp"

#include "pascrowd/orca.hpp"
#include "pascrowd/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace pascrowd {

namespace {

constexpr int kMaxSpawnAttempts = 1000;

// Sub-stream indices; human i draws from kHumanStreamBase + i.
constexpr std::uint64_t kRobotStream = 0;
constexpr std::uint64_t kHumanStreamBase = 1;

Vector2 clamp_norm(const Vector2& v, double limit) {
  const double n = v.norm();
  return n > limit ? Vector2(v * (limit / n)) : v;
}

}  // namespace

WorldState sample_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  WorldState world;
  world.seed = seed;

  world.humans.reserve(cfg.human_count);
  for (int i = 0; i < cfg.human_count; ++i) {
    Stream rng(seed, kHumanStreamBase + i);
    const double angle = 2.0 * std::numbers::pi * i / cfg.human_count;
    const double w = cfg.position_noise_halfwidth;
    HumanAgent h;
    h.position = cfg.circle_radius * Vector2(std::cos(angle), std::sin(angle)) +
                 Vector2(rng.uniform(-w, w), rng.uniform(-w, w));
    h.goal = -h.position;
    h.radius = rng.uniform(cfg.human_radius_min, cfg.human_radius_max);
    h.preferred_speed = rng.uniform(cfg.human_speed_min, cfg.human_speed_max);
    world.humans.push_back(h);
  }

  Stream rng(seed, kRobotStream);
  RobotAgent& robot = world.robot;
  robot.radius = cfg.robot_radius;
  robot.max_speed = cfg.robot_max_speed;
  robot.max_accel = cfg.robot_max_accel;
  robot.goal = Vector2::Zero();
  const double half = cfg.robot_spawn_square_halfwidth;
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxSpawnAttempts) throw Error("sample_scenario: robot spawn rejection sampling exhausted");
    robot.position = Vector2(rng.uniform(-half, half), rng.uniform(-half, half));
    if ((robot.position - robot.goal).norm() >= cfg.robot_min_goal_distance) break;
  }
  return world;
}

RobotAgent apply_command(const RobotAgent& robot, const VelocityCommand& cmd, double dt) {
  if (!(dt > 0)) throw Error("apply_command: dt must be positive");
  if (!is_finite(cmd.desired_velocity)) throw Error("apply_command: non-finite command");
  RobotAgent next = robot;
  const Vector2 dv = clamp_norm(cmd.desired_velocity - robot.velocity, robot.max_accel * dt);
  next.velocity = clamp_norm(robot.velocity + dv, robot.max_speed);
  next.position = robot.position + next.velocity * dt;
  return next;
}

WorldState step_world(const WorldState& world, const VelocityCommand& cmd, const OrcaParams& params) {
  const double dt = params.dt;
  WorldState next = world;
  const std::vector<Vector2> velocities = human_policy_step(world, params);
  for (std::size_t i = 0; i < next.humans.size(); ++i) {
    HumanAgent& h = next.humans[i];
    if ((h.goal - h.position).norm() < kGoalTolerance) {
      h.velocity = Vector2::Zero();
      continue;
    }
    h.velocity = velocities[i];
    h.position += h.velocity * dt;
  }
  next.robot = apply_command(world.robot, cmd, dt);
  next.step_index = world.step_index + 1;
  next.time = static_cast<double>(next.step_index) * dt;
  return next;
}

double min_separation(const WorldState& world) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : world.humans) {
    best = std::min(best, (world.robot.position - h.position).norm() - world.robot.radius - h.radius);
  }
  return best;
}

double min_human_separation(const WorldState& world) {
  double best = std::numeric_limits<double>::infinity();
  const auto& hs = world.humans;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      best = std::min(best, (hs[i].position - hs[j].position).norm() - hs[i].radius - hs[j].radius);
    }
  }
  return best;
}

}  // namespace pascrowd
