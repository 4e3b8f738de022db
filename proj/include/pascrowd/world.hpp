#pragma once

#include "pascrowd/config.hpp"
#include "pascrowd/types.hpp"

#include <cstdint>

namespace pascrowd {

/// Distance below which an agent counts as standing at its goal.
inline constexpr double kGoalTolerance = 0.1;

/// Circle-crossing scenario: humans on a noisy circle heading to the antipode
/// of their start, robot spawned in the square at least
/// robot_min_goal_distance from its goal at the origin. Deterministic in
/// (cfg, seed).
WorldState sample_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

/// Holonomic robot update: acceleration clamp, then speed clamp, then
/// explicit Euler position update.
RobotAgent apply_command(const RobotAgent& robot, const VelocityCommand& cmd, double dt);

/// Advances humans with ORCA (robot excluded from their neighbor sets) and
/// the robot with apply_command.
WorldState step_world(const WorldState& world, const VelocityCommand& cmd, const OrcaParams& params);

/// Smallest robot-to-human surface distance; +infinity with no humans.
double min_separation(const WorldState& world);

/// Smallest pairwise human-to-human surface distance; +infinity with < 2 humans.
double min_human_separation(const WorldState& world);

inline double goal_distance(const RobotAgent& robot) { return (robot.goal - robot.position).norm(); }

}  // namespace pascrowd
