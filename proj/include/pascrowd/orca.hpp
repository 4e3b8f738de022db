#pragma once

#include "pascrowd/config.hpp"
#include "pascrowd/linear_program.hpp"
#include "pascrowd/types.hpp"

#include <span>
#include <vector>

namespace pascrowd {

/// Kinematic view of an agent as seen by ORCA.
struct OrcaAgent {
  Vector2 position = Vector2::Zero();
  Vector2 velocity = Vector2::Zero();
  double radius = 0.0;
};

inline OrcaAgent orca_view(const HumanAgent& h) { return {h.position, h.velocity, h.radius}; }
inline OrcaAgent orca_view(const RobotAgent& r) { return {r.position, r.velocity, r.radius}; }

/// Unit vector toward `goal` scaled by min(speed, distance / dt); zero within
/// kGoalTolerance of the goal.
Vector2 preferred_velocity(const Vector2& position, const Vector2& goal, double speed, double dt);
Vector2 preferred_velocity(const HumanAgent& human, double dt);
Vector2 preferred_velocity(const RobotAgent& robot, double dt);

/// One half-plane per neighbor within neighbor_distance (nearest
/// max_neighbors, ties by input order), each shifted by reciprocity_share of
/// the minimal correction.
std::vector<OrcaLine> orca_lines(const OrcaAgent& self, std::span<const OrcaAgent> neighbors,
                                 const OrcaParams& params);

/// New velocities for every human from the same snapshot. The robot is never
/// a neighbor.
std::vector<Vector2> human_policy_step(const WorldState& world, const OrcaParams& params);

/// Robot ORCA over the given humans with reciprocity_share forced to 1.
/// Passing every index gives GT-ORCA; passing detected ones gives OBS-ORCA.
VelocityCommand orca_robot_policy(const WorldState& world, std::span<const int> detected_humans,
                                  const OrcaParams& params);

}  // namespace pascrowd
