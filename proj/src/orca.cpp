#include "pascrowd/orca.hpp"

#include "pascrowd/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pascrowd {

Vector2 preferred_velocity(const Vector2& position, const Vector2& goal, double speed, double dt) {
  const Vector2 to_goal = goal - position;
  const double distance = to_goal.norm();
  if (distance < kGoalTolerance) return Vector2::Zero();
  return to_goal * (std::min(speed, distance / dt) / distance);
}

Vector2 preferred_velocity(const HumanAgent& human, double dt) {
  return preferred_velocity(human.position, human.goal, human.preferred_speed, dt);
}

Vector2 preferred_velocity(const RobotAgent& robot, double dt) {
  return preferred_velocity(robot.position, robot.goal, robot.max_speed, dt);
}

namespace {

OrcaLine line_for(const OrcaAgent& self, const OrcaAgent& other, const OrcaParams& params) {
  const Vector2 rel_pos = other.position - self.position;
  const Vector2 rel_vel = self.velocity - other.velocity;
  const double dist_sq = rel_pos.squaredNorm();
  const double combined_radius = self.radius + other.radius;
  const double combined_radius_sq = combined_radius * combined_radius;

  OrcaLine line;
  Vector2 u;

  if (dist_sq > combined_radius_sq) {
    const double inv_tau = 1.0 / params.time_horizon;
    // Relative velocity measured from the cutoff circle center.
    const Vector2 w = rel_vel - inv_tau * rel_pos;
    const double w_length_sq = w.squaredNorm();
    const double dot1 = w.dot(rel_pos);

    if (dot1 < 0.0 && dot1 * dot1 > combined_radius_sq * w_length_sq) {
      // Project on the cutoff circle.
      const double w_length = std::sqrt(w_length_sq);
      const Vector2 unit_w = w / w_length;
      line.direction = Vector2(unit_w.y(), -unit_w.x());
      u = (combined_radius * inv_tau - w_length) * unit_w;
    } else {
      // Project on a leg; an exact tie goes to the left leg.
      const double leg = std::sqrt(dist_sq - combined_radius_sq);
      if (cross2<double>(rel_pos, w) >= 0.0) {
        line.direction = Vector2(rel_pos.x() * leg - rel_pos.y() * combined_radius,
                                 rel_pos.x() * combined_radius + rel_pos.y() * leg) /
                         dist_sq;
      } else {
        line.direction = -Vector2(rel_pos.x() * leg + rel_pos.y() * combined_radius,
                                  -rel_pos.x() * combined_radius + rel_pos.y() * leg) /
                         dist_sq;
      }
      u = rel_vel.dot(line.direction) * line.direction - rel_vel;
    }
  } else {
    // Already overlapping: resolve the penetration within one step.
    const double inv_dt = 1.0 / params.dt;
    const Vector2 w = rel_vel - inv_dt * rel_pos;
    const double w_length = w.norm();
    const Vector2 unit_w = w_length > 0.0 ? Vector2(w / w_length) : Vector2::UnitX();
    line.direction = Vector2(unit_w.y(), -unit_w.x());
    u = (combined_radius * inv_dt - w_length) * unit_w;
  }

  line.point = self.velocity + params.reciprocity_share * u;
  return line;
}

}  // namespace

std::vector<OrcaLine> orca_lines(const OrcaAgent& self, std::span<const OrcaAgent> neighbors,
                                 const OrcaParams& params) {
  const double range_sq = params.neighbor_distance * params.neighbor_distance;
  std::vector<std::pair<double, std::size_t>> in_range;
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    const double d = (neighbors[i].position - self.position).squaredNorm();
    if (d < range_sq) in_range.emplace_back(d, i);
  }
  std::stable_sort(in_range.begin(), in_range.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (in_range.size() > static_cast<std::size_t>(params.max_neighbors)) in_range.resize(params.max_neighbors);

  std::vector<OrcaLine> lines;
  lines.reserve(in_range.size());
  for (const auto& [d, i] : in_range) lines.push_back(line_for(self, neighbors[i], params));
  return lines;
}

std::vector<Vector2> human_policy_step(const WorldState& world, const OrcaParams& params) {
  const auto& humans = world.humans;
  std::vector<OrcaAgent> views;
  views.reserve(humans.size());
  for (const auto& h : humans) views.push_back(orca_view(h));

  std::vector<Vector2> out;
  out.reserve(humans.size());
  std::vector<OrcaAgent> others;
  for (std::size_t i = 0; i < humans.size(); ++i) {
    others.clear();
    for (std::size_t j = 0; j < humans.size(); ++j) {
      if (j != i) others.push_back(views[j]);
    }
    const auto lines = orca_lines(views[i], others, params);
    out.push_back(solve_velocity(lines, preferred_velocity(humans[i], params.dt), humans[i].preferred_speed).velocity);
  }
  return out;
}

VelocityCommand orca_robot_policy(const WorldState& world, std::span<const int> detected_humans,
                                  const OrcaParams& params) {
  OrcaParams robot_params = params;
  robot_params.reciprocity_share = 1.0;

  std::vector<OrcaAgent> neighbors;
  neighbors.reserve(detected_humans.size());
  for (int idx : detected_humans) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= world.humans.size()) {
      throw Error("orca_robot_policy: detected human index out of range");
    }
    neighbors.push_back(orca_view(world.humans[idx]));
  }
  const auto lines = orca_lines(orca_view(world.robot), neighbors, robot_params);
  const Vector2 preferred = preferred_velocity(world.robot, params.dt);
  return {solve_velocity(lines, preferred, world.robot.max_speed).velocity};
}

}  // namespace pascrowd
