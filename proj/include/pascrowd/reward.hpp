#pragma once

namespace pascrowd {

struct RewardInputs {
  double d_goal_prev = 0.0;
  double d_goal = 0.0;
  double d_min = 0.0;  // surface distance to the closest human
  double robot_radius = 0.3;
};

inline constexpr double kGoalReward = 10.0;
inline constexpr double kCollisionPenalty = -5.0;
inline constexpr double kDiscomfortDistance = 0.25;
inline constexpr double kDiscomfortScale = 2.5;
inline constexpr double kProgressScale = 2.0;

/// Piecewise reward; cases are checked in order: goal, collision,
/// discomfort, progress.
double compute_reward(const RewardInputs& in);

}  // namespace pascrowd
