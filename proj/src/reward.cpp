#include "pascrowd/reward.hpp"

#include "pascrowd/types.hpp"

#include <cmath>

namespace pascrowd {

double compute_reward(const RewardInputs& in) {
  if (std::isnan(in.d_goal_prev) || std::isnan(in.d_goal) || std::isnan(in.d_min) || std::isnan(in.robot_radius)) {
    throw Error("compute_reward: NaN input");
  }
  if (in.d_goal < in.robot_radius) return kGoalReward;
  if (in.d_min < 0.0) return kCollisionPenalty;
  if (in.d_min < kDiscomfortDistance) return kDiscomfortScale * (in.d_min - kDiscomfortDistance);
  return kProgressScale * (-in.d_goal + in.d_goal_prev);
}

}  // namespace pascrowd
