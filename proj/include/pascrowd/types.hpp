#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pascrowd {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Vector2 = Vec2<double>;

/// Thrown for violated preconditions and malformed inputs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HumanAgent {
  Vector2 position = Vector2::Zero();
  Vector2 velocity = Vector2::Zero();
  double radius = 0.3;
  Vector2 goal = Vector2::Zero();
  double preferred_speed = 1.0;
};

struct RobotAgent {
  Vector2 position = Vector2::Zero();
  Vector2 velocity = Vector2::Zero();
  double radius = 0.3;
  Vector2 goal = Vector2::Zero();
  double max_speed = 2.0;
  double max_accel = 1.0;
};

struct VelocityCommand {
  Vector2 desired_velocity = Vector2::Zero();
};

/// Full simulation truth for one episode.
struct WorldState {
  std::int64_t step_index = 0;
  double time = 0.0;
  RobotAgent robot;
  std::vector<HumanAgent> humans;
  std::uint64_t seed = 0;  // root seed the scenario was sampled from
};

inline bool is_finite(const Vector2& v) { return v.allFinite(); }

}  // namespace pascrowd
