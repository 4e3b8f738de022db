#pragma once

// Incremental 2D linear programming over half-planes intersected with a
// speed disc, in the style of randomized-incremental LP for velocity
// obstacles. Templated on the scalar so the same code runs in float or
// double.

#include "pascrowd/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

namespace pascrowd {

/// Boundary of a permitted half-plane in velocity space. The permitted side
/// is to the left of `direction`.
template <typename Scalar>
struct OrcaLineT {
  Vec2<Scalar> point = Vec2<Scalar>::Zero();
  Vec2<Scalar> direction = Vec2<Scalar>::UnitX();
};

using OrcaLine = OrcaLineT<double>;

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Positive when `v` lies on the forbidden side of `line`, in the same units
/// as v.
template <typename Scalar>
Scalar violation(const OrcaLineT<Scalar>& line, const Vec2<Scalar>& v) {
  return cross2<Scalar>(line.direction, line.point - v);
}

template <typename Scalar>
Scalar max_violation(std::span<const OrcaLineT<Scalar>> lines, const Vec2<Scalar>& v) {
  Scalar worst = -std::numeric_limits<Scalar>::infinity();
  for (const auto& line : lines) worst = std::max(worst, violation(line, v));
  return worst;
}

template <typename Scalar>
struct LpSolution {
  Vec2<Scalar> velocity = Vec2<Scalar>::Zero();
  bool feasible = true;
};

namespace detail {

template <typename Scalar>
constexpr Scalar lp_epsilon() {
  return std::is_same_v<Scalar, float> ? Scalar(1e-5) : Scalar(1e-9);
}

// Optimizes along line `index` subject to lines [0, index) and the disc.
template <typename Scalar>
bool solve_on_line(std::span<const OrcaLineT<Scalar>> lines, std::size_t index, Scalar radius,
                   const Vec2<Scalar>& target, bool direction_opt, Vec2<Scalar>& result) {
  const auto& line = lines[index];
  const Scalar dot = line.point.dot(line.direction);
  const Scalar discriminant = dot * dot + radius * radius - line.point.squaredNorm();
  if (discriminant < Scalar(0)) return false;

  const Scalar sqrt_disc = std::sqrt(discriminant);
  Scalar t_left = -dot - sqrt_disc;
  Scalar t_right = -dot + sqrt_disc;

  for (std::size_t i = 0; i < index; ++i) {
    const Scalar denominator = cross2<Scalar>(line.direction, lines[i].direction);
    const Scalar numerator = cross2<Scalar>(lines[i].direction, line.point - lines[i].point);
    if (std::abs(denominator) <= lp_epsilon<Scalar>()) {
      // parallel
      if (numerator < Scalar(0)) return false;
      continue;
    }
    const Scalar t = numerator / denominator;
    if (denominator >= Scalar(0)) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) return false;
  }

  if (direction_opt) {
    result = line.point + (target.dot(line.direction) > Scalar(0) ? t_right : t_left) * line.direction;
  } else {
    const Scalar t = line.direction.dot(target - line.point);
    result = line.point + std::clamp(t, t_left, t_right) * line.direction;
  }
  return true;
}

// Returns the index of the first line that made the program infeasible, or
// lines.size() on success.
template <typename Scalar>
std::size_t solve_incremental(std::span<const OrcaLineT<Scalar>> lines, Scalar radius,
                              const Vec2<Scalar>& target, bool direction_opt, Vec2<Scalar>& result) {
  if (direction_opt) {
    result = target * radius;
  } else if (target.squaredNorm() > radius * radius) {
    result = target.normalized() * radius;
  } else {
    result = target;
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (violation(lines[i], result) > Scalar(0)) {
      const Vec2<Scalar> previous = result;
      if (!solve_on_line(lines, i, radius, target, direction_opt, result)) {
        result = previous;
        return i;
      }
    }
  }
  return lines.size();
}

// Minimizes the maximum violation over all lines, starting from the line
// where the incremental program failed.
template <typename Scalar>
void solve_min_max_violation(std::span<const OrcaLineT<Scalar>> lines, std::size_t begin,
                             Scalar radius, Vec2<Scalar>& result) {
  Scalar distance = Scalar(0);
  std::vector<OrcaLineT<Scalar>> projected;
  for (std::size_t i = begin; i < lines.size(); ++i) {
    if (violation(lines[i], result) <= distance) continue;

    projected.clear();
    for (std::size_t j = 0; j < i; ++j) {
      OrcaLineT<Scalar> line;
      const Scalar determinant = cross2<Scalar>(lines[i].direction, lines[j].direction);
      if (std::abs(determinant) <= lp_epsilon<Scalar>()) {
        if (lines[i].direction.dot(lines[j].direction) > Scalar(0)) continue;
        line.point = Scalar(0.5) * (lines[i].point + lines[j].point);
      } else {
        line.point = lines[i].point +
                     (cross2<Scalar>(lines[j].direction, lines[i].point - lines[j].point) / determinant) *
                         lines[i].direction;
      }
      line.direction = (lines[j].direction - lines[i].direction).normalized();
      projected.push_back(line);
    }

    const Vec2<Scalar> previous = result;
    const Vec2<Scalar> outward(-lines[i].direction.y(), lines[i].direction.x());
    if (solve_incremental<Scalar>(projected, radius, outward, true, result) < projected.size()) {
      // Only reachable through rounding; the previous point is already feasible.
      result = previous;
    }
    distance = violation(lines[i], result);
  }
}

}  // namespace detail

/// Closest velocity to `preferred` inside every half-plane and the disc of
/// radius `max_speed`. When the half-planes have no common point inside the
/// disc, returns the velocity minimizing the largest violation and marks the
/// solution infeasible.
template <typename Scalar>
LpSolution<Scalar> solve_velocity(std::span<const OrcaLineT<Scalar>> lines, const Vec2<Scalar>& preferred,
                                  Scalar max_speed) {
  if (!(max_speed > Scalar(0))) throw Error("solve_velocity: max_speed must be positive");
  LpSolution<Scalar> out;
  const std::size_t failed = detail::solve_incremental(lines, max_speed, preferred, false, out.velocity);
  if (failed < lines.size()) {
    out.feasible = false;
    detail::solve_min_max_violation(lines, failed, max_speed, out.velocity);
  }
  return out;
}

template <typename Scalar>
LpSolution<Scalar> solve_velocity(const std::vector<OrcaLineT<Scalar>>& lines, const Vec2<Scalar>& preferred,
                                  Scalar max_speed) {
  return solve_velocity(std::span<const OrcaLineT<Scalar>>(lines), preferred, max_speed);
}

}  // namespace pascrowd
