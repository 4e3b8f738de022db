#pragma once

#include "pascrowd/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace pascrowd {

struct ScenarioConfig {
  int human_count = 6;
  double circle_radius = 4.0;
  double position_noise_halfwidth = 1.0;
  double robot_spawn_square_halfwidth = 5.0;
  double robot_min_goal_distance = 6.0;
  double dt = 0.25;
  int max_steps = 200;
  double fov_radius = 3.0;
  double discomfort_distance = 0.25;
  double human_radius_min = 0.3;
  double human_radius_max = 0.4;
  double human_speed_min = 0.5;
  double human_speed_max = 1.5;
  double robot_radius = 0.3;
  double robot_max_speed = 2.0;
  double robot_max_accel = 1.0;

  void validate() const;
};

struct OrcaParams {
  double time_horizon = 5.0;
  double neighbor_distance = 10.0;
  int max_neighbors = 10;
  double dt = 0.25;
  double reciprocity_share = 0.5;

  void validate() const;
};

struct GridSpec {
  int height_cells = 100;
  int width_cells = 100;
  double resolution = 0.1;
  Vector2 center = Vector2::Zero();

  /// World-frame center of cell (row, col).
  Vector2 cell_center(int row, int col) const {
    return center + Vector2((col - (width_cells - 1) / 2.0) * resolution,
                            ((height_cells - 1) / 2.0 - row) * resolution);
  }
  bool in_bounds(int row, int col) const {
    return row >= 0 && row < height_cells && col >= 0 && col < width_cells;
  }
  /// Fractional (row, col) of a world point; inverse of cell_center.
  double row_of(double y) const { return (height_cells - 1) / 2.0 - (y - center.y()) / resolution; }
  double col_of(double x) const { return (x - center.x()) / resolution + (width_cells - 1) / 2.0; }

  void validate() const;
};

/// Everything a run depends on; one JSON document with optional
/// "scenario", "orca" and "grid" sections.
struct SimConfig {
  ScenarioConfig scenario;
  OrcaParams orca;
  GridSpec grid;

  void validate() const;
  /// FNV-1a over the canonical JSON dump, as 16 hex digits.
  std::string hash() const;
};

nlohmann::json to_json(const SimConfig& cfg);
SimConfig config_from_json(const nlohmann::json& doc);
SimConfig load_config(const std::filesystem::path& path);

/// Resolves an explicit path, then $PASCROWD_CONFIG, then built-in defaults.
SimConfig resolve_config(const std::string& path);

}  // namespace pascrowd
