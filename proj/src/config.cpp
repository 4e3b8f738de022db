#include "pascrowd/config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

namespace pascrowd {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(fmt::format("invalid config: {}", what));
}

template <typename T>
void read_field(const nlohmann::json& section, const char* key, T& field) {
  if (auto it = section.find(key); it != section.end()) field = it->get<T>();
}

}  // namespace

void ScenarioConfig::validate() const {
  require(human_count >= 0, "human_count must be non-negative");
  require(circle_radius > 0 && position_noise_halfwidth >= 0, "circle geometry must be positive");
  require(robot_spawn_square_halfwidth > 0 && robot_min_goal_distance > 0, "spawn geometry must be positive");
  require(robot_min_goal_distance < std::sqrt(2.0) * robot_spawn_square_halfwidth,
          "robot_min_goal_distance must be below the spawn square half-diagonal");
  require(dt > 0 && max_steps > 0, "dt and max_steps must be positive");
  require(fov_radius > 0 && discomfort_distance > 0, "fov_radius and discomfort_distance must be positive");
  require(0 < human_radius_min && human_radius_min < human_radius_max, "bad human radius range");
  require(0 < human_speed_min && human_speed_min < human_speed_max, "bad human speed range");
  require(robot_radius > 0 && robot_max_speed > 0 && robot_max_accel > 0, "robot limits must be positive");
}

void OrcaParams::validate() const {
  require(time_horizon > 0 && neighbor_distance > 0 && max_neighbors > 0 && dt > 0,
          "ORCA parameters must be positive");
  require(reciprocity_share > 0 && reciprocity_share <= 1, "reciprocity_share must be in (0, 1]");
}

void GridSpec::validate() const {
  require(height_cells > 0 && width_cells > 0 && resolution > 0, "grid dimensions must be positive");
}

void SimConfig::validate() const {
  scenario.validate();
  orca.validate();
  grid.validate();
  require(orca.dt == scenario.dt, "orca.dt must equal scenario.dt");
}

nlohmann::json to_json(const SimConfig& cfg) {
  const auto& s = cfg.scenario;
  const auto& o = cfg.orca;
  const auto& g = cfg.grid;
  // nlohmann::json keeps keys sorted, so the dump is canonical.
  return {
      {"scenario",
       {{"human_count", s.human_count},
        {"circle_radius", s.circle_radius},
        {"position_noise_halfwidth", s.position_noise_halfwidth},
        {"robot_spawn_square_halfwidth", s.robot_spawn_square_halfwidth},
        {"robot_min_goal_distance", s.robot_min_goal_distance},
        {"dt", s.dt},
        {"max_steps", s.max_steps},
        {"fov_radius", s.fov_radius},
        {"discomfort_distance", s.discomfort_distance},
        {"human_radius_min", s.human_radius_min},
        {"human_radius_max", s.human_radius_max},
        {"human_speed_min", s.human_speed_min},
        {"human_speed_max", s.human_speed_max},
        {"robot_radius", s.robot_radius},
        {"robot_max_speed", s.robot_max_speed},
        {"robot_max_accel", s.robot_max_accel}}},
      {"orca",
       {{"time_horizon", o.time_horizon},
        {"neighbor_distance", o.neighbor_distance},
        {"max_neighbors", o.max_neighbors},
        {"dt", o.dt},
        {"reciprocity_share", o.reciprocity_share}}},
      {"grid", {{"height_cells", g.height_cells}, {"width_cells", g.width_cells}, {"resolution", g.resolution}}},
  };
}

SimConfig config_from_json(const nlohmann::json& doc) {
  SimConfig cfg;
  try {
    if (auto it = doc.find("scenario"); it != doc.end()) {
      auto& s = cfg.scenario;
      const auto& j = *it;
      read_field(j, "human_count", s.human_count);
      read_field(j, "circle_radius", s.circle_radius);
      read_field(j, "position_noise_halfwidth", s.position_noise_halfwidth);
      read_field(j, "robot_spawn_square_halfwidth", s.robot_spawn_square_halfwidth);
      read_field(j, "robot_min_goal_distance", s.robot_min_goal_distance);
      read_field(j, "dt", s.dt);
      read_field(j, "max_steps", s.max_steps);
      read_field(j, "fov_radius", s.fov_radius);
      read_field(j, "discomfort_distance", s.discomfort_distance);
      read_field(j, "human_radius_min", s.human_radius_min);
      read_field(j, "human_radius_max", s.human_radius_max);
      read_field(j, "human_speed_min", s.human_speed_min);
      read_field(j, "human_speed_max", s.human_speed_max);
      read_field(j, "robot_radius", s.robot_radius);
      read_field(j, "robot_max_speed", s.robot_max_speed);
      read_field(j, "robot_max_accel", s.robot_max_accel);
      // The ORCA step follows the simulation step unless set explicitly.
      cfg.orca.dt = s.dt;
    }
    if (auto it = doc.find("orca"); it != doc.end()) {
      auto& o = cfg.orca;
      const auto& j = *it;
      read_field(j, "time_horizon", o.time_horizon);
      read_field(j, "neighbor_distance", o.neighbor_distance);
      read_field(j, "max_neighbors", o.max_neighbors);
      read_field(j, "dt", o.dt);
      read_field(j, "reciprocity_share", o.reciprocity_share);
    }
    if (auto it = doc.find("grid"); it != doc.end()) {
      auto& g = cfg.grid;
      read_field(*it, "height_cells", g.height_cells);
      read_field(*it, "width_cells", g.width_cells);
      read_field(*it, "resolution", g.resolution);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("invalid config: {}", e.what()));
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open config {}", path.string()));
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(fmt::format("cannot parse config {}: {}", path.string(), e.what()));
  }
  return config_from_json(doc);
}

SimConfig resolve_config(const std::string& path) {
  if (!path.empty()) return load_config(path);
  if (const char* env = std::getenv("PASCROWD_CONFIG"); env != nullptr && *env != '\0') return load_config(env);
  return SimConfig{};
}

std::string SimConfig::hash() const {
  const std::string text = to_json(*this).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace pascrowd
