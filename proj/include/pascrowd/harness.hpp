#pragma once

#include "pascrowd/config.hpp"
#include "pascrowd/ogm.hpp"
#include "pascrowd/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pascrowd {

enum class Outcome { Success, Collision, Timeout, Aborted };
enum class StepEvent { None, Discomfort, Success, Collision, Timeout };

std::string_view to_string(Outcome o);
std::string_view to_string(StepEvent e);
Outcome outcome_from_string(std::string_view s);
StepEvent event_from_string(std::string_view s);

struct StepRecord {
  std::int64_t step_index = 0;
  Vector2 robot_position = Vector2::Zero();
  Vector2 robot_velocity = Vector2::Zero();
  std::vector<Vector2> human_positions;
  Vector2 command = Vector2::Zero();
  double reward = 0.0;
  double d_min = 0.0;
  double d_goal = 0.0;
  StepEvent event = StepEvent::None;

  bool operator==(const StepRecord&) const = default;
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  std::string config_hash;
  Outcome outcome = Outcome::Timeout;
  std::vector<StepRecord> steps;
  double nav_time = 0.0;
  double path_length = 0.0;
  std::string error;  // set only for aborted episodes

  bool operator==(const EpisodeRecord&) const = default;
};

nlohmann::json to_json(const EpisodeRecord& record);
EpisodeRecord episode_from_json(const nlohmann::json& doc);
/// Canonical serialization; identical records give identical bytes.
std::string serialize(const EpisodeRecord& record);

/// What a policy may look at. Grids are only filled for policies that ask.
struct Perception {
  std::vector<int> detected;
  std::optional<OccupancyGrid> observation;
  std::optional<OccupancyGrid> ground_truth;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual bool needs_grids() const { return false; }
  virtual void begin_episode(std::uint64_t /*seed*/) {}
  virtual VelocityCommand act(const WorldState& world, const Perception& perception) = 0;
  virtual void end_episode(const EpisodeRecord& /*record*/) {}
};

/// Thrown by policies whose remote end went away mid-episode.
class PolicyDisconnected : public Error {
 public:
  using Error::Error;
};

class GtOrcaPolicy final : public Policy {
 public:
  explicit GtOrcaPolicy(OrcaParams params) : params_(params) {}
  std::string name() const override { return "gt-orca"; }
  VelocityCommand act(const WorldState& world, const Perception& perception) override;

 private:
  OrcaParams params_;
};

class ObsOrcaPolicy final : public Policy {
 public:
  explicit ObsOrcaPolicy(OrcaParams params) : params_(params) {}
  std::string name() const override { return "obs-orca"; }
  VelocityCommand act(const WorldState& world, const Perception& perception) override;

 private:
  OrcaParams params_;
};

/// Steps one episode at a time; shared by the in-process harness and the
/// wire session so both produce the same records.
class EpisodeRunner {
 public:
  explicit EpisodeRunner(SimConfig cfg);

  /// Samples the scenario and applies the step-0 terminal check.
  void reset(std::uint64_t seed);

  const WorldState& world() const { return world_; }
  const SimConfig& config() const { return cfg_; }
  const EpisodeRecord& record() const { return record_; }
  bool done() const { return done_; }

  Perception perceive(bool with_grids) const;
  OccupancyGrid observation() const;
  OccupancyGrid ground_truth() const;

  /// Advances one control step. Requires !done().
  const StepRecord& step(const VelocityCommand& cmd);

  /// Marks the current episode aborted; it will be excluded from metrics.
  void abort(std::string reason);

 private:
  SimConfig cfg_;
  WorldState world_;
  EpisodeRecord record_;
  bool done_ = true;
};

EpisodeRecord run_episode(Policy& policy, const SimConfig& cfg, std::uint64_t seed);

struct EvalReport {
  std::optional<double> success_rate;
  std::optional<double> collision_rate;
  double discomfort_rate = 0.0;
  std::optional<double> mean_nav_time;
  std::optional<double> mean_path_length;
  std::int64_t timeout_count = 0;
  std::int64_t episode_count = 0;
  std::int64_t aborted_count = 0;
};

EvalReport aggregate(std::span<const EpisodeRecord> records, const SimConfig& cfg);

/// Flat JSON object, floats with 6 decimals, undefined values as null.
std::string to_json_string(const EvalReport& report);

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

/// Seeds base_seed .. base_seed + n - 1. With workers > 1 the factory is
/// called once per worker; results do not depend on the worker count.
std::vector<EpisodeRecord> run_episodes(const PolicyFactory& factory, const SimConfig& cfg, int n_episodes,
                                        std::uint64_t base_seed, int workers = 1);

EvalReport evaluate(const PolicyFactory& factory, const SimConfig& cfg, int n_episodes, std::uint64_t base_seed,
                    int workers = 1);

PolicyFactory builtin_policy(std::string_view name, const OrcaParams& params);

}  // namespace pascrowd
