#include "pascrowd/harness.hpp"

#include "pascrowd/orca.hpp"
#include "pascrowd/reward.hpp"
#include "pascrowd/world.hpp"

#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace pascrowd {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Collision: return "collision";
    case Outcome::Timeout: return "timeout";
    case Outcome::Aborted: return "aborted";
  }
  return "aborted";
}

std::string_view to_string(StepEvent e) {
  switch (e) {
    case StepEvent::None: return "none";
    case StepEvent::Discomfort: return "discomfort";
    case StepEvent::Success: return "success";
    case StepEvent::Collision: return "collision";
    case StepEvent::Timeout: return "timeout";
  }
  return "none";
}

Outcome outcome_from_string(std::string_view s) {
  for (Outcome o : {Outcome::Success, Outcome::Collision, Outcome::Timeout, Outcome::Aborted}) {
    if (to_string(o) == s) return o;
  }
  throw Error(fmt::format("unknown outcome '{}'", s));
}

StepEvent event_from_string(std::string_view s) {
  for (StepEvent e : {StepEvent::None, StepEvent::Discomfort, StepEvent::Success, StepEvent::Collision,
                      StepEvent::Timeout}) {
    if (to_string(e) == s) return e;
  }
  throw Error(fmt::format("unknown step event '{}'", s));
}

namespace {

nlohmann::json vec(const Vector2& v) { return nlohmann::json::array({v.x(), v.y()}); }
Vector2 vec(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

// JSON has no infinity; an empty crowd serializes d_min as null.
nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }
double from_nullable(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

nlohmann::json to_json(const EpisodeRecord& record) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : record.steps) {
    nlohmann::json humans = nlohmann::json::array();
    for (const auto& p : s.human_positions) humans.push_back(vec(p));
    steps.push_back({{"step", s.step_index},
                     {"robot", {s.robot_position.x(), s.robot_position.y(), s.robot_velocity.x(), s.robot_velocity.y()}},
                     {"humans", std::move(humans)},
                     {"command", vec(s.command)},
                     {"reward", s.reward},
                     {"d_min", finite_or_null(s.d_min)},
                     {"d_goal", s.d_goal},
                     {"event", to_string(s.event)}});
  }
  nlohmann::json doc = {{"seed", record.seed},
                        {"config_hash", record.config_hash},
                        {"outcome", to_string(record.outcome)},
                        {"nav_time", record.nav_time},
                        {"path_length", record.path_length},
                        {"steps", std::move(steps)}};
  if (!record.error.empty()) doc["error"] = record.error;
  return doc;
}

EpisodeRecord episode_from_json(const nlohmann::json& doc) {
  try {
    EpisodeRecord r;
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.config_hash = doc.at("config_hash").get<std::string>();
    r.outcome = outcome_from_string(doc.at("outcome").get<std::string>());
    r.nav_time = doc.at("nav_time").get<double>();
    r.path_length = doc.at("path_length").get<double>();
    r.error = doc.value("error", std::string{});
    for (const auto& j : doc.at("steps")) {
      StepRecord s;
      s.step_index = j.at("step").get<std::int64_t>();
      const auto& robot = j.at("robot");
      s.robot_position = {robot.at(0).get<double>(), robot.at(1).get<double>()};
      s.robot_velocity = {robot.at(2).get<double>(), robot.at(3).get<double>()};
      for (const auto& p : j.at("humans")) s.human_positions.push_back(vec(p));
      s.command = vec(j.at("command"));
      s.reward = j.at("reward").get<double>();
      s.d_min = from_nullable(j.at("d_min"));
      s.d_goal = j.at("d_goal").get<double>();
      s.event = event_from_string(j.at("event").get<std::string>());
      r.steps.push_back(std::move(s));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("malformed episode record: {}", e.what()));
  }
}

std::string serialize(const EpisodeRecord& record) { return to_json(record).dump(); }

VelocityCommand GtOrcaPolicy::act(const WorldState& world, const Perception&) {
  std::vector<int> all(world.humans.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return orca_robot_policy(world, all, params_);
}

VelocityCommand ObsOrcaPolicy::act(const WorldState& world, const Perception& perception) {
  return orca_robot_policy(world, perception.detected, params_);
}

// ---------------------------------------------------------------------------

EpisodeRunner::EpisodeRunner(SimConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void EpisodeRunner::reset(std::uint64_t seed) {
  world_ = sample_scenario(cfg_.scenario, seed);
  record_ = EpisodeRecord{};
  record_.seed = seed;
  record_.config_hash = cfg_.hash();
  done_ = false;

  if (goal_distance(world_.robot) < world_.robot.radius) {
    record_.outcome = Outcome::Success;
    done_ = true;
  } else if (min_separation(world_) < 0.0) {
    record_.outcome = Outcome::Collision;
    done_ = true;
  }
}

OccupancyGrid EpisodeRunner::observation() const {
  return build_observation(world_, grid_around(cfg_.grid, world_.robot.position), cfg_.scenario.fov_radius);
}

OccupancyGrid EpisodeRunner::ground_truth() const {
  return rasterize_ground_truth(world_, grid_around(cfg_.grid, world_.robot.position));
}

Perception EpisodeRunner::perceive(bool with_grids) const {
  Perception p;
  p.detected = detected_agents(world_, grid_around(cfg_.grid, world_.robot.position), cfg_.scenario.fov_radius);
  if (with_grids) {
    p.observation = observation();
    p.ground_truth = ground_truth();
  }
  return p;
}

const StepRecord& EpisodeRunner::step(const VelocityCommand& cmd) {
  if (done_) throw Error("EpisodeRunner::step: episode is over");
  const Vector2 previous_position = world_.robot.position;
  const double d_goal_prev = goal_distance(world_.robot);
  world_ = step_world(world_, cmd, cfg_.orca);

  StepRecord s;
  s.step_index = world_.step_index;
  s.robot_position = world_.robot.position;
  s.robot_velocity = world_.robot.velocity;
  s.human_positions.reserve(world_.humans.size());
  for (const auto& h : world_.humans) s.human_positions.push_back(h.position);
  s.command = cmd.desired_velocity;
  s.d_goal = goal_distance(world_.robot);
  s.d_min = min_separation(world_);
  s.reward = compute_reward({d_goal_prev, s.d_goal, s.d_min, world_.robot.radius});

  if (s.d_goal < world_.robot.radius) {
    s.event = StepEvent::Success;
    record_.outcome = Outcome::Success;
    done_ = true;
  } else if (s.d_min < 0.0) {
    s.event = StepEvent::Collision;
    record_.outcome = Outcome::Collision;
    done_ = true;
  } else if (world_.step_index >= cfg_.scenario.max_steps) {
    s.event = StepEvent::Timeout;
    record_.outcome = Outcome::Timeout;
    done_ = true;
  } else if (s.d_min < cfg_.scenario.discomfort_distance) {
    s.event = StepEvent::Discomfort;
  }

  record_.path_length += (world_.robot.position - previous_position).norm();
  record_.nav_time = world_.time;
  record_.steps.push_back(std::move(s));
  return record_.steps.back();
}

void EpisodeRunner::abort(std::string reason) {
  record_.outcome = Outcome::Aborted;
  record_.error = std::move(reason);
  done_ = true;
}

EpisodeRecord run_episode(Policy& policy, const SimConfig& cfg, std::uint64_t seed) {
  EpisodeRunner runner(cfg);
  runner.reset(seed);
  policy.begin_episode(seed);
  try {
    while (!runner.done()) runner.step(policy.act(runner.world(), runner.perceive(policy.needs_grids())));
  } catch (const PolicyDisconnected& e) {
    runner.abort(e.what());
  }
  EpisodeRecord record = runner.record();
  if (record.outcome != Outcome::Aborted) {
    try {
      policy.end_episode(record);
    } catch (const PolicyDisconnected&) {
      // The episode itself completed; a vanished listener does not void it.
    }
  }
  return record;
}

// ---------------------------------------------------------------------------

EvalReport aggregate(std::span<const EpisodeRecord> records, const SimConfig& cfg) {
  if (records.empty()) throw Error("aggregate: no episodes");
  EvalReport report;
  std::int64_t successes = 0;
  std::int64_t collisions = 0;
  std::int64_t steps = 0;
  std::int64_t discomfort_steps = 0;
  double nav_time = 0.0;
  double path_length = 0.0;

  for (const auto& r : records) {
    if (r.outcome == Outcome::Aborted) {
      ++report.aborted_count;
      continue;
    }
    ++report.episode_count;
    switch (r.outcome) {
      case Outcome::Success:
        ++successes;
        nav_time += r.nav_time;
        path_length += r.path_length;
        break;
      case Outcome::Collision: ++collisions; break;
      case Outcome::Timeout: ++report.timeout_count; break;
      case Outcome::Aborted: break;
    }
    for (const auto& s : r.steps) {
      ++steps;
      if (s.d_min >= 0.0 && s.d_min < cfg.scenario.discomfort_distance) ++discomfort_steps;
    }
  }

  const std::int64_t decided = successes + collisions;
  if (decided > 0) {
    report.success_rate = static_cast<double>(successes) / static_cast<double>(decided);
    report.collision_rate = static_cast<double>(collisions) / static_cast<double>(decided);
  }
  if (steps > 0) report.discomfort_rate = static_cast<double>(discomfort_steps) / static_cast<double>(steps);
  if (successes > 0) {
    report.mean_nav_time = nav_time / static_cast<double>(successes);
    report.mean_path_length = path_length / static_cast<double>(successes);
  }
  return report;
}

std::string to_json_string(const EvalReport& report) {
  auto num = [](const std::optional<double>& x) { return x ? fmt::format("{:.6f}", *x) : std::string("null"); };
  return fmt::format(
      "{{\"success_rate\":{},\"collision_rate\":{},\"discomfort_rate\":{:.6f},\"mean_nav_time\":{},"
      "\"mean_path_length\":{},\"timeout_count\":{},\"episode_count\":{},\"aborted_count\":{}}}",
      num(report.success_rate), num(report.collision_rate), report.discomfort_rate, num(report.mean_nav_time),
      num(report.mean_path_length), report.timeout_count, report.episode_count, report.aborted_count);
}

std::vector<EpisodeRecord> run_episodes(const PolicyFactory& factory, const SimConfig& cfg, int n_episodes,
                                        std::uint64_t base_seed, int workers) {
  if (n_episodes < 1) throw Error("run_episodes: n_episodes must be >= 1");
  std::vector<EpisodeRecord> records(static_cast<std::size_t>(n_episodes));
  workers = std::clamp(workers, 1, n_episodes);

  if (workers == 1) {
    auto policy = factory();
    for (int i = 0; i < n_episodes; ++i) records[i] = run_episode(*policy, cfg, base_seed + i);
    return records;
  }

  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        auto policy = factory();
        for (int i = next++; i < n_episodes; i = next++) records[i] = run_episode(*policy, cfg, base_seed + i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

EvalReport evaluate(const PolicyFactory& factory, const SimConfig& cfg, int n_episodes, std::uint64_t base_seed,
                    int workers) {
  const auto records = run_episodes(factory, cfg, n_episodes, base_seed, workers);
  return aggregate(records, cfg);
}

PolicyFactory builtin_policy(std::string_view name, const OrcaParams& params) {
  if (name == "gt-orca") return [params] { return std::make_unique<GtOrcaPolicy>(params); };
  if (name == "obs-orca") return [params] { return std::make_unique<ObsOrcaPolicy>(params); };
  throw Error(fmt::format("unknown built-in policy '{}'", name));
}

}  // namespace pascrowd
