#include "pascrowd/protocol.hpp"

#include "pascrowd/world.hpp"

#include <fmt/format.h>

#include <istream>
#include <ostream>
#include <sstream>

namespace pascrowd {

namespace {

constexpr std::string_view kMagic = "PASROLL";

nlohmann::json step_to_json(const RolloutStep& s) {
  nlohmann::json j = {{"step", s.step},
                      {"robot", s.robot},
                      {"action", s.action},
                      {"reward", s.reward},
                      {"done", s.done},
                      {"event", s.event},
                      {"obs", encode_grid(s.obs)}};
  if (s.gt) j["gt"] = encode_grid(*s.gt);
  return j;
}

RolloutStep step_from_json(const nlohmann::json& j, const GridSpec& spec) {
  RolloutStep s;
  s.step = j.at("step").get<std::int64_t>();
  s.robot = j.at("robot").get<std::array<double, 4>>();
  s.action = j.at("action").get<std::array<double, 2>>();
  s.reward = j.at("reward").get<double>();
  s.done = j.at("done").get<bool>();
  s.event = j.at("event").get<std::string>();
  s.obs = decode_grid(j.at("obs").get<std::string>(), spec);
  if (auto it = j.find("gt"); it != j.end()) s.gt = decode_grid(it->get<std::string>(), spec);
  return s;
}

}  // namespace

RolloutWriter::RolloutWriter(std::ostream& out, const RolloutHeader& header) : out_(out), header_(header) {
  out_ << fmt::format("{} {} {} {} {} {}\n", kMagic, header.version, header.height, header.width, header.dt,
                      header.config_hash);
}

void RolloutWriter::append(const RolloutStep& step) {
  if (step.obs.rows() != header_.height || step.obs.cols() != header_.width) {
    throw Error("RolloutWriter: grid dimensions differ from header");
  }
  out_ << step_to_json(step).dump() << '\n';
  out_.flush();
}

void write_rollout(std::ostream& out, const Rollout& rollout) {
  RolloutWriter writer(out, rollout.header);
  for (const auto& s : rollout.steps) writer.append(s);
}

void write_rollout(const std::filesystem::path& path, const Rollout& rollout) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write rollout {}", path.string()));
  write_rollout(out, rollout);
}

Rollout read_rollout(std::istream& in, const GridSpec& base, const std::optional<std::string>& expected_hash) {
  using Kind = RolloutError::Kind;
  Rollout rollout;
  std::string line;
  if (!std::getline(in, line)) throw RolloutError(Kind::Truncated, "rollout: missing header");

  std::istringstream header(line);
  std::string magic;
  auto& h = rollout.header;
  std::string dt_text;
  if (!(header >> magic) || magic != kMagic) throw RolloutError(Kind::Format, "rollout: bad magic");
  if (!(header >> h.version)) throw RolloutError(Kind::Format, "rollout: bad version field");
  if (h.version != 1) throw RolloutError(Kind::Version, fmt::format("rollout: unsupported version {}", h.version));
  if (!(header >> h.height >> h.width >> dt_text >> h.config_hash) || h.height <= 0 || h.width <= 0) {
    throw RolloutError(Kind::Format, "rollout: bad header");
  }
  try {
    h.dt = std::stod(dt_text);
  } catch (const std::exception&) {
    throw RolloutError(Kind::Format, "rollout: bad dt");
  }
  if (expected_hash && *expected_hash != h.config_hash) {
    throw RolloutError(Kind::Hash, fmt::format("rollout: config hash {} does not match loaded config {}",
                                               h.config_hash, *expected_hash));
  }

  GridSpec spec = base;
  spec.height_cells = h.height;
  spec.width_cells = h.width;
  while (std::getline(in, line)) {
    if (in.eof()) throw RolloutError(Kind::Truncated, "rollout: last line is not newline-terminated");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw RolloutError(Kind::Truncated, fmt::format("rollout: unparseable line {}", rollout.steps.size() + 2));
    }
    try {
      rollout.steps.push_back(step_from_json(j, spec));
    } catch (const nlohmann::json::exception& e) {
      throw RolloutError(Kind::Format, fmt::format("rollout: bad step record: {}", e.what()));
    } catch (const RolloutError&) {
      throw;
    } catch (const Error& e) {
      throw RolloutError(Kind::Format, fmt::format("rollout: bad step record: {}", e.what()));
    }
  }
  return rollout;
}

Rollout read_rollout(const std::filesystem::path& path, const GridSpec& base,
                     const std::optional<std::string>& expected_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open rollout {}", path.string()));
  return read_rollout(in, base, expected_hash);
}

RolloutHeader rollout_header(const SimConfig& cfg) {
  return {1, cfg.grid.height_cells, cfg.grid.width_cells, cfg.scenario.dt, cfg.hash()};
}

RecordedEpisode record_episode(Policy& policy, const SimConfig& cfg, std::uint64_t seed, bool train_mode,
                               RolloutWriter* sink) {
  EpisodeRunner runner(cfg);
  runner.reset(seed);
  policy.begin_episode(seed);

  Rollout rollout;
  rollout.header = rollout_header(cfg);
  auto snapshot = [&](std::int64_t step, const Vector2& action, double reward, std::string event) {
    const auto& r = runner.world().robot;
    RolloutStep s;
    s.step = step;
    s.robot = {r.position.x(), r.position.y(), r.velocity.x(), r.velocity.y()};
    s.action = {action.x(), action.y()};
    s.reward = reward;
    s.done = runner.done();
    s.event = std::move(event);
    s.obs = runner.observation();
    if (train_mode) s.gt = runner.ground_truth();
    if (sink != nullptr) sink->append(s);
    rollout.steps.push_back(std::move(s));
  };

  snapshot(0, Vector2::Zero(), 0.0, runner.done() ? std::string(to_string(runner.record().outcome)) : "reset");
  try {
    while (!runner.done()) {
      const VelocityCommand cmd = policy.act(runner.world(), runner.perceive(policy.needs_grids()));
      const StepRecord& rec = runner.step(cmd);
      snapshot(rec.step_index, cmd.desired_velocity, rec.reward, std::string(to_string(rec.event)));
    }
  } catch (const PolicyDisconnected& e) {
    runner.abort(e.what());
  }
  if (runner.record().outcome != Outcome::Aborted) policy.end_episode(runner.record());
  return {runner.record(), std::move(rollout)};
}

}  // namespace pascrowd
