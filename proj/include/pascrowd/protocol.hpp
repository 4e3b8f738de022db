#pragma once

#include "pascrowd/config.hpp"
#include "pascrowd/harness.hpp"
#include "pascrowd/ogm.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pascrowd {

inline constexpr std::size_t kMaxMessageBytes = 1 << 20;

/// base64 of H*W row-major bytes (FREE=0, OCCUPIED=1, UNKNOWN=2).
std::string encode_grid(const OccupancyGrid& grid);
OccupancyGrid decode_grid(const std::string& payload, const GridSpec& spec);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// ---------------------------------------------------------------------------
// Rollout files

struct RolloutHeader {
  int version = 1;
  int height = 0;
  int width = 0;
  double dt = 0.0;
  std::string config_hash;

  bool operator==(const RolloutHeader&) const = default;
};

struct RolloutStep {
  std::int64_t step = 0;
  std::array<double, 4> robot{};  // x, y, vx, vy
  std::array<double, 2> action{};
  double reward = 0.0;
  bool done = false;
  std::string event;
  OccupancyGrid obs;
  std::optional<OccupancyGrid> gt;

  bool operator==(const RolloutStep&) const = default;
};

struct Rollout {
  RolloutHeader header;
  std::vector<RolloutStep> steps;

  bool operator==(const Rollout&) const = default;
};

class RolloutError : public Error {
 public:
  enum class Kind { Version, Hash, Truncated, Format };
  RolloutError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Appends one line per step; the header is written on construction.
class RolloutWriter {
 public:
  RolloutWriter(std::ostream& out, const RolloutHeader& header);
  void append(const RolloutStep& step);

 private:
  std::ostream& out_;
  RolloutHeader header_;
};

void write_rollout(std::ostream& out, const Rollout& rollout);
void write_rollout(const std::filesystem::path& path, const Rollout& rollout);

/// When `expected_hash` is given, a mismatching header is a Hash error.
Rollout read_rollout(std::istream& in, const GridSpec& base,
                     const std::optional<std::string>& expected_hash = std::nullopt);
Rollout read_rollout(const std::filesystem::path& path, const GridSpec& base,
                     const std::optional<std::string>& expected_hash = std::nullopt);

/// Replays `policy` on one seed while recording a rollout; train mode stores
/// ground-truth grids.
struct RecordedEpisode {
  EpisodeRecord record;
  Rollout rollout;
};
/// Header for rollouts recorded under `cfg`.
RolloutHeader rollout_header(const SimConfig& cfg);

/// With a `sink`, every step line is appended as soon as it is produced.
RecordedEpisode record_episode(Policy& policy, const SimConfig& cfg, std::uint64_t seed, bool train_mode,
                               RolloutWriter* sink = nullptr);

// ---------------------------------------------------------------------------
// Wire protocol

enum class SessionMode { Train, Eval };

/// State message shared by the server session and external policies: the
/// observation grid, robot state [x, y, vx, vy] and goal; `gt` and the full
/// human state [x, y, vx, vy, radius, gx, gy, preferred_speed] only when
/// `privileged` (train mode).
nlohmann::json state_message(std::string_view type, const WorldState& world, const OccupancyGrid& obs,
                             const OccupancyGrid* gt, bool privileged);

nlohmann::json error_message(std::string_view code, std::string_view detail);

/// One client session. Feed it raw lines; it returns the reply lines.
class Session {
 public:
  explicit Session(SimConfig cfg);

  std::string handle_line(const std::string& line);
  nlohmann::json handle(const nlohmann::json& msg);

  bool closed() const { return closed_; }
  const EpisodeRunner& runner() const { return runner_; }

 private:
  enum class State { AwaitReset, Running, Finished };

  EpisodeRunner runner_;
  State state_ = State::AwaitReset;
  SessionMode mode_ = SessionMode::Eval;
  bool closed_ = false;
};

/// Runs a session until close or EOF.
void serve_stream(std::istream& in, std::ostream& out, const SimConfig& cfg);

/// NDJSON sessions over TCP, one thread and session per connection.
class TcpServer {
 public:
  /// Binds immediately; port 0 picks a free port.
  TcpServer(std::uint16_t port, SimConfig cfg);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const;

  /// Accepts forever, or until `max_connections` sessions have been accepted
  /// and have all ended.
  void run(int max_connections = 0);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Reads one line of at most kMaxMessageBytes. Returns nullopt on EOF;
/// sets `too_long` and discards the rest of an oversized line.
std::optional<std::string> read_message(std::istream& in, bool& too_long);

// ---------------------------------------------------------------------------
// External policies

/// Policy on the far side of a pair of streams. Per decision it receives an
/// "obs" message and must answer with {"type":"step","action":[vx,vy]}; at
/// episode end it receives a "transition" with done=true.
class StreamPolicy : public Policy {
 public:
  StreamPolicy(std::istream& from_policy, std::ostream& to_policy, SimConfig cfg);
  std::string name() const override { return "external"; }
  bool needs_grids() const override { return true; }
  void begin_episode(std::uint64_t seed) override;
  VelocityCommand act(const WorldState& world, const Perception& perception) override;
  void end_episode(const EpisodeRecord& record) override;
  void close();

 private:
  std::istream& in_;
  std::ostream& out_;
  SimConfig cfg_;
  std::uint64_t seed_ = 0;
};

/// Spawns `command` through /bin/sh and talks to it over its stdin/stdout.
std::unique_ptr<Policy> spawn_external_policy(const std::string& command, const SimConfig& cfg);

}  // namespace pascrowd
