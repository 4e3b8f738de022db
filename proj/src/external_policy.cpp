#include "pascrowd/protocol.hpp"

#include <boost/process.hpp>
#include <fmt/format.h>

#include <csignal>
#include <istream>
#include <ostream>

namespace pascrowd {

StreamPolicy::StreamPolicy(std::istream& from_policy, std::ostream& to_policy, SimConfig cfg)
    : in_(from_policy), out_(to_policy), cfg_(std::move(cfg)) {}

void StreamPolicy::begin_episode(std::uint64_t seed) { seed_ = seed; }

VelocityCommand StreamPolicy::act(const WorldState& world, const Perception& perception) {
  if (!perception.observation) throw Error("StreamPolicy: observation grid missing");
  nlohmann::json msg = state_message("obs", world, *perception.observation, nullptr, false);
  msg["seed"] = seed_;
  out_ << msg.dump() << '\n';
  out_.flush();
  if (!out_) throw PolicyDisconnected("external policy: write failed");

  bool too_long = false;
  const auto line = read_message(in_, too_long);
  if (!line) throw PolicyDisconnected("external policy: connection closed");
  if (too_long) throw PolicyDisconnected("external policy: reply exceeds 1 MiB");
  try {
    const auto reply = nlohmann::json::parse(*line);
    if (reply.at("type").get<std::string>() != "step") throw PolicyDisconnected("external policy: expected step");
    const auto& a = reply.at("action");
    const Vector2 v(a.at(0).get<double>(), a.at(1).get<double>());
    if (!is_finite(v)) throw PolicyDisconnected("external policy: non-finite action");
    return {v};
  } catch (const nlohmann::json::exception& e) {
    throw PolicyDisconnected(fmt::format("external policy: bad reply: {}", e.what()));
  }
}

void StreamPolicy::end_episode(const EpisodeRecord& record) {
  const nlohmann::json msg = {{"type", "transition"},
                              {"seed", record.seed},
                              {"step", record.steps.size()},
                              {"reward", record.steps.empty() ? 0.0 : record.steps.back().reward},
                              {"done", true},
                              {"event", to_string(record.outcome)}};
  out_ << msg.dump() << '\n';
  out_.flush();
}

void StreamPolicy::close() {
  out_ << nlohmann::json{{"type", "close"}}.dump() << '\n';
  out_.flush();
}

namespace {

namespace bp = boost::process;

struct ProcessPipes {
  bp::ipstream from_child;
  bp::opstream to_child;
};

class ProcessPolicy final : private ProcessPipes, public StreamPolicy {
 public:
  ProcessPolicy(const std::string& command, const SimConfig& cfg)
      : StreamPolicy(from_child, to_child, cfg),
        child_(bp::search_path("sh"), "-c", command, bp::std_out > from_child, bp::std_in < to_child) {}

  ~ProcessPolicy() override {
    try {
      close();
      to_child.pipe().close();
      if (child_.running()) child_.wait();
    } catch (...) {
      // Best effort; the child may already be gone.
    }
  }

 private:
  bp::child child_;
};

}  // namespace

std::unique_ptr<Policy> spawn_external_policy(const std::string& command, const SimConfig& cfg) {
  // Writes to a policy that exited must fail with EPIPE instead of killing us.
  std::signal(SIGPIPE, SIG_IGN);
  return std::make_unique<ProcessPolicy>(command, cfg);
}

}  // namespace pascrowd
