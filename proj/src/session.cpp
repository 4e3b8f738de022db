#include "pascrowd/protocol.hpp"

#include <boost/asio.hpp>
#include <fmt/format.h>

#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

namespace pascrowd {

nlohmann::json state_message(std::string_view type, const WorldState& world, const OccupancyGrid& obs,
                             const OccupancyGrid* gt, bool privileged) {
  const auto& r = world.robot;
  nlohmann::json msg = {{"type", type},
                        {"step", world.step_index},
                        {"obs", encode_grid(obs)},
                        {"robot", {r.position.x(), r.position.y(), r.velocity.x(), r.velocity.y()}},
                        {"goal", {r.goal.x(), r.goal.y()}}};
  if (privileged) {
    if (gt != nullptr) msg["gt"] = encode_grid(*gt);
    nlohmann::json humans = nlohmann::json::array();
    for (const auto& h : world.humans) {
      humans.push_back({h.position.x(), h.position.y(), h.velocity.x(), h.velocity.y(), h.radius, h.goal.x(),
                        h.goal.y(), h.preferred_speed});
    }
    msg["humans"] = std::move(humans);
  }
  return msg;
}

nlohmann::json error_message(std::string_view code, std::string_view detail) {
  return {{"type", "error"}, {"code", code}, {"detail", detail}};
}

Session::Session(SimConfig cfg) : runner_(std::move(cfg)) {}

std::string Session::handle_line(const std::string& line) {
  if (line.size() > kMaxMessageBytes) return error_message("too_large", "message exceeds 1 MiB").dump();
  nlohmann::json msg;
  try {
    msg = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    return error_message("parse", e.what()).dump();
  }
  return handle(msg).dump();
}

nlohmann::json Session::handle(const nlohmann::json& msg) {
  if (closed_) return error_message("protocol", "session is closed");
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    return error_message("invalid", "message must be an object with a string \"type\"");
  }
  const std::string type = msg["type"].get<std::string>();

  auto state_reply = [&](std::string_view reply_type) {
    const bool train = mode_ == SessionMode::Train;
    const OccupancyGrid obs = runner_.observation();
    std::optional<OccupancyGrid> gt;
    if (train) gt = runner_.ground_truth();
    return state_message(reply_type, runner_.world(), obs, gt ? &*gt : nullptr, train);
  };

  if (type == "reset") {
    const auto seed = msg.find("seed");
    if (seed == msg.end() || !seed->is_number_integer()) return error_message("invalid", "reset needs an integer seed");
    const std::string mode = msg.value("mode", std::string("eval"));
    if (mode != "train" && mode != "eval") return error_message("invalid", "mode must be \"train\" or \"eval\"");
    mode_ = mode == "train" ? SessionMode::Train : SessionMode::Eval;
    runner_.reset(seed->get<std::uint64_t>());
    state_ = runner_.done() ? State::Finished : State::Running;
    nlohmann::json reply = state_reply("obs");
    reply["done"] = runner_.done();
    reply["event"] = runner_.done() ? std::string(to_string(runner_.record().outcome)) : "reset";
    return reply;
  }

  if (type == "step") {
    if (state_ == State::AwaitReset) return error_message("protocol", "step before reset");
    if (state_ == State::Finished) return error_message("protocol", "episode is done; send reset or close");
    const auto action = msg.find("action");
    if (action == msg.end() || !action->is_array() || action->size() != 2 || !(*action)[0].is_number() ||
        !(*action)[1].is_number()) {
      return error_message("invalid", "step needs \"action\": [vx, vy]");
    }
    const Vector2 v((*action)[0].get<double>(), (*action)[1].get<double>());
    if (!is_finite(v)) return error_message("invalid", "action must be finite");

    const StepRecord& rec = runner_.step({v});
    if (runner_.done()) state_ = State::Finished;
    nlohmann::json reply = state_reply("transition");
    reply["reward"] = rec.reward;
    reply["done"] = runner_.done();
    reply["event"] = to_string(rec.event);
    return reply;
  }

  if (type == "close") {
    closed_ = true;
    return {{"type", "close"}};
  }

  if (type == "obs" || type == "transition" || type == "error") {
    return error_message("protocol", fmt::format("\"{}\" is a server message", type));
  }
  return error_message("unknown_type", fmt::format("unknown message type \"{}\"", type));
}

std::optional<std::string> read_message(std::istream& in, bool& too_long) {
  too_long = false;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() > kMaxMessageBytes) {
    too_long = true;
    line.clear();
  }
  return line;
}

void serve_stream(std::istream& in, std::ostream& out, const SimConfig& cfg) {
  Session session(cfg);
  bool too_long = false;
  while (auto line = read_message(in, too_long)) {
    if (too_long) {
      out << error_message("too_large", "message exceeds 1 MiB").dump() << '\n';
    } else if (line->empty()) {
      continue;
    } else {
      out << session.handle_line(*line) << '\n';
    }
    out.flush();
    if (session.closed() || !out) break;
  }
}

// ---------------------------------------------------------------------------

namespace asio = boost::asio;
using asio::ip::tcp;

struct TcpServer::Impl {
  SimConfig cfg;
  asio::io_context io;
  tcp::acceptor acceptor;

  Impl(std::uint16_t port, SimConfig c) : cfg(std::move(c)), acceptor(io, tcp::endpoint(tcp::v4(), port)) {}
};

TcpServer::TcpServer(std::uint16_t port, SimConfig cfg) : impl_(std::make_unique<Impl>(port, std::move(cfg))) {}

TcpServer::~TcpServer() = default;

std::uint16_t TcpServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void TcpServer::run(int max_connections) {
  std::vector<std::jthread> sessions;
  for (int accepted = 0; max_connections <= 0 || accepted < max_connections; ++accepted) {
    tcp::socket socket(impl_->io);
    impl_->acceptor.accept(socket);
    sessions.emplace_back([cfg = impl_->cfg, s = std::move(socket)]() mutable {
      tcp::iostream stream(std::move(s));
      serve_stream(stream, stream, cfg);
    });
    if (max_connections <= 0) sessions.back().detach();
  }
}

}  // namespace pascrowd
