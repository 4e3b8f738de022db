// Command-line front end: simulate, evaluate, render, serve.

#include "pascrowd/harness.hpp"
#include "pascrowd/protocol.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

using namespace pascrowd;

namespace {

int run_simulate(const std::string& config_path, std::uint64_t seed, const std::string& policy_name,
                 const std::string& out_path, const std::string& mode, const std::string& record_path) {
  const SimConfig cfg = resolve_config(config_path);
  auto policy = builtin_policy(policy_name, cfg.orca)();
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", out_path));
  RolloutWriter writer(out, rollout_header(cfg));
  const auto recorded = record_episode(*policy, cfg, seed, mode == "train", &writer);
  if (!record_path.empty()) {
    std::ofstream rec(record_path, std::ios::binary);
    rec << serialize(recorded.record) << '\n';
  }
  const auto& r = recorded.record;
  fmt::print("seed {} outcome {} steps {} nav_time {:.2f} path_length {:.2f} -> {}\n", r.seed, to_string(r.outcome),
             r.steps.size(), r.nav_time, r.path_length, out_path);
  return 0;
}

int run_evaluate(const std::string& config_path, const std::string& policy_name, int episodes,
                 std::uint64_t base_seed, const std::string& report_path, const std::string& policy_cmd,
                 int workers) {
  const SimConfig cfg = resolve_config(config_path);
  EvalReport report;
  if (policy_name == "external") {
    if (policy_cmd.empty()) throw Error("--policy external needs --policy-cmd");
    report = evaluate([&] { return spawn_external_policy(policy_cmd, cfg); }, cfg, episodes, base_seed, 1);
  } else {
    report = evaluate(builtin_policy(policy_name, cfg.orca), cfg, episodes, base_seed, workers);
  }
  const std::string json = to_json_string(report);
  if (report_path.empty()) {
    std::cout << json << '\n';
  } else {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write {}", report_path));
    out << json << '\n';
    std::cerr << json << '\n';
  }
  return 0;
}

int run_render(const std::string& config_path, const std::string& episode_path, std::int64_t step,
               const std::string& layer) {
  std::optional<std::string> expected_hash;
  SimConfig cfg;
  if (!config_path.empty() || std::getenv("PASCROWD_CONFIG") != nullptr) {
    cfg = resolve_config(config_path);
    expected_hash = cfg.hash();
  }
  const Rollout rollout = read_rollout(episode_path, cfg.grid, expected_hash);
  for (const auto& s : rollout.steps) {
    if (s.step != step) continue;
    if (layer == "gt") {
      if (!s.gt) throw Error("rollout has no ground-truth grids (recorded in eval mode)");
      std::cout << to_text(*s.gt);
    } else {
      std::cout << to_text(s.obs);
    }
    return 0;
  }
  throw Error(fmt::format("step {} not in {}", step, episode_path));
}

int run_serve(const std::string& config_path, const std::string& transport, std::uint16_t port) {
  const SimConfig cfg = resolve_config(config_path);
  if (transport == "stdio") {
    std::ios::sync_with_stdio(false);
    serve_stream(std::cin, std::cout, cfg);
    return 0;
  }
  TcpServer server(port, cfg);
  std::cerr << fmt::format("listening on port {}\n", server.port());
  server.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowd navigation simulator with occlusion-aware occupancy grids"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config (falls back to $PASCROWD_CONFIG, then defaults)");

  auto* simulate = app.add_subcommand("simulate", "Run one episode and write a rollout file");
  std::uint64_t seed = 0;
  std::string policy_name = "gt-orca";
  std::string out_path = "episode.pasroll";
  std::string mode = "train";
  std::string record_path;
  simulate->add_option("--config", config_path, "JSON config");
  simulate->add_option("--seed", seed, "Scenario seed")->required();
  simulate->add_option("--policy", policy_name, "gt-orca | obs-orca")->check(CLI::IsMember({"gt-orca", "obs-orca"}));
  simulate->add_option("--out", out_path, "Rollout file");
  simulate->add_option("--mode", mode, "train stores ground-truth grids")->check(CLI::IsMember({"train", "eval"}));
  simulate->add_option("--record", record_path, "Also write the episode record as JSON");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run seeded episodes and report aggregate metrics");
  int episodes = 500;
  std::uint64_t base_seed = 0;
  std::string report_path;
  std::string policy_cmd;
  int workers = 1;
  evaluate_cmd->add_option("--config", config_path, "JSON config");
  evaluate_cmd->add_option("--policy", policy_name, "gt-orca | obs-orca | external")
      ->required()
      ->check(CLI::IsMember({"gt-orca", "obs-orca", "external"}));
  evaluate_cmd->add_option("--episodes", episodes, "Episode count")->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--base-seed", base_seed, "First seed");
  evaluate_cmd->add_option("--report", report_path, "Report path (stdout when omitted)");
  evaluate_cmd->add_option("--policy-cmd", policy_cmd, "Shell command of the external policy");
  evaluate_cmd->add_option("--workers", workers, "Parallel episode workers")->check(CLI::PositiveNumber);

  auto* render = app.add_subcommand("render", "Print one grid of a rollout file in the OGM text format");
  std::string episode_path;
  std::int64_t step = 0;
  std::string layer = "obs";
  render->add_option("--config", config_path, "Config the rollout must have been recorded with");
  render->add_option("--episode", episode_path, "Rollout file")->required();
  render->add_option("--step", step, "Step index")->required();
  render->add_option("--layer", layer, "obs | gt")->check(CLI::IsMember({"obs", "gt"}));

  auto* serve = app.add_subcommand("serve", "Serve the NDJSON stepping protocol");
  std::string transport = "stdio";
  std::uint16_t port = 5555;
  serve->add_option("--config", config_path, "JSON config");
  serve->add_option("--transport", transport, "stdio | tcp")->check(CLI::IsMember({"stdio", "tcp"}));
  serve->add_option("--port", port, "TCP port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run_simulate(config_path, seed, policy_name, out_path, mode, record_path);
    if (*evaluate_cmd) {
      return run_evaluate(config_path, policy_name, episodes, base_seed, report_path, policy_cmd, workers);
    }
    if (*render) return run_render(config_path, episode_path, step, layer);
    if (*serve) return run_serve(config_path, transport, port);
  } catch (const RolloutError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
