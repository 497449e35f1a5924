#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "pg/config.hpp"
#include "pg/ddpg.hpp"
#include "pg/eval.hpp"

namespace fs = std::filesystem;
using namespace pg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCollision = 2;

std::uint64_t seed_or_env(std::uint64_t seed, bool seed_set) {
  if (seed_set) return seed;
  if (const char* env = std::getenv("PLATOON_GUARD_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 1;
}

// "1..5" or "1,2,7" or a single number
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t lo = std::stoull(text.substr(0, dots));
    const std::uint64_t hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("seed range is empty: " + text);
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t at = 0;
  while (at < text.size()) {
    const auto comma = text.find(',', at);
    const std::string tok = text.substr(at, comma == std::string::npos ? std::string::npos
                                                                       : comma - at);
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    at = comma + 1;
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds in: " + text);
  return seeds;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_train(const std::string& config_path, std::uint64_t seed, long episodes,
              double stop_ma, const std::string& out_dir) {
  AppConfig cfg = load_app_config(config_path);
  if (episodes > 0) cfg.episodes = episodes;
  if (stop_ma > 0) cfg.stop_ma_target = stop_ma;

  fs::create_directories(out_dir);
  DdpgAgent agent(cfg.agent, seed);
  TrainOptions opts = cfg.train_options(seed);
  long last_report = -1;
  opts.on_episode = [&](const EpisodeStats& e) {
    if (e.episode - last_report >= 25 || e.episode == 0) {
      std::cerr << "episode " << e.episode << " return " << e.undiscounted_return
                << " noise " << e.noise_std << "\n";
      last_report = e.episode;
    }
    return true;
  };
  const TrainingLog log = train(agent, opts);

  write_text(fs::path(out_dir) / "training_log.csv", log.to_csv());
  agent.save_checkpoint((fs::path(out_dir) / "checkpoint.json").string());
  nlohmann::json meta{{"seed", seed},
                      {"episodes_run", log.episodes.size()},
                      {"reached_target", log.reached_target},
                      {"target_episode", log.target_episode},
                      {"agent", cfg.agent}};
  write_text(fs::path(out_dir) / "meta.json", meta.dump(2) + "\n");
  std::cout << "trained " << log.episodes.size() << " episodes; checkpoint at "
            << (fs::path(out_dir) / "checkpoint.json") << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& config_path, const std::string& scenario_name,
             const std::string& controller_name, const std::string& checkpoint,
             std::uint64_t seed, bool stochastic, const std::string& out_dir) {
  AppConfig cfg = load_app_config(config_path);
  const auto id = scenario_from_name(scenario_name);
  if (!id) throw std::invalid_argument("unknown scenario: " + scenario_name);

  ControllerKind kind;
  std::unique_ptr<DdpgAgent> agent;
  if (controller_name == "baseline") {
    kind = ControllerKind::Baseline;
  } else if (controller_name == "rl") {
    kind = ControllerKind::RlPolicy;
    if (checkpoint.empty()) throw std::invalid_argument("--checkpoint required for rl");
    agent = std::make_unique<DdpgAgent>(DdpgAgent::load_checkpoint(checkpoint));
  } else {
    throw std::invalid_argument("unknown controller: " + controller_name);
  }

  EvalOptions opts;
  opts.deterministic = !stochastic;
  opts.seed = seed;
  const auto [log, report] =
      evaluate(cfg.scenario(*id), kind, agent.get(), opts, scenario_name);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    export_trajectory_csv(log, (fs::path(out_dir) / "trajectory.csv").string());
    write_text(fs::path(out_dir) / "report.json", report_to_json(report).dump(2) + "\n");
    export_trajectory_svg(log, ChartKind::TimeSpace,
                          (fs::path(out_dir) / "timespace.svg").string());
    export_trajectory_svg(log, ChartKind::TimeSpeed,
                          (fs::path(out_dir) / "timespeed.svg").string());
    export_trajectory_svg(log, ChartKind::Spacing,
                          (fs::path(out_dir) / "spacing.svg").string());
  }

  std::cout << report_to_json(report).dump(2) << "\n";
  return report.collided ? kExitCollision : kExitOk;
}

int cmd_feasibility(const std::string& config_path, const std::string& scenario_name) {
  AppConfig cfg = load_app_config(config_path);
  const auto id = scenario_from_name(scenario_name);
  if (!id) throw std::invalid_argument("unknown scenario: " + scenario_name);

  const FeasibilityResult res = feasibility_oracle(cfg.scenario(*id));
  nlohmann::json j{{"scenario", scenario_name},
                   {"feasible", res.feasible},
                   {"min_gap", res.min_gap}};
  if (res.feasible) {
    j["plan"] = {{"brake_onset_step", res.plan.brake_onset_step},
                 {"decel", res.plan.decel},
                 {"accel_start_step", res.plan.accel_start_step},
                 {"accel", res.plan.accel}};
  }
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_suite(const std::string& config_path, const std::string& seeds_text,
              long episodes, double stop_ma, int jobs, const std::string& out_dir) {
  AppConfig cfg = load_app_config(config_path);
  if (episodes > 0) cfg.episodes = episodes;
  if (stop_ma > 0) cfg.stop_ma_target = stop_ma;

  SuiteOptions opts;
  opts.seeds = parse_seed_list(seeds_text);
  opts.agent = cfg.agent;
  opts.train = cfg.train_options(0);
  opts.jobs = jobs;
  opts.out_dir = out_dir;
  const SuiteResult res = run_training_suite(opts);

  for (std::size_t i = 0; i < res.seeds.size(); ++i) {
    const auto& log = res.logs[i];
    std::cout << "seed " << res.seeds[i] << ": " << log.episodes.size()
              << " episodes, final return "
              << (log.episodes.empty() ? 0.0
                                       : log.episodes.back().undiscounted_return)
              << (log.reached_target ? " (reached target at episode " +
                                           std::to_string(log.target_episode) + ")"
                                     : "")
              << "\n";
  }
  return kExitOk;
}

int cmd_plot(const std::string& in_path, const std::string& kind_name,
             const std::string& out_path) {
  ChartKind kind;
  if (kind_name == "timespace") {
    kind = ChartKind::TimeSpace;
  } else if (kind_name == "timespeed") {
    kind = ChartKind::TimeSpeed;
  } else if (kind_name == "spacing") {
    kind = ChartKind::Spacing;
  } else {
    throw std::invalid_argument("unknown chart kind: " + kind_name);
  }
  export_trajectory_svg(parse_trajectory_csv(in_path), kind, out_path);
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Longitudinal car-following simulator with a TTC baseline ADAS "
               "and a DDPG acceleration policy"};
  app.require_subcommand(1);

  std::string config_path, out_dir, scenario, controller = "baseline", checkpoint;
  std::string seeds_text = "1..5", plot_in, plot_kind = "timespace", plot_out;
  std::uint64_t seed = 1;
  long episodes = 0;
  double stop_ma = 0.0;
  int jobs = 0;
  bool stochastic = false;

  auto* train_cmd = app.add_subcommand("train", "Train a DDPG policy");
  train_cmd->add_option("--config", config_path, "JSON config file");
  auto* train_seed = train_cmd->add_option("--seed", seed, "Training seed")
                         ->envname("PLATOON_GUARD_SEED");
  train_cmd->add_option("--episodes", episodes, "Episode budget");
  train_cmd->add_option("--stop-ma", stop_ma,
                        "Stop once the 30-episode moving average reaches this");
  train_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto add_eval_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--scenario", scenario, "brake1|brake2|multirl|train_random")
        ->required();
    cmd->add_option("--checkpoint", checkpoint, "Policy checkpoint (rl controller)");
    cmd->add_option("--seed", seed, "Episode seed")->envname("PLATOON_GUARD_SEED");
    cmd->add_flag("--stochastic", stochastic,
                  "Sample scenario randomness instead of the deterministic means");
    cmd->add_option("--out", out_dir, "Output directory for logs and charts");
  };
  auto* eval_cmd = app.add_subcommand("eval", "Run a controller on a scenario");
  eval_cmd->add_option("--controller", controller, "baseline|rl");
  add_eval_options(eval_cmd);
  auto* baseline_cmd =
      app.add_subcommand("baseline", "Run the baseline ADAS on a scenario");
  add_eval_options(baseline_cmd);

  auto* feas_cmd = app.add_subcommand("feasibility",
                                      "Search for a collision-free open-loop plan");
  feas_cmd->add_option("--config", config_path, "JSON config file");
  feas_cmd->add_option("--scenario", scenario, "brake1|brake2|multirl")->required();

  auto* suite_cmd = app.add_subcommand("suite", "Multi-seed training suite");
  suite_cmd->add_option("--config", config_path, "JSON config file");
  suite_cmd->add_option("--seeds", seeds_text, "e.g. \"1..5\" or \"3,7,9\"");
  suite_cmd->add_option("--episodes", episodes, "Episode budget per seed");
  suite_cmd->add_option("--stop-ma", stop_ma, "Per-seed early-stop target");
  suite_cmd->add_option("--jobs", jobs, "Parallel trainings (default: cores)");
  suite_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* plot_cmd = app.add_subcommand("plot", "Render a trajectory CSV as SVG");
  plot_cmd->add_option("--in", plot_in, "trajectory.csv")->required();
  plot_cmd->add_option("--kind", plot_kind, "timespace|timespeed|spacing");
  plot_cmd->add_option("--out", plot_out, "Output SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train_cmd)) {
      return cmd_train(config_path, seed_or_env(seed, !train_seed->empty()), episodes,
                       stop_ma, out_dir);
    }
    if (app.got_subcommand(eval_cmd)) {
      return cmd_eval(config_path, scenario, controller, checkpoint, seed, stochastic,
                      out_dir);
    }
    if (app.got_subcommand(baseline_cmd)) {
      return cmd_eval(config_path, scenario, "baseline", checkpoint, seed, stochastic,
                      out_dir);
    }
    if (app.got_subcommand(feas_cmd)) return cmd_feasibility(config_path, scenario);
    if (app.got_subcommand(suite_cmd)) {
      return cmd_suite(config_path, seeds_text, episodes, stop_ma, jobs, out_dir);
    }
    if (app.got_subcommand(plot_cmd)) return cmd_plot(plot_in, plot_kind, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
