#include "pg/config.hpp"

#include <fstream>
#include <stdexcept>

namespace pg {

ScenarioConfig AppConfig::scenario(ScenarioId id) const {
  ScenarioConfig cfg = make_scenario(id, multi_rl_middles);
  cfg.dt = dt;
  cfg.horizon_steps = horizon_steps;
  cfg.light = light;
  cfg.heavy = heavy;
  if (scenario_patch) {
    nlohmann::json j = cfg;
    j.update(*scenario_patch);
    cfg = j.get<ScenarioConfig>();
  }
  cfg.validate();
  return cfg;
}

TrainOptions AppConfig::train_options(std::uint64_t seed) const {
  TrainOptions opts;
  opts.episodes = episodes;
  opts.exploration_episodes = exploration_episodes;
  opts.seed = seed;
  opts.stop_ma_target = stop_ma_target;
  opts.ma_window = ma_window;
  opts.explore_scenario = scenario(ScenarioId::TrainRandom);
  opts.explore_scenario.follower_policy = FollowerPolicyKind::RandomDecel;
  opts.exploit_scenario = scenario(ScenarioId::TrainRandom);
  return opts;
}

AppConfig parse_app_config(const nlohmann::json& j) {
  AppConfig cfg;
  if (j.contains("sim")) {
    const auto& sim = j.at("sim");
    cfg.dt = sim.value("dt", cfg.dt);
    cfg.horizon_steps = sim.value("horizon_steps", cfg.horizon_steps);
    if (sim.contains("light")) sim.at("light").get_to(cfg.light);
    if (sim.contains("heavy")) sim.at("heavy").get_to(cfg.heavy);
  }
  if (j.contains("scenario")) {
    nlohmann::json patch = j.at("scenario");
    cfg.multi_rl_middles = patch.value("multi_rl_middles", cfg.multi_rl_middles);
    patch.erase("multi_rl_middles");
    if (!patch.empty()) cfg.scenario_patch = patch;
  }
  if (j.contains("agent")) j.at("agent").get_to(cfg.agent);
  if (j.contains("training")) {
    const auto& tr = j.at("training");
    cfg.episodes = tr.value("episodes", cfg.episodes);
    cfg.exploration_episodes =
        tr.value("exploration_episodes", cfg.exploration_episodes);
    cfg.stop_ma_target = tr.value("stop_ma_target", cfg.stop_ma_target);
    cfg.ma_window = tr.value("ma_window", cfg.ma_window);
  }
  return cfg;
}

AppConfig load_app_config(const std::string& path) {
  if (path.empty()) return AppConfig{};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config: invalid JSON in " + path + ": " + e.what());
  }
  return parse_app_config(j);
}

}  // namespace pg
