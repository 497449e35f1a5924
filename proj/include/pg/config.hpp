#pragma once

#include <optional>
#include <string>

#include "pg/ddpg.hpp"
#include "pg/scenario.hpp"

namespace pg {

// Experiment configuration file: JSON with {sim, scenario, agent, training}
// sections, every field optional with the documented defaults.
struct AppConfig {
  // sim
  double dt = 0.01;
  long horizon_steps = 1500;
  VehicleSpec light = VehicleSpec::light();
  VehicleSpec heavy = VehicleSpec::heavy();

  // scenario
  int multi_rl_middles = 3;
  std::optional<nlohmann::json> scenario_patch;  // merged onto the scenario JSON

  // agent
  AgentConfig agent;

  // training
  long episodes = 2000;
  long exploration_episodes = 50;
  double stop_ma_target = 0.0;
  int ma_window = 30;

  // Scenario with sim overrides and the scenario patch applied.
  ScenarioConfig scenario(ScenarioId id) const;
  TrainOptions train_options(std::uint64_t seed) const;
};

AppConfig parse_app_config(const nlohmann::json& j);
AppConfig load_app_config(const std::string& path);  // "" -> defaults

}  // namespace pg
