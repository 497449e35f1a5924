#include "pg/scenario.hpp"

#include <stdexcept>

namespace pg {

void ScenarioConfig::validate() const {
  if (classes.size() < 3) {
    throw std::invalid_argument("ScenarioConfig: need >= 3 vehicles");
  }
  if (init_positions.size() != classes.size()) {
    throw std::invalid_argument("ScenarioConfig: one position dist per vehicle");
  }
  if (!init_speeds_per_vehicle.empty() &&
      init_speeds_per_vehicle.size() != classes.size()) {
    throw std::invalid_argument("ScenarioConfig: per-vehicle speeds size mismatch");
  }
  if (!(dt > 0.0) || horizon_steps <= 0) {
    throw std::invalid_argument("ScenarioConfig: dt and horizon must be positive");
  }
  light.validate();
  heavy.validate();
}

namespace {

ScenarioConfig chain_scenario(std::vector<VehicleClass> classes) {
  ScenarioConfig cfg;
  cfg.classes = std::move(classes);
  // 16 m initial gaps between 2 m vehicles: front bumpers 18 m apart,
  // rear-most at 0.
  const std::size_t n = cfg.classes.size();
  cfg.init_positions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cfg.init_positions[i] = {18.0 * static_cast<double>(n - 1 - i), 0.5};
  }
  return cfg;
}

}  // namespace

ScenarioConfig make_scenario(ScenarioId id, int multi_rl_middles) {
  switch (id) {
    case ScenarioId::Brake1:
      return chain_scenario({VehicleClass::Light, VehicleClass::Light,
                             VehicleClass::Heavy});
    case ScenarioId::Brake2:
      return chain_scenario({VehicleClass::Light, VehicleClass::Light,
                             VehicleClass::Light});
    case ScenarioId::MultiRL: {
      if (multi_rl_middles < 1) {
        throw std::invalid_argument("MultiRL needs >= 1 middle vehicle");
      }
      std::vector<VehicleClass> classes(static_cast<std::size_t>(multi_rl_middles) + 2,
                                        VehicleClass::Light);
      classes.back() = VehicleClass::Heavy;
      return chain_scenario(std::move(classes));
    }
    case ScenarioId::TrainRandom: {
      ScenarioConfig cfg = chain_scenario({VehicleClass::Light, VehicleClass::Light,
                                           VehicleClass::Light});
      cfg.init_speed = {25.0, 1.0};
      cfg.leader_brake_onset_s = {1.0, 1.5};
      cfg.leader_brake_decel = {-3.0, 0.2};
      cfg.cruise_accel_noise = {0.0, 0.01};
      cfg.randomize_follower_class = true;
      return cfg;
    }
  }
  throw std::invalid_argument("make_scenario: unknown scenario id");
}

ScenarioConfig deterministic(ScenarioConfig cfg) {
  for (auto& p : cfg.init_positions) p.std = 0.0;
  for (auto& p : cfg.init_speeds_per_vehicle) p.std = 0.0;
  cfg.init_speed.std = 0.0;
  cfg.leader_brake_onset_s = {cfg.leader_brake_onset_s.midpoint(),
                              cfg.leader_brake_onset_s.midpoint()};
  cfg.leader_brake_decel.std = 0.0;
  cfg.follower_decel_onset_s = {cfg.follower_decel_onset_s.midpoint(),
                                cfg.follower_decel_onset_s.midpoint()};
  cfg.follower_decel.std = 0.0;
  cfg.cruise_accel_noise = {0.0, 0.0};
  cfg.randomize_follower_class = false;
  return cfg;
}

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::Brake1: return "brake1";
    case ScenarioId::Brake2: return "brake2";
    case ScenarioId::MultiRL: return "multirl";
    case ScenarioId::TrainRandom: return "train_random";
  }
  return "unknown";
}

std::optional<ScenarioId> scenario_from_name(const std::string& name) {
  if (name == "brake1") return ScenarioId::Brake1;
  if (name == "brake2") return ScenarioId::Brake2;
  if (name == "multirl") return ScenarioId::MultiRL;
  if (name == "train_random" || name == "trainrandom") return ScenarioId::TrainRandom;
  return std::nullopt;
}

void to_json(nlohmann::json& j, const NormalDist& d) {
  j = nlohmann::json{{"mean", d.mean}, {"std", d.std}};
}

void from_json(const nlohmann::json& j, NormalDist& d) {
  d.mean = j.at("mean").get<double>();
  d.std = j.value("std", 0.0);
}

void to_json(nlohmann::json& j, const UniformDist& d) {
  j = nlohmann::json{{"lo", d.lo}, {"hi", d.hi}};
}

void from_json(const nlohmann::json& j, UniformDist& d) {
  d.lo = j.at("lo").get<double>();
  d.hi = j.at("hi").get<double>();
}

void to_json(nlohmann::json& j, const VehicleSpec& s) {
  j = nlohmann::json{{"class", s.cls == VehicleClass::Heavy ? "heavy" : "light"},
                     {"length", s.length},
                     {"max_decel", s.max_decel},
                     {"max_accel", s.max_accel}};
}

void from_json(const nlohmann::json& j, VehicleSpec& s) {
  const std::string cls = j.value("class", "light");
  s.cls = cls == "heavy" ? VehicleClass::Heavy : VehicleClass::Light;
  s.length = j.value("length", s.length);
  s.max_decel = j.value("max_decel", s.max_decel);
  s.max_accel = j.value("max_accel", s.max_accel);
}

void to_json(nlohmann::json& j, const ScenarioConfig& cfg) {
  std::vector<std::string> classes;
  classes.reserve(cfg.classes.size());
  for (auto c : cfg.classes) {
    classes.push_back(c == VehicleClass::Heavy ? "heavy" : "light");
  }
  j = nlohmann::json{
      {"classes", classes},
      {"init_positions", cfg.init_positions},
      {"init_speed", cfg.init_speed},
      {"leader_brake_onset_s", cfg.leader_brake_onset_s},
      {"leader_brake_decel", cfg.leader_brake_decel},
      {"follower_policy", cfg.follower_policy == FollowerPolicyKind::RandomDecel
                              ? "random_decel"
                              : "baseline_adas"},
      {"follower_decel_onset_s", cfg.follower_decel_onset_s},
      {"follower_decel", cfg.follower_decel},
      {"randomize_follower_class", cfg.randomize_follower_class},
      {"cruise_accel_noise", cfg.cruise_accel_noise},
      {"horizon_steps", cfg.horizon_steps},
      {"dt", cfg.dt},
      {"ttc_threshold", cfg.ttc_threshold},
      {"oracle_sensing", cfg.oracle_sensing},
      {"kf_process_jerk_std", cfg.kf_process_jerk_std},
      {"kf_meas_std", cfg.kf_meas_std},
      {"light", cfg.light},
      {"heavy", cfg.heavy}};
  if (!cfg.init_speeds_per_vehicle.empty()) {
    j["init_speeds_per_vehicle"] = cfg.init_speeds_per_vehicle;
  }
}

void from_json(const nlohmann::json& j, ScenarioConfig& cfg) {
  cfg = ScenarioConfig{};
  for (const auto& c : j.at("classes")) {
    cfg.classes.push_back(c.get<std::string>() == "heavy" ? VehicleClass::Heavy
                                                          : VehicleClass::Light);
  }
  j.at("init_positions").get_to(cfg.init_positions);
  if (j.contains("init_speed")) j.at("init_speed").get_to(cfg.init_speed);
  if (j.contains("init_speeds_per_vehicle")) {
    j.at("init_speeds_per_vehicle").get_to(cfg.init_speeds_per_vehicle);
  }
  if (j.contains("leader_brake_onset_s")) {
    j.at("leader_brake_onset_s").get_to(cfg.leader_brake_onset_s);
  }
  if (j.contains("leader_brake_decel")) {
    j.at("leader_brake_decel").get_to(cfg.leader_brake_decel);
  }
  if (j.contains("follower_policy")) {
    cfg.follower_policy = j.at("follower_policy").get<std::string>() == "random_decel"
                              ? FollowerPolicyKind::RandomDecel
                              : FollowerPolicyKind::BaselineAdas;
  }
  if (j.contains("follower_decel_onset_s")) {
    j.at("follower_decel_onset_s").get_to(cfg.follower_decel_onset_s);
  }
  if (j.contains("follower_decel")) j.at("follower_decel").get_to(cfg.follower_decel);
  cfg.randomize_follower_class = j.value("randomize_follower_class", false);
  if (j.contains("cruise_accel_noise")) {
    j.at("cruise_accel_noise").get_to(cfg.cruise_accel_noise);
  }
  cfg.horizon_steps = j.value("horizon_steps", cfg.horizon_steps);
  cfg.dt = j.value("dt", cfg.dt);
  cfg.ttc_threshold = j.value("ttc_threshold", cfg.ttc_threshold);
  cfg.oracle_sensing = j.value("oracle_sensing", false);
  cfg.kf_process_jerk_std = j.value("kf_process_jerk_std", cfg.kf_process_jerk_std);
  cfg.kf_meas_std = j.value("kf_meas_std", cfg.kf_meas_std);
  if (j.contains("light")) j.at("light").get_to(cfg.light);
  if (j.contains("heavy")) j.at("heavy").get_to(cfg.heavy);
}

}  // namespace pg
