#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pg/rng.hpp"
#include "pg/sim.hpp"

namespace pg {

struct NormalDist {
  double mean = 0.0;
  double std = 0.0;
  double sample(Rng& rng) const { return rng.normal(mean, std); }
};

struct UniformDist {
  double lo = 0.0;
  double hi = 0.0;
  double sample(Rng& rng) const { return lo >= hi ? lo : rng.uniform(lo, hi); }
  double midpoint() const { return 0.5 * (lo + hi); }
};

enum class FollowerPolicyKind { BaselineAdas, RandomDecel };
enum class ScenarioId { Brake1, Brake2, MultiRL, TrainRandom };

// Full specification of one episode family: the vehicle chain, the initial
// condition distributions, the leader's scripted brake, the rear follower's
// policy, and the horizon. Distributions collapse to their means/midpoints
// under deterministic(); that is how the fixed evaluation scenarios run.
struct ScenarioConfig {
  std::vector<VehicleClass> classes;       // front to rear, >= 3 vehicles
  std::vector<NormalDist> init_positions;  // front-bumper coordinates, m
  NormalDist init_speed{25.0, 0.0};        // per-vehicle draw, m/s
  // Per-vehicle speed overrides (front to rear); empty = use init_speed.
  std::vector<NormalDist> init_speeds_per_vehicle;

  UniformDist leader_brake_onset_s{1.0, 1.0};
  NormalDist leader_brake_decel{-3.0, 0.0};

  FollowerPolicyKind follower_policy = FollowerPolicyKind::BaselineAdas;
  UniformDist follower_decel_onset_s{1.0, 1.5};  // RandomDecel only
  NormalDist follower_decel{-4.0, 1.5};          // clipped to [-max_decel, 0]
  bool randomize_follower_class = false;         // coin-flip Light/Heavy at reset

  NormalDist cruise_accel_noise{0.0, 0.0};  // jitter while a vehicle cruises

  long horizon_steps = 1500;
  double dt = 0.01;
  double ttc_threshold = 1.4;

  bool oracle_sensing = false;  // bypass the Kalman filter in observations
  double kf_process_jerk_std = 2.0;
  double kf_meas_std = 0.05;

  // Vehicle parameter table, overridable by config files.
  VehicleSpec light = VehicleSpec::light();
  VehicleSpec heavy = VehicleSpec::heavy();

  VehicleSpec spec_of(VehicleClass cls) const {
    return cls == VehicleClass::Heavy ? heavy : light;
  }
  std::size_t middle_count() const {
    return classes.size() >= 2 ? classes.size() - 2 : 0;
  }
  void validate() const;
};

// The Table-style scenario library. Brake1: light leader, light RL ego,
// heavy follower. Brake2: all light. MultiRL: light leader, `multi_rl_middles`
// RL middles, heavy follower. TrainRandom: randomized training episode.
ScenarioConfig make_scenario(ScenarioId id, int multi_rl_middles = 3);

// Collapse every distribution to its mean/midpoint.
ScenarioConfig deterministic(ScenarioConfig cfg);

std::string to_string(ScenarioId id);
std::optional<ScenarioId> scenario_from_name(const std::string& name);

void to_json(nlohmann::json& j, const ScenarioConfig& cfg);
void from_json(const nlohmann::json& j, ScenarioConfig& cfg);
void to_json(nlohmann::json& j, const NormalDist& d);
void from_json(const nlohmann::json& j, NormalDist& d);
void to_json(nlohmann::json& j, const UniformDist& d);
void from_json(const nlohmann::json& j, UniformDist& d);
void to_json(nlohmann::json& j, const VehicleSpec& s);
void from_json(const nlohmann::json& j, VehicleSpec& s);

}  // namespace pg
