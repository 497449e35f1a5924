#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pg/baseline.hpp"
#include "pg/kalman.hpp"
#include "pg/rng.hpp"
#include "pg/scenario.hpp"
#include "pg/sim.hpp"

namespace pg {

constexpr double kStepReward = 15.0;
constexpr double kCollisionReward = -3000.0;

// The 8-component MDP state seen by one controlled vehicle: gaps to its
// neighbors, and velocity/acceleration of the leader, itself, and the
// follower (neighbor values Kalman-estimated unless oracle sensing is on).
struct Observation {
  double d_fm = 0.0;
  double d_mr = 0.0;
  double v_f = 0.0;
  double v_m = 0.0;
  double v_r = 0.0;
  double a_f = 0.0;
  double a_m = 0.0;
  double a_r = 0.0;

  std::array<double, 8> as_array() const {
    return {d_fm, d_mr, v_f, v_m, v_r, a_f, a_m, a_r};
  }
};

// Fixed affine scaling applied before observations reach a network.
struct NormScales {
  double distance = 50.0;      // m
  double velocity = 25.0;      // m/s
  double acceleration = 7.5;   // m/s^2
};

std::array<double, 8> normalize_obs(const Observation& obs,
                                    const NormScales& scales = {});
Observation denormalize_obs(const std::array<double, 8>& v,
                            const NormScales& scales = {});

double discounted_return(std::span<const double> rewards, double gamma);

struct StepInfo {
  double reward = 0.0;
  bool done = false;  // first collision or horizon reached
  std::vector<std::pair<std::size_t, std::size_t>> collisions;
};

// One running episode over a vehicle chain: scripted leader, per-middle
// sensing with Kalman tracks, and a scripted or TTC-reactive rear follower.
// advance() keeps integrating past a collision so diagnostic runs can log
// the full horizon; the MDP reward ledger closes at the first collision.
class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed);

  const ScenarioConfig& config() const { return cfg_; }
  const Chain& chain() const { return chain_; }
  std::size_t vehicle_count() const { return chain_.size(); }
  std::size_t middle_count() const { return chain_.size() - 2; }
  long step_count() const { return step_; }
  double time() const { return static_cast<double>(step_) * cfg_.dt; }
  bool horizon_reached() const { return step_ >= cfg_.horizon_steps; }
  bool collided() const { return first_collision_step_ >= 0; }
  long first_collision_step() const { return first_collision_step_; }
  bool all_stopped() const;
  long leader_brake_step() const { return leader_brake_step_; }
  double leader_brake_decel() const { return leader_brake_decel_; }

  const VehicleSpec& middle_spec(std::size_t middle) const;
  Observation observe(std::size_t middle) const;

  // Advance one dt with one acceleration command per middle vehicle.
  StepInfo advance(std::span<const double> middle_cmds);

 private:
  double follower_command();
  void refresh_tracks();

  ScenarioConfig cfg_;
  Chain chain_;
  Rng rng_;
  long step_ = 0;
  long first_collision_step_ = -1;

  long leader_brake_step_ = 0;
  double leader_brake_decel_ = 0.0;

  BaselineController follower_ctrl_;
  KalmanTrack follower_front_track_;
  long follower_decel_step_ = 0;   // RandomDecel onset
  double follower_decel_ = 0.0;    // RandomDecel magnitude

  struct MiddleSensors {
    KalmanTrack front;
    KalmanTrack rear;
  };
  std::vector<MiddleSensors> sensors_;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  std::vector<std::pair<std::size_t, std::size_t>> collisions;
};

// Single-agent MDP: exactly one RL-controlled middle vehicle.
class Env {
 public:
  explicit Env(const ScenarioConfig& cfg);

  Observation reset(std::uint64_t seed);
  StepResult step(double a_cmd);

  bool active() const { return active_; }
  long step_count() const;
  const ScenarioConfig& config() const { return cfg_; }
  const Simulation& simulation() const;
  const VehicleSpec& ego_spec() const;

 private:
  ScenarioConfig cfg_;
  std::vector<Simulation> sim_;  // 0 or 1 elements
  bool active_ = false;
};

}  // namespace pg
