#include "pg/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pg {

std::array<double, 8> normalize_obs(const Observation& obs, const NormScales& s) {
  return {obs.d_fm / s.distance, obs.d_mr / s.distance,
          obs.v_f / s.velocity,  obs.v_m / s.velocity,
          obs.v_r / s.velocity,  obs.a_f / s.acceleration,
          obs.a_m / s.acceleration, obs.a_r / s.acceleration};
}

Observation denormalize_obs(const std::array<double, 8>& v, const NormScales& s) {
  Observation obs;
  obs.d_fm = v[0] * s.distance;
  obs.d_mr = v[1] * s.distance;
  obs.v_f = v[2] * s.velocity;
  obs.v_m = v[3] * s.velocity;
  obs.v_r = v[4] * s.velocity;
  obs.a_f = v[5] * s.acceleration;
  obs.a_m = v[6] * s.acceleration;
  obs.a_r = v[7] * s.acceleration;
  return obs;
}

double discounted_return(std::span<const double> rewards, double gamma) {
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("discounted_return: gamma must be in [0, 1]");
  }
  double acc = 0.0;
  for (auto it = rewards.rbegin(); it != rewards.rend(); ++it) {
    acc = *it + gamma * acc;
  }
  return acc;
}

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed) {
  cfg_.validate();
  const std::size_t n = cfg_.classes.size();

  std::vector<VehicleClass> classes = cfg_.classes;
  if (cfg_.randomize_follower_class && rng_.uniform() < 0.5) {
    classes.back() = classes.back() == VehicleClass::Heavy ? VehicleClass::Light
                                                           : VehicleClass::Heavy;
  }

  chain_.dt = cfg_.dt;
  chain_.specs.clear();
  for (auto cls : classes) chain_.specs.push_back(cfg_.spec_of(cls));

  // Place vehicles; resample if a draw produces touching or overlapping
  // bumpers.
  const int kMaxRetries = 100;
  std::vector<double> xs(n);
  bool placed = false;
  for (int attempt = 0; attempt < kMaxRetries && !placed; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) xs[i] = cfg_.init_positions[i].sample(rng_);
    std::sort(xs.begin(), xs.end(), std::greater<>());
    placed = true;
    for (std::size_t i = 0; i + 1 < n && placed; ++i) {
      if (xs[i] - chain_.specs[i].length - xs[i + 1] <= 0.0) placed = false;
    }
  }
  if (!placed) {
    throw std::runtime_error("Simulation: could not place vehicles without overlap");
  }

  chain_.states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NormalDist& speed = cfg_.init_speeds_per_vehicle.empty()
                                  ? cfg_.init_speed
                                  : cfg_.init_speeds_per_vehicle[i];
    chain_.states[i] = {xs[i], std::max(0.0, speed.sample(rng_)), 0.0};
  }
  chain_.validate_initial();

  leader_brake_step_ =
      std::lround(cfg_.leader_brake_onset_s.sample(rng_) / cfg_.dt);
  leader_brake_decel_ = cfg_.leader_brake_decel.sample(rng_);

  follower_ctrl_.ttc_threshold = cfg_.ttc_threshold;
  if (cfg_.follower_policy == FollowerPolicyKind::RandomDecel) {
    follower_decel_step_ =
        std::lround(cfg_.follower_decel_onset_s.sample(rng_) / cfg_.dt);
    follower_decel_ = std::clamp(cfg_.follower_decel.sample(rng_),
                                 -chain_.specs.back().max_decel, 0.0);
  }

  // Sensing starts from the known launch condition: position from the first
  // gap measurement, velocity at the scenario nominal, zero acceleration.
  auto nominal_speed = [&](std::size_t i) {
    return cfg_.init_speeds_per_vehicle.empty() ? cfg_.init_speed.mean
                                                : cfg_.init_speeds_per_vehicle[i].mean;
  };
  sensors_.resize(middle_count());
  for (std::size_t m = 0; m < middle_count(); ++m) {
    const std::size_t c = m + 1;
    const double x = chain_.states[c].x;
    const double len = chain_.specs[c].length;
    sensors_[m].front = make_track(
        neighbor_position_from_gap(x, len, std::max(0.0, gap(chain_, c - 1)), Side::Front),
        nominal_speed(c - 1), 0.0, cfg_.kf_process_jerk_std, cfg_.kf_meas_std);
    sensors_[m].rear = make_track(
        neighbor_position_from_gap(x, len, std::max(0.0, gap(chain_, c)), Side::Rear),
        nominal_speed(c + 1), 0.0, cfg_.kf_process_jerk_std, cfg_.kf_meas_std);
  }
  const std::size_t last = n - 1;
  follower_front_track_ = make_track(
      neighbor_position_from_gap(chain_.states[last].x, chain_.specs[last].length,
                                 std::max(0.0, gap(chain_, last - 1)), Side::Front),
      nominal_speed(last - 1), 0.0, cfg_.kf_process_jerk_std, cfg_.kf_meas_std);
}

bool Simulation::all_stopped() const {
  for (const auto& s : chain_.states) {
    if (s.v > 0.0) return false;
  }
  return true;
}

const VehicleSpec& Simulation::middle_spec(std::size_t middle) const {
  if (middle >= middle_count()) throw std::out_of_range("middle index");
  return chain_.specs[middle + 1];
}

Observation Simulation::observe(std::size_t middle) const {
  if (middle >= middle_count()) throw std::out_of_range("middle index");
  const std::size_t c = middle + 1;
  Observation obs;
  obs.d_fm = gap(chain_, c - 1);
  obs.d_mr = gap(chain_, c);
  obs.v_m = chain_.states[c].v;
  obs.a_m = chain_.states[c].a;
  if (cfg_.oracle_sensing) {
    obs.v_f = chain_.states[c - 1].v;
    obs.a_f = chain_.states[c - 1].a;
    obs.v_r = chain_.states[c + 1].v;
    obs.a_r = chain_.states[c + 1].a;
  } else {
    obs.v_f = sensors_[middle].front.velocity();
    obs.a_f = sensors_[middle].front.acceleration();
    obs.v_r = sensors_[middle].rear.velocity();
    obs.a_r = sensors_[middle].rear.acceleration();
  }
  return obs;
}

double Simulation::follower_command() {
  const std::size_t last = chain_.size() - 1;
  const VehicleSpec& spec = chain_.specs[last];
  const VehicleState& self = chain_.states[last];

  if (cfg_.follower_policy == FollowerPolicyKind::RandomDecel) {
    if (step_ >= follower_decel_step_) return follower_decel_;
    return self.v > 0.0 ? cfg_.cruise_accel_noise.sample(rng_) : 0.0;
  }

  const double gap_meas = std::max(0.0, gap(chain_, last - 1));
  const double v_front = cfg_.oracle_sensing ? chain_.states[last - 1].v
                                             : follower_front_track_.velocity();
  double a = baseline_action(follower_ctrl_, gap_meas, self.v, v_front, spec);
  if (!follower_ctrl_.aeb_latched && self.v > 0.0) {
    a += cfg_.cruise_accel_noise.sample(rng_);
  }
  return a;
}

void Simulation::refresh_tracks() {
  for (std::size_t m = 0; m < middle_count(); ++m) {
    const std::size_t c = m + 1;
    const double x = chain_.states[c].x;
    const double len = chain_.specs[c].length;
    sensors_[m].front =
        track_neighbor(x, len, std::max(0.0, gap(chain_, c - 1)), Side::Front,
                       sensors_[m].front, cfg_.dt);
    sensors_[m].rear =
        track_neighbor(x, len, std::max(0.0, gap(chain_, c)), Side::Rear,
                       sensors_[m].rear, cfg_.dt);
  }
  const std::size_t last = chain_.size() - 1;
  follower_front_track_ = track_neighbor(
      chain_.states[last].x, chain_.specs[last].length,
      std::max(0.0, gap(chain_, last - 1)), Side::Front, follower_front_track_,
      cfg_.dt);
}

StepInfo Simulation::advance(std::span<const double> middle_cmds) {
  if (horizon_reached()) throw std::logic_error("advance: past horizon");
  if (middle_cmds.size() != middle_count()) {
    throw std::invalid_argument("advance: one command per middle vehicle");
  }

  const std::size_t n = chain_.size();
  std::vector<double> cmds(n, 0.0);
  cmds[0] = scripted_leader_action(step_, leader_brake_step_, leader_brake_decel_);
  if (step_ < leader_brake_step_ && chain_.states[0].v > 0.0) {
    cmds[0] += cfg_.cruise_accel_noise.sample(rng_);
  }
  for (std::size_t m = 0; m < middle_cmds.size(); ++m) cmds[m + 1] = middle_cmds[m];
  cmds[n - 1] = follower_command();

  for (std::size_t i = 0; i < n; ++i) {
    chain_.states[i] = step_kinematics(chain_.states[i], chain_.specs[i], cmds[i], cfg_.dt);
  }
  ++step_;

  StepInfo info;
  info.collisions = detect_collision(chain_);
  refresh_tracks();

  if (first_collision_step_ < 0) {
    if (!info.collisions.empty()) {
      first_collision_step_ = step_;
      info.reward = kCollisionReward;
    } else {
      info.reward = kStepReward;
    }
  } else {
    info.reward = 0.0;  // ledger already closed at the first collision
  }
  info.done = collided() || horizon_reached();
  return info;
}

Env::Env(const ScenarioConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.middle_count() != 1) {
    throw std::invalid_argument(
        "Env: single-agent MDP needs exactly one middle vehicle; "
        "use Simulation/evaluate for multi-vehicle scenarios");
  }
}

Observation Env::reset(std::uint64_t seed) {
  sim_.clear();
  sim_.emplace_back(cfg_, seed);
  active_ = true;
  return sim_[0].observe(0);
}

StepResult Env::step(double a_cmd) {
  if (!active_) throw std::logic_error("Env::step: episode not active");
  const double cmd[1] = {a_cmd};
  StepInfo info = sim_[0].advance(cmd);
  if (info.done) active_ = false;
  return {sim_[0].observe(0), info.reward, info.done, std::move(info.collisions)};
}

long Env::step_count() const {
  return sim_.empty() ? 0 : sim_[0].step_count();
}

const Simulation& Env::simulation() const {
  if (sim_.empty()) throw std::logic_error("Env: reset() first");
  return sim_[0];
}

const VehicleSpec& Env::ego_spec() const { return simulation().middle_spec(0); }

}  // namespace pg
