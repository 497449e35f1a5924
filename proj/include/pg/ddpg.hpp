#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pg/env.hpp"
#include "pg/net.hpp"
#include "pg/rng.hpp"

namespace pg {

struct Transition {
  std::array<double, 8> s;   // normalized observation
  double a;                  // raw action, m/s^2
  double r;
  std::array<double, 8> s2;  // normalized next observation
  bool done;
};

// FIFO transition store with uniform batch sampling (no repeats inside a
// batch).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000);

  void push(const Transition& t);
  std::size_t size() const { return full_ ? store_.size() : next_; }
  std::size_t capacity() const { return store_.size(); }
  const Transition& at(std::size_t i) const;

  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

 private:
  std::vector<Transition> store_;
  std::size_t next_ = 0;
  bool full_ = false;
};

struct AgentConfig {
  double gamma = 0.99999;
  double tau = 0.005;
  double lr_actor = 0.001;
  double lr_critic = 0.002;
  int batch_size = 512;
  std::size_t memory_capacity = 10000;
  double noise_std0 = 1.0;      // m/s^2
  double noise_decay = 0.9995;  // per environment step
  double action_min = -7.5;     // m/s^2
  double action_max = 3.0;      // m/s^2
  std::vector<int> hidden = {256, 256, 256};
  NormScales norm;              // observation scaling; the critic sees the
                                // action divided by norm.acceleration
  int warmup = 512;             // no updates until the buffer holds this many
  double actor_final_layer_scale = 0.01;

  void validate() const;
};

void to_json(nlohmann::json& j, const AgentConfig& cfg);
void from_json(const nlohmann::json& j, AgentConfig& cfg);

// Deterministic-policy-gradient agent: actor/critic dense nets with target
// copies, Bellman-target critic updates, and soft target tracking.
class DdpgAgent {
 public:
  DdpgAgent(const AgentConfig& cfg, std::uint64_t seed);

  const AgentConfig& config() const { return cfg_; }

  // Noise-free policy action for one normalized observation.
  double act(const std::array<double, 8>& s_norm) const;

  double noise_std(std::uint64_t global_env_steps) const;
  // actor output + decayed Gaussian noise, clipped to the action range
  double explore_action(double actor_out, std::uint64_t global_env_steps);

  double critic_update(const ReplayBuffer& buffer,
                       const std::vector<std::size_t>& batch);  // returns loss
  double actor_update(const ReplayBuffer& buffer,
                      const std::vector<std::size_t>& batch);  // returns mean Q
  void soft_update_targets();

  DenseNet& actor() { return actor_; }
  DenseNet& critic() { return critic_; }
  DenseNet& actor_target() { return actor_t_; }
  DenseNet& critic_target() { return critic_t_; }
  const DenseNet& actor() const { return actor_; }

  void save_checkpoint(const std::string& path) const;
  static DdpgAgent load_checkpoint(const std::string& path);

 private:
  Eigen::MatrixXd batch_states(const ReplayBuffer& buffer,
                               const std::vector<std::size_t>& batch, bool next) const;

  AgentConfig cfg_;
  DenseNet actor_, critic_, actor_t_, critic_t_;
  AdamOptimizer opt_actor_, opt_critic_;
  Rng noise_rng_;
};

struct EpisodeStats {
  long episode = 0;
  long steps = 0;
  double undiscounted_return = 0.0;
  double discounted_return = 0.0;
  bool collided = false;
  double mean_critic_loss = 0.0;
  double mean_actor_objective = 0.0;
  double noise_std = 0.0;
  std::size_t buffer_size = 0;
  std::uint64_t global_steps = 0;
};

struct TrainingLog {
  std::vector<EpisodeStats> episodes;
  bool reached_target = false;
  long target_episode = -1;  // first episode whose moving average hit target

  std::string to_csv() const;
  double moving_average(int window, std::size_t end_episode) const;
};

struct TrainOptions {
  long episodes = 2000;
  long exploration_episodes = 50;  // follower brakes randomly in this stage
  std::uint64_t seed = 1;
  double stop_ma_target = 0.0;  // stop once the moving average reaches this; 0 = off
  int ma_window = 30;
  bool updates_enabled = true;
  ScenarioConfig explore_scenario;
  ScenarioConfig exploit_scenario;
  // Called after each episode when set; return false to stop early.
  std::function<bool(const EpisodeStats&)> on_episode;

  TrainOptions();
};

TrainingLog train(DdpgAgent& agent, const TrainOptions& opts);

}  // namespace pg
