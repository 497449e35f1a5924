#include "pg/ddpg.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pg {

ReplayBuffer::ReplayBuffer(std::size_t capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
  store_.resize(capacity);
}

void ReplayBuffer::push(const Transition& t) {
  store_[next_] = t;
  next_ = (next_ + 1) % store_.size();
  if (next_ == 0) full_ = true;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("ReplayBuffer::at");
  return store_[i];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch,
                                                      Rng& rng) const {
  const std::size_t n = size();
  if (batch == 0 || batch > n) {
    throw std::invalid_argument("ReplayBuffer: bad batch size for current fill");
  }
  // Partial Fisher-Yates over [0, n): uniform without replacement.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> picked(batch);
  for (std::size_t k = 0; k < batch; ++k) {
    const std::size_t j = k + rng.uniform_index(n - k);
    std::swap(pool[k], pool[j]);
    picked[k] = pool[k];
  }
  return picked;
}

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must be in (0,1)");
  if (!(lr_actor > 0.0) || !(lr_critic > 0.0)) {
    throw std::invalid_argument("learning rates must be positive");
  }
  if (batch_size <= 0 || memory_capacity == 0) {
    throw std::invalid_argument("batch size and capacity must be positive");
  }
  if (!(action_max > action_min)) {
    throw std::invalid_argument("action range must be non-empty");
  }
  if (!(noise_std0 >= 0.0) || !(noise_decay > 0.0 && noise_decay <= 1.0)) {
    throw std::invalid_argument("bad exploration noise parameters");
  }
}

void to_json(nlohmann::json& j, const AgentConfig& cfg) {
  j = nlohmann::json{{"gamma", cfg.gamma},
                     {"tau", cfg.tau},
                     {"lr_actor", cfg.lr_actor},
                     {"lr_critic", cfg.lr_critic},
                     {"batch_size", cfg.batch_size},
                     {"memory_capacity", cfg.memory_capacity},
                     {"noise_std0", cfg.noise_std0},
                     {"noise_decay", cfg.noise_decay},
                     {"action_min", cfg.action_min},
                     {"action_max", cfg.action_max},
                     {"hidden", cfg.hidden},
                     {"warmup", cfg.warmup},
                     {"actor_final_layer_scale", cfg.actor_final_layer_scale},
                     {"norm_distance", cfg.norm.distance},
                     {"norm_velocity", cfg.norm.velocity},
                     {"norm_acceleration", cfg.norm.acceleration}};
}

void from_json(const nlohmann::json& j, AgentConfig& cfg) {
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.tau = j.value("tau", cfg.tau);
  cfg.lr_actor = j.value("lr_actor", cfg.lr_actor);
  cfg.lr_critic = j.value("lr_critic", cfg.lr_critic);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.memory_capacity = j.value("memory_capacity", cfg.memory_capacity);
  cfg.noise_std0 = j.value("noise_std0", cfg.noise_std0);
  cfg.noise_decay = j.value("noise_decay", cfg.noise_decay);
  cfg.action_min = j.value("action_min", cfg.action_min);
  cfg.action_max = j.value("action_max", cfg.action_max);
  cfg.hidden = j.value("hidden", cfg.hidden);
  cfg.warmup = j.value("warmup", cfg.warmup);
  cfg.actor_final_layer_scale =
      j.value("actor_final_layer_scale", cfg.actor_final_layer_scale);
  cfg.norm.distance = j.value("norm_distance", cfg.norm.distance);
  cfg.norm.velocity = j.value("norm_velocity", cfg.norm.velocity);
  cfg.norm.acceleration = j.value("norm_acceleration", cfg.norm.acceleration);
}

namespace {

std::vector<int> net_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes;
  sizes.push_back(in);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

}  // namespace

DdpgAgent::DdpgAgent(const AgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      actor_(net_sizes(8, cfg.hidden, 1), OutputKind::TanhScaled, cfg.action_min,
             cfg.action_max),
      critic_(net_sizes(9, cfg.hidden, 1), OutputKind::Linear),
      actor_t_(net_sizes(8, cfg.hidden, 1), OutputKind::TanhScaled, cfg.action_min,
               cfg.action_max),
      critic_t_(net_sizes(9, cfg.hidden, 1), OutputKind::Linear),
      opt_actor_(actor_, cfg.lr_actor),
      opt_critic_(critic_, cfg.lr_critic),
      noise_rng_(Rng::derive(seed, 0x6e015e)) {
  cfg_.validate();
  Rng init_rng(Rng::derive(seed, 0x1217));
  actor_.init_uniform_fan_in(init_rng, cfg_.actor_final_layer_scale);
  critic_.init_uniform_fan_in(init_rng);
  // Shift the shrunk final layer so the initial policy commands ~zero
  // acceleration rather than the midpoint of the action range.
  if (cfg_.action_min < 0.0 && cfg_.action_max > 0.0) {
    const double frac =
        2.0 * (0.0 - cfg_.action_min) / (cfg_.action_max - cfg_.action_min) - 1.0;
    actor_.biases().back()(0) += std::atanh(frac);
  }
  actor_t_.unflatten(actor_.flatten());
  critic_t_.unflatten(critic_.flatten());
}

double DdpgAgent::act(const std::array<double, 8>& s_norm) const {
  Eigen::Matrix<double, 8, 1> x;
  for (int i = 0; i < 8; ++i) x(i) = s_norm[static_cast<std::size_t>(i)];
  return actor_.forward(x)(0, 0);
}

double DdpgAgent::noise_std(std::uint64_t global_env_steps) const {
  return cfg_.noise_std0 *
         std::pow(cfg_.noise_decay, static_cast<double>(global_env_steps));
}

double DdpgAgent::explore_action(double actor_out, std::uint64_t global_env_steps) {
  const double noisy = actor_out + noise_rng_.normal(0.0, noise_std(global_env_steps));
  return std::clamp(noisy, cfg_.action_min, cfg_.action_max);
}

Eigen::MatrixXd DdpgAgent::batch_states(const ReplayBuffer& buffer,
                                        const std::vector<std::size_t>& batch,
                                        bool next) const {
  Eigen::MatrixXd s(8, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const Transition& t = buffer.at(batch[k]);
    const auto& v = next ? t.s2 : t.s;
    for (int i = 0; i < 8; ++i) s(i, static_cast<Eigen::Index>(k)) = v[static_cast<std::size_t>(i)];
  }
  return s;
}

double DdpgAgent::critic_update(const ReplayBuffer& buffer,
                                const std::vector<std::size_t>& batch) {
  if (batch.empty()) throw std::invalid_argument("critic_update: empty batch");
  const Eigen::Index bsz = static_cast<Eigen::Index>(batch.size());
  const double ascale = cfg_.norm.acceleration;

  // Bellman targets from the target nets.
  const Eigen::MatrixXd s2 = batch_states(buffer, batch, true);
  const Eigen::MatrixXd a2 = actor_t_.forward(s2);
  Eigen::MatrixXd x2(9, bsz);
  x2.topRows(8) = s2;
  x2.row(8) = a2 / ascale;
  const Eigen::MatrixXd q2 = critic_t_.forward(x2);

  Eigen::MatrixXd x(9, bsz);
  x.topRows(8) = batch_states(buffer, batch, false);
  Eigen::RowVectorXd y(bsz);
  for (Eigen::Index k = 0; k < bsz; ++k) {
    const Transition& t = buffer.at(batch[static_cast<std::size_t>(k)]);
    x(8, k) = t.a / ascale;
    y(k) = t.r + cfg_.gamma * (t.done ? 0.0 : 1.0) * q2(0, k);
  }

  const Eigen::MatrixXd& q = critic_.forward_cached(x);
  const Eigen::RowVectorXd err = q.row(0) - y;
  const double loss = err.squaredNorm() / static_cast<double>(bsz);

  const Eigen::MatrixXd dy = (2.0 / static_cast<double>(bsz)) * err;
  NetGrads grads = critic_.backward(dy);
  opt_critic_.step(critic_, grads);
  return loss;
}

double DdpgAgent::actor_update(const ReplayBuffer& buffer,
                               const std::vector<std::size_t>& batch) {
  if (batch.empty()) throw std::invalid_argument("actor_update: empty batch");
  const Eigen::Index bsz = static_cast<Eigen::Index>(batch.size());
  const double ascale = cfg_.norm.acceleration;

  const Eigen::MatrixXd s = batch_states(buffer, batch, false);
  const Eigen::MatrixXd& a = actor_.forward_cached(s);

  Eigen::MatrixXd x(9, bsz);
  x.topRows(8) = s;
  x.row(8) = a / ascale;
  const Eigen::MatrixXd& q = critic_.forward_cached(x);
  const double objective = q.row(0).mean();

  // Ascend mean Q: descend -J. The critic only supplies gradients here, its
  // parameters stay frozen.
  const Eigen::MatrixXd dq =
      Eigen::MatrixXd::Constant(1, bsz, -1.0 / static_cast<double>(bsz));
  NetGrads cgrads = critic_.backward(dq, /*with_param_grads=*/false);
  const Eigen::MatrixXd da = cgrads.input.row(8) / ascale;
  NetGrads agrads = actor_.backward(da);
  opt_actor_.step(actor_, agrads);
  return objective;
}

void DdpgAgent::soft_update_targets() {
  soft_update(actor_t_, actor_, cfg_.tau);
  soft_update(critic_t_, critic_, cfg_.tau);
}

void DdpgAgent::save_checkpoint(const std::string& path) const {
  nlohmann::json j;
  j["format"] = "platoon-guard-policy";
  j["version"] = 1;
  j["action_range"] = {cfg_.action_min, cfg_.action_max};
  j["normalization"] = {{"distance", cfg_.norm.distance},
                        {"velocity", cfg_.norm.velocity},
                        {"acceleration", cfg_.norm.acceleration}};
  j["agent_config"] = cfg_;
  j["actor"]["sizes"] = actor_.sizes();
  const Eigen::VectorXd theta = actor_.flatten();
  std::vector<double> params(theta.data(), theta.data() + theta.size());
  j["actor"]["parameters"] = params;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot write " + path);
  out << j.dump();
  if (!out.good()) throw std::runtime_error("save_checkpoint: write failed");
}

DdpgAgent DdpgAgent::load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_checkpoint: corrupt checkpoint: " +
                             std::string(e.what()));
  }
  if (j.value("format", "") != "platoon-guard-policy") {
    throw std::runtime_error("load_checkpoint: not a policy checkpoint");
  }

  AgentConfig cfg;
  if (j.contains("agent_config")) j.at("agent_config").get_to(cfg);
  cfg.action_min = j.at("action_range").at(0).get<double>();
  cfg.action_max = j.at("action_range").at(1).get<double>();
  cfg.norm.distance = j.at("normalization").at("distance").get<double>();
  cfg.norm.velocity = j.at("normalization").at("velocity").get<double>();
  cfg.norm.acceleration = j.at("normalization").at("acceleration").get<double>();

  DdpgAgent agent(cfg, 0);
  const auto params = j.at("actor").at("parameters").get<std::vector<double>>();
  const auto sizes = j.at("actor").at("sizes").get<std::vector<int>>();
  if (sizes != agent.actor_.sizes()) {
    throw std::runtime_error("load_checkpoint: unexpected actor architecture");
  }
  if (params.size() != agent.actor_.parameter_count()) {
    throw std::runtime_error("load_checkpoint: parameter count mismatch");
  }
  Eigen::VectorXd theta =
      Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size()));
  agent.actor_.unflatten(theta);
  agent.actor_t_.unflatten(theta);
  return agent;
}

TrainOptions::TrainOptions() {
  explore_scenario = make_scenario(ScenarioId::TrainRandom);
  explore_scenario.follower_policy = FollowerPolicyKind::RandomDecel;
  exploit_scenario = make_scenario(ScenarioId::TrainRandom);
}

std::string TrainingLog::to_csv() const {
  std::ostringstream out;
  out << "episode,steps,return,discounted_return,collided,critic_loss,"
         "actor_objective,noise_std,buffer_size,global_steps\n";
  out.precision(17);
  for (const auto& e : episodes) {
    out << e.episode << ',' << e.steps << ',' << e.undiscounted_return << ','
        << e.discounted_return << ',' << (e.collided ? 1 : 0) << ','
        << e.mean_critic_loss << ',' << e.mean_actor_objective << ','
        << e.noise_std << ',' << e.buffer_size << ',' << e.global_steps << '\n';
  }
  return out.str();
}

double TrainingLog::moving_average(int window, std::size_t end_episode) const {
  if (window <= 0 || end_episode >= episodes.size()) return 0.0;
  if (end_episode + 1 < static_cast<std::size_t>(window)) return 0.0;
  double sum = 0.0;
  for (std::size_t i = end_episode + 1 - static_cast<std::size_t>(window);
       i <= end_episode; ++i) {
    sum += episodes[i].undiscounted_return;
  }
  return sum / window;
}

TrainingLog train(DdpgAgent& agent, const TrainOptions& opts) {
  if (opts.episodes <= 0) throw std::invalid_argument("train: episodes must be > 0");
  const AgentConfig& cfg = agent.config();

  Env explore_env(opts.explore_scenario);
  Env exploit_env(opts.exploit_scenario);
  ReplayBuffer buffer(cfg.memory_capacity);
  Rng sample_rng(Rng::derive(opts.seed, 0x5a3f));

  TrainingLog log;
  std::uint64_t global_steps = 0;

  for (long ep = 0; ep < opts.episodes; ++ep) {
    Env& env = ep < opts.exploration_episodes ? explore_env : exploit_env;
    Observation obs = env.reset(Rng::derive(opts.seed, 0xe0000 + static_cast<std::uint64_t>(ep)));
    std::array<double, 8> s = normalize_obs(obs, cfg.norm);

    EpisodeStats stats;
    stats.episode = ep;
    std::vector<double> rewards;
    rewards.reserve(static_cast<std::size_t>(env.config().horizon_steps));
    double loss_sum = 0.0, obj_sum = 0.0;
    long update_count = 0;

    bool done = false;
    while (!done) {
      const double a = agent.explore_action(agent.act(s), global_steps);
      StepResult res = env.step(a);
      const std::array<double, 8> s2 = normalize_obs(res.observation, cfg.norm);
      buffer.push({s, a, res.reward, s2, res.done});
      s = s2;
      rewards.push_back(res.reward);
      done = res.done;
      ++global_steps;

      if (opts.updates_enabled &&
          buffer.size() >= static_cast<std::size_t>(cfg.warmup) &&
          buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        const auto batch =
            buffer.sample_indices(static_cast<std::size_t>(cfg.batch_size), sample_rng);
        loss_sum += agent.critic_update(buffer, batch);
        obj_sum += agent.actor_update(buffer, batch);
        agent.soft_update_targets();
        ++update_count;
      }
    }

    stats.steps = static_cast<long>(rewards.size());
    stats.undiscounted_return = discounted_return(rewards, 1.0);
    stats.discounted_return = discounted_return(rewards, cfg.gamma);
    stats.collided = !rewards.empty() && rewards.back() == kCollisionReward;
    stats.mean_critic_loss = update_count > 0 ? loss_sum / update_count : 0.0;
    stats.mean_actor_objective = update_count > 0 ? obj_sum / update_count : 0.0;
    stats.noise_std = agent.noise_std(global_steps);
    stats.buffer_size = buffer.size();
    stats.global_steps = global_steps;
    log.episodes.push_back(stats);

    if (opts.stop_ma_target > 0.0 &&
        log.episodes.size() >= static_cast<std::size_t>(opts.ma_window)) {
      const double ma = log.moving_average(opts.ma_window, log.episodes.size() - 1);
      if (ma >= opts.stop_ma_target) {
        log.reached_target = true;
        log.target_episode = ep;
        if (opts.on_episode) opts.on_episode(stats);
        break;
      }
    }
    if (opts.on_episode && !opts.on_episode(stats)) break;
  }
  return log;
}

}  // namespace pg
