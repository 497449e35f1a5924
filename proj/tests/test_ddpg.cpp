#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <set>

#include "pg/ddpg.hpp"

using namespace pg;

namespace {

AgentConfig tiny_agent_config() {
  AgentConfig cfg;
  cfg.hidden = {16, 16};
  cfg.batch_size = 16;
  cfg.warmup = 16;
  cfg.memory_capacity = 2000;
  return cfg;
}

Transition make_transition(double r, bool done) {
  Transition t;
  t.s = {0.3, 0.3, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0};
  t.a = -2.0;
  t.r = r;
  t.s2 = {0.29, 0.3, 0.98, 1.0, 1.0, -0.1, -0.1, 0.0};
  t.done = done;
  return t;
}

void set_constant_output(DenseNet& net, double value) {
  for (auto& w : net.weights()) w.setZero();
  for (auto& b : net.biases()) b.setZero();
  net.biases().back()(0) = value;
}

}  // namespace

TEST_CASE("replay buffer is FIFO-capped and samples without replacement") {
  ReplayBuffer buf(5);
  for (int k = 1; k <= 7; ++k) buf.push(make_transition(k, false));
  CHECK(buf.size() == 5);

  std::multiset<double> kept;
  for (std::size_t i = 0; i < buf.size(); ++i) kept.insert(buf.at(i).r);
  CHECK(kept == std::multiset<double>{3, 4, 5, 6, 7});

  Rng rng(3);
  const auto all = buf.sample_indices(5, rng);
  CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 5);
  CHECK_THROWS_AS(buf.sample_indices(6, rng), std::invalid_argument);
  CHECK_THROWS_AS(buf.at(5), std::out_of_range);
}

TEST_CASE("uniform sampling leaves no index unvisited") {
  ReplayBuffer buf(1000);
  for (int k = 0; k < 1000; ++k) buf.push(make_transition(k, false));
  Rng rng(11);
  std::vector<int> hits(1000, 0);
  for (int draw = 0; draw < 200; ++draw) {
    for (const auto i : buf.sample_indices(512, rng)) hits[i]++;
  }
  // 102400 draws over 1000 slots: every index must appear
  for (int k = 0; k < 1000; ++k) CHECK(hits[k] > 0);
}

TEST_CASE("exploration noise decays per environment step and stays clipped") {
  DdpgAgent agent(tiny_agent_config(), 9);
  CHECK(agent.noise_std(0) == 1.0);
  CHECK(agent.noise_std(4605) == doctest::Approx(0.1).epsilon(1e-2));

  for (int k = 0; k < 2000; ++k) {
    const double a = agent.explore_action(-2.25, 0);
    CHECK(a >= -7.5);
    CHECK(a <= 3.0);
  }
}

TEST_CASE("critic update regresses on the Bellman target") {
  AgentConfig cfg = tiny_agent_config();
  DdpgAgent agent(cfg, 1);
  set_constant_output(agent.critic(), 0.0);
  set_constant_output(agent.critic_target(), 1000.0);

  SUBCASE("non-terminal target adds the discounted bootstrap") {
    ReplayBuffer buf(100);
    for (int i = 0; i < 4; ++i) buf.push(make_transition(15.0, false));
    const double y = 15.0 + 0.99999 * 1000.0;  // 1014.99
    const double loss = agent.critic_update(buf, {0, 1, 2, 3});
    CHECK(loss == doctest::Approx(y * y).epsilon(1e-12));
  }
  SUBCASE("terminal target is the raw reward") {
    ReplayBuffer buf(100);
    buf.push(make_transition(-3000.0, true));
    const double loss = agent.critic_update(buf, {0});
    CHECK(loss == doctest::Approx(3000.0 * 3000.0).epsilon(1e-12));
  }
  SUBCASE("empty batch is rejected") {
    ReplayBuffer buf(100);
    buf.push(make_transition(15.0, false));
    CHECK_THROWS_AS(agent.critic_update(buf, {}), std::invalid_argument);
    CHECK_THROWS_AS(agent.actor_update(buf, {}), std::invalid_argument);
  }
}

TEST_CASE("constant critic produces a zero actor gradient") {
  DdpgAgent agent(tiny_agent_config(), 2);
  set_constant_output(agent.critic(), 123.0);

  ReplayBuffer buf(100);
  for (int i = 0; i < 8; ++i) buf.push(make_transition(15.0, false));
  const Eigen::VectorXd before = agent.actor().flatten();
  const double objective = agent.actor_update(buf, {0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(objective == doctest::Approx(123.0).epsilon(1e-12));
  CHECK((agent.actor().flatten() - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("soft target updates track the online networks") {
  AgentConfig cfg = tiny_agent_config();
  DdpgAgent agent(cfg, 3);
  const Eigen::VectorXd actor0 = agent.actor().flatten();
  // targets start as exact copies
  CHECK((agent.actor_target().flatten() - actor0).cwiseAbs().maxCoeff() == 0.0);

  agent.actor().unflatten(actor0.array() + 1.0);
  agent.soft_update_targets();
  const Eigen::VectorXd tgt = agent.actor_target().flatten();
  CHECK((tgt - (actor0.array() + cfg.tau).matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("checkpoint round trip reproduces actor outputs exactly") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "pg_test_checkpoint.json";

  DdpgAgent agent(tiny_agent_config(), 4);
  agent.save_checkpoint(path.string());
  const DdpgAgent loaded = DdpgAgent::load_checkpoint(path.string());

  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    std::array<double, 8> s;
    for (auto& v : s) v = rng.uniform(-1.5, 1.5);
    CHECK(agent.act(s) == loaded.act(s));
  }
  fs::remove(path);

  CHECK_THROWS_AS(DdpgAgent::load_checkpoint("/nonexistent/ckpt.json"),
                  std::runtime_error);
  const fs::path bad = fs::temp_directory_path() / "pg_test_bad.json";
  {
    std::ofstream out(bad);
    out << "{ not json";
  }
  CHECK_THROWS_AS(DdpgAgent::load_checkpoint(bad.string()), std::runtime_error);
  fs::remove(bad);
}

TEST_CASE("training is deterministic per seed") {
  AgentConfig cfg = tiny_agent_config();
  TrainOptions opts;
  opts.episodes = 3;
  opts.exploration_episodes = 2;
  opts.seed = 17;
  // short horizon keeps this fast
  opts.explore_scenario.horizon_steps = 120;
  opts.exploit_scenario.horizon_steps = 120;

  DdpgAgent a(cfg, opts.seed), b(cfg, opts.seed);
  const TrainingLog la = train(a, opts);
  const TrainingLog lb = train(b, opts);
  CHECK(la.to_csv() == lb.to_csv());
  CHECK(la.episodes.size() == 3);
  CHECK((a.actor().flatten() - b.actor().flatten()).cwiseAbs().maxCoeff() == 0.0);

  DdpgAgent c(cfg, 18);
  TrainOptions opts2 = opts;
  opts2.seed = 18;
  const TrainingLog lc = train(c, opts2);
  CHECK(la.to_csv() != lc.to_csv());
}

TEST_CASE("no-op training with zero noise is reproducible and collects no updates") {
  AgentConfig cfg = tiny_agent_config();
  cfg.noise_std0 = 0.0;
  TrainOptions opts;
  opts.episodes = 2;
  opts.exploration_episodes = 0;
  opts.updates_enabled = false;
  opts.seed = 23;
  opts.exploit_scenario.horizon_steps = 200;

  DdpgAgent a(cfg, opts.seed), b(cfg, opts.seed);
  const Eigen::VectorXd params0 = a.actor().flatten();
  const TrainingLog la = train(a, opts);
  const TrainingLog lb = train(b, opts);
  CHECK(la.to_csv() == lb.to_csv());
  CHECK((a.actor().flatten() - params0).cwiseAbs().maxCoeff() == 0.0);
  for (const auto& e : la.episodes) {
    CHECK(e.mean_critic_loss == 0.0);
    CHECK(e.mean_actor_objective == 0.0);
  }
}

TEST_CASE("agent config validation") {
  AgentConfig cfg;
  cfg.gamma = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = AgentConfig{};
  cfg.action_min = 3.0;
  cfg.action_max = -7.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
