// Acceptance suite: one pass/fail line per criterion, exit 0 only if all
// pass. Criteria 2 and 3 involve real training runs and dominate the
// runtime; everything else completes in seconds.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "gradcheck.hpp"
#include "pg/config.hpp"
#include "pg/ddpg.hpp"
#include "pg/eval.hpp"

using namespace pg;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool pass = false;
  std::string detail;
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool has_pair(const RunReport& r, std::size_t a, std::size_t b) {
  for (const auto& p : r.collision_pairs) {
    if (p.first == a && p.second == b) return true;
  }
  return false;
}

Criterion criterion1_baseline_failures() {
  Criterion c{1, "baseline failure reproduction (Brake1/Brake2/MultiRL)"};
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool ok = true;

  for (auto id : {ScenarioId::Brake1, ScenarioId::Brake2}) {
    const auto [log, report] = evaluate(make_scenario(id), ControllerKind::Baseline,
                                        nullptr, {}, to_string(id));
    const bool good =
        report.collided && !has_pair(report, 0, 1) && has_pair(report, 1, 2);
    ok = ok && good;
    detail << to_string(id) << ": ego-follower collision at step "
           << report.collision_step << (has_pair(report, 0, 1) ? " (+leader hit!)" : "")
           << "; ";
  }
  const auto [mlog, mreport] = evaluate(make_scenario(ScenarioId::MultiRL),
                                        ControllerKind::Baseline, nullptr, {}, "multirl");
  ok = ok && mreport.collided && mreport.collision_pairs.size() >= 2;
  detail << "multirl: " << mreport.collision_pairs.size() << " collision pairs; "
         << elapsed_s(t0) << " s";
  c.pass = ok;
  c.detail = detail.str();
  return c;
}

Criterion criterion4_reward_ledger() {
  Criterion c{4, "reward ledger (22500 exact; 15k-3000 on collision)"};
  bool ok = true;
  std::ostringstream detail;

  {
    Env env(deterministic(make_scenario(ScenarioId::Brake2)));
    env.reset(0);
    double ret = 0.0;
    long steps = 0;
    bool done = false;
    while (!done) {
      const StepResult res = env.step(steps >= 100 ? -3.0 : 0.0);
      ret += res.reward;
      ++steps;
      done = res.done;
    }
    ok = ok && steps == 1500 && ret == 22500.0;
    detail << "collision-free return " << ret << " over " << steps << " steps; ";
  }
  {
    Env env(deterministic(make_scenario(ScenarioId::Brake2)));
    env.reset(0);
    double ret = 0.0;
    long steps = 0;
    bool done = false;
    while (!done) {
      const StepResult res = env.step(0.0);  // never brakes: front collision
      ret += res.reward;
      ++steps;
      done = res.done;
    }
    const double expected = 15.0 * static_cast<double>(steps - 1) - 3000.0;
    ok = ok && ret == expected && steps < 1500;
    detail << "collision return " << ret << " = 15*" << (steps - 1) << "-3000";
  }
  c.pass = ok;
  c.detail = detail.str();
  return c;
}

Criterion criterion5_gradient_oracle() {
  Criterion c{5, "gradient oracle (>= 100 nets vs central differences, 1e-4)"};
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20250809);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto cc = testing::random_case(rng);
    worst = std::max(worst, testing::max_relative_error(cc));
  }
  c.pass = worst < 1e-4;
  std::ostringstream detail;
  detail << "worst relative error " << worst << " over 100 nets; " << elapsed_s(t0)
         << " s";
  c.detail = detail.str();
  return c;
}

Criterion criterion6_kalman_convergence() {
  Criterion c{6, "Kalman convergence on noiseless constant-accel truth"};
  const double dt = 0.01;
  auto track = make_track(0.0, 20.0, 0.0);
  double verr = 1e9, aerr = 1e9;
  for (int k = 1; k <= 200; ++k) {
    const double t = k * dt;
    track = kf_update(kf_predict(track, dt), 20.0 * t - 1.5 * t * t);
    if (k == 200) {
      verr = std::abs(track.velocity() - (20.0 - 3.0 * t));
      aerr = std::abs(track.acceleration() + 3.0);
    }
  }
  c.pass = verr < 0.5 && aerr < 0.5;
  std::ostringstream detail;
  detail << "after 200 updates: |dv| = " << verr << ", |da| = " << aerr;
  c.detail = detail.str();
  return c;
}

Criterion criterion7_feasibility() {
  Criterion c{7, "feasibility oracle: witnesses exist and replay clean"};
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream detail;
  for (auto id : {ScenarioId::Brake1, ScenarioId::Brake2, ScenarioId::MultiRL}) {
    const auto res = feasibility_oracle(make_scenario(id));
    bool replay_ok = false;
    if (res.feasible) {
      const auto [log, report] = evaluate_plan(make_scenario(id), res.plan);
      replay_ok = !report.collided;
      for (double g : report.min_gap) replay_ok = replay_ok && g > 0.0;
    }
    ok = ok && res.feasible && replay_ok;
    detail << to_string(id) << ": "
           << (res.feasible ? "witness(onset=" + std::to_string(res.plan.brake_onset_step) +
                                  ", decel=" + std::to_string(res.plan.decel) + ")"
                            : "infeasible")
           << (replay_ok ? " replayed clean; " : " REPLAY FAILED; ");
  }
  detail << elapsed_s(t0) << " s";
  c.pass = ok;
  c.detail = detail.str();
  return c;
}

Criterion criterion8_determinism(const fs::path& out_dir) {
  Criterion c{8, "determinism & serialization"};
  bool ok = true;
  std::ostringstream detail;

  {  // bit-identical TrainingLog under the default agent config
    TrainOptions opts;
    opts.episodes = 3;
    opts.exploration_episodes = 2;
    opts.seed = 99;
    AgentConfig cfg;  // defaults: 256x3 nets, batch 512
    DdpgAgent a(cfg, opts.seed), b(cfg, opts.seed);
    const std::string la = train(a, opts).to_csv();
    const std::string lb = train(b, opts).to_csv();
    ok = ok && la == lb;
    detail << "training log " << (la == lb ? "bit-identical" : "MISMATCH") << "; ";
  }
  {  // checkpoint round trip, exact actor outputs on 1000 observations
    DdpgAgent agent(AgentConfig{}, 7);
    const fs::path path = out_dir / "det_checkpoint.json";
    agent.save_checkpoint(path.string());
    const DdpgAgent loaded = DdpgAgent::load_checkpoint(path.string());
    Rng rng(70);
    bool same = true;
    for (int k = 0; k < 1000; ++k) {
      std::array<double, 8> s;
      for (auto& v : s) v = rng.uniform(-1.5, 1.5);
      same = same && agent.act(s) == loaded.act(s);
    }
    ok = ok && same;
    detail << "checkpoint " << (same ? "exact" : "MISMATCH") << "; ";
  }
  {  // CSV round trip at 1e-9
    const auto [log, report] = evaluate(make_scenario(ScenarioId::Brake1),
                                        ControllerKind::Baseline, nullptr, {}, "brake1");
    const fs::path path = out_dir / "det_traj.csv";
    export_trajectory_csv(log, path.string());
    const TrajectoryLog back = parse_trajectory_csv(path.string());
    bool same = back.rows.size() == log.rows.size();
    for (std::size_t i = 0; same && i < log.rows.size(); ++i) {
      const auto& x = log.rows[i];
      const auto& y = back.rows[i];
      auto near = [](double p, double q) {
        if (std::isinf(p) || std::isinf(q)) return std::isinf(p) && std::isinf(q);
        return std::abs(p - q) <= 1e-9 * std::max(1.0, std::abs(p));
      };
      same = x.step == y.step && x.vehicle_id == y.vehicle_id && near(x.t, y.t) &&
             near(x.x, y.x) && near(x.v, y.v) && near(x.a, y.a) &&
             near(x.gap_ahead, y.gap_ahead);
    }
    ok = ok && same;
    detail << "csv round-trip " << (same ? "within 1e-9" : "MISMATCH");
  }
  c.pass = ok;
  c.detail = detail.str();
  return c;
}

struct TrainingOutcome {
  std::uint64_t seed = 0;
  bool reached = false;
  long episodes_run = 0;
  long target_episode = -1;
  std::optional<DdpgAgent> agent;
};

// Criteria 2 and 3 share one suite: seeds trained with the default config
// until the 30-episode moving average reaches 22000 (cap 2000 episodes).
// Launches stop once three seeds have succeeded.
std::vector<TrainingOutcome> run_convergence_suite(const fs::path& out_dir, int jobs) {
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<TrainingOutcome> outcomes(seeds.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> successes{0};
  std::mutex io_mutex;

  auto worker = [&] {
    while (true) {
      if (successes.load() >= 3) break;
      const std::size_t i = next.fetch_add(1);
      if (i >= seeds.size()) break;

      TrainOptions opts;
      opts.seed = seeds[i];
      opts.episodes = 2000;
      opts.stop_ma_target = 22000.0;
      opts.ma_window = 30;
      const AgentConfig cfg;
      DdpgAgent agent(cfg, opts.seed);

      {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "[acceptance] training seed " << seeds[i] << "...\n";
      }
      const auto t0 = std::chrono::steady_clock::now();
      const TrainingLog log = train(agent, opts);

      TrainingOutcome& out = outcomes[i];
      out.seed = seeds[i];
      out.reached = log.reached_target;
      out.episodes_run = static_cast<long>(log.episodes.size());
      out.target_episode = log.target_episode;
      out.agent.emplace(std::move(agent));

      std::ofstream log_out(out_dir / ("training_seed_" + std::to_string(seeds[i]) + ".csv"));
      log_out << log.to_csv();
      if (out.reached) successes.fetch_add(1);
      {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "[acceptance] seed " << seeds[i]
                  << (out.reached ? " reached the target at episode " +
                                        std::to_string(out.target_episode)
                                  : " did NOT reach the target")
                  << " (" << out.episodes_run << " episodes, " << elapsed_s(t0)
                  << " s)\n";
      }
    }
  };

  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return outcomes;
}

}  // namespace

int main() {
  const char* out_env = std::getenv("PG_ACCEPTANCE_OUT");
  const fs::path out_dir = out_env ? fs::path(out_env) : fs::path("acceptance_out");
  fs::create_directories(out_dir);

  int jobs = 2;
  if (const char* j = std::getenv("PG_ACCEPTANCE_JOBS")) jobs = std::max(1, std::atoi(j));

  std::vector<Criterion> results;
  results.push_back(criterion1_baseline_failures());
  results.push_back(criterion4_reward_ledger());
  results.push_back(criterion5_gradient_oracle());
  results.push_back(criterion6_kalman_convergence());
  results.push_back(criterion7_feasibility());
  results.push_back(criterion8_determinism(out_dir));

  const auto t0 = std::chrono::steady_clock::now();
  const auto outcomes = run_convergence_suite(out_dir, jobs);

  Criterion c3{3, "convergence analog (>= 3 of 5 seeds reach MA30 >= 22000 within 2000 episodes)"};
  int reached = 0;
  std::ostringstream c3_detail;
  for (const auto& out : outcomes) {
    if (out.episodes_run == 0) {
      c3_detail << "seed " << out.seed << ": not needed; ";
      continue;
    }
    if (out.reached) ++reached;
    c3_detail << "seed " << out.seed << ": "
              << (out.reached ? "episode " + std::to_string(out.target_episode)
                              : "no (" + std::to_string(out.episodes_run) + " eps)")
              << "; ";
  }
  c3_detail << elapsed_s(t0) << " s total";
  c3.pass = reached >= 3;
  c3.detail = c3_detail.str();

  Criterion c2{2, "RL success reproduction (trained policy, zero collisions)"};
  const TrainingOutcome* best = nullptr;
  for (const auto& out : outcomes) {
    if (out.reached && out.agent) {
      best = &out;
      break;
    }
  }
  if (best == nullptr) {
    c2.detail = "no converged policy available";
  } else {
    best->agent->save_checkpoint((out_dir / "policy.json").string());
    bool ok = true;
    std::ostringstream detail;
    detail << "seed " << best->seed << ": ";
    for (auto id : {ScenarioId::Brake1, ScenarioId::Brake2, ScenarioId::MultiRL}) {
      const auto [log, report] =
          evaluate(make_scenario(id), ControllerKind::RlPolicy, &*best->agent, {},
                   to_string(id));
      double lo = std::numeric_limits<double>::infinity();
      for (double g : report.min_gap) lo = std::min(lo, g);
      ok = ok && !report.collided && lo > 0.0;
      detail << to_string(id) << (report.collided ? " COLLIDED" : " clean") << " (min gap "
             << lo << " m); ";
    }
    c2.pass = ok;
    c2.detail = detail.str();
  }

  results.push_back(c2);
  results.push_back(c3);

  std::sort(results.begin(), results.end(),
            [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
  bool all_pass = true;
  for (const auto& c : results) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << ": "
              << c.name << " -- " << c.detail << "\n";
    all_pass = all_pass && c.pass;
  }
  return all_pass ? 0 : 1;
}
