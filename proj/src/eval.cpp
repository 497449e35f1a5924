#include "pg/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pg/svg.hpp"

namespace pg {

namespace {

using MiddleController =
    std::function<double(std::size_t middle, long step, const Observation& obs,
                         const VehicleSpec& spec)>;

struct EpisodeRun {
  TrajectoryLog log;
  RunReport report;
};

// Drive one full episode, all middles controlled by `controller`. Keeps
// simulating past collisions up to the horizon unless stop_when_settled is
// set (used by the oracle's inner loops, where gaps are frozen once
// everything has stopped).
EpisodeRun run_episode(const ScenarioConfig& cfg, std::uint64_t seed,
                       const MiddleController& controller,
                       bool stop_when_settled, bool keep_rows) {
  Simulation sim(cfg, seed);
  const std::size_t n = sim.vehicle_count();
  const std::size_t pairs = n - 1;

  EpisodeRun run;
  run.log.dt = cfg.dt;
  for (std::size_t i = 0; i < n; ++i) {
    run.log.lengths.push_back(sim.chain().specs[i].length);
  }
  run.report.min_gap.assign(pairs, std::numeric_limits<double>::infinity());
  run.report.stop_time.assign(n, -1.0);

  std::vector<bool> pair_hit(pairs, false);
  auto note_gaps = [&] {
    for (std::size_t i = 0; i < pairs; ++i) {
      const double g = gap(sim.chain(), i);
      run.report.min_gap[i] = std::min(run.report.min_gap[i], g);
      if (g <= 0.0) pair_hit[i] = true;
    }
  };
  note_gaps();

  double ledger = 0.0;
  bool ledger_open = true;
  std::vector<double> cmds(sim.middle_count());

  while (!sim.horizon_reached()) {
    for (std::size_t m = 0; m < sim.middle_count(); ++m) {
      cmds[m] = controller(m, sim.step_count(), sim.observe(m), sim.middle_spec(m));
    }
    const StepInfo info = sim.advance(cmds);
    note_gaps();
    if (ledger_open) {
      ledger += info.reward;
      if (info.reward == kCollisionReward) ledger_open = false;
    }

    if (keep_rows) {
      for (std::size_t i = 0; i < n; ++i) {
        TrajectoryRow row;
        row.step = sim.step_count();
        row.t = sim.time();
        row.vehicle_id = static_cast<int>(i);
        row.x = sim.chain().states[i].x;
        row.v = sim.chain().states[i].v;
        row.a = sim.chain().states[i].a;
        row.gap_ahead = i == 0 ? std::numeric_limits<double>::infinity()
                               : gap(sim.chain(), i - 1);
        run.log.rows.push_back(row);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (run.report.stop_time[i] < 0.0 && sim.chain().states[i].v == 0.0) {
        run.report.stop_time[i] = sim.time();
      }
    }
    if (stop_when_settled && (sim.collided() || sim.all_stopped())) break;
  }

  run.report.collided = sim.collided();
  run.report.collision_step = sim.first_collision_step();
  run.report.episode_return = ledger;
  for (std::size_t i = 0; i < pairs; ++i) {
    if (pair_hit[i]) run.report.collision_pairs.emplace_back(i, i + 1);
  }
  return run;
}

MiddleController plan_controller(const FeasibilityPlan& plan) {
  return [plan](std::size_t, long step, const Observation&, const VehicleSpec&) {
    if (plan.accel_start_step >= 0 && step >= plan.accel_start_step) return plan.accel;
    if (step >= plan.brake_onset_step) return plan.decel;
    return 0.0;
  };
}

}  // namespace

std::pair<TrajectoryLog, RunReport> evaluate(const ScenarioConfig& scenario,
                                             ControllerKind controller,
                                             const DdpgAgent* policy,
                                             const EvalOptions& opts,
                                             const std::string& scenario_name) {
  if (controller == ControllerKind::RlPolicy && policy == nullptr) {
    throw std::invalid_argument("evaluate: RL controller needs a policy");
  }
  const ScenarioConfig cfg =
      opts.deterministic ? deterministic(scenario) : scenario;

  std::vector<BaselineController> ctrls(cfg.middle_count(),
                                        BaselineController{cfg.ttc_threshold, false});
  MiddleController fn;
  if (controller == ControllerKind::Baseline) {
    fn = [&ctrls](std::size_t m, long, const Observation& obs, const VehicleSpec& spec) {
      return baseline_action(ctrls[m], std::max(0.0, obs.d_fm), obs.v_m, obs.v_f, spec);
    };
  } else {
    const NormScales norm = policy->config().norm;
    fn = [policy, norm](std::size_t, long, const Observation& obs, const VehicleSpec&) {
      return policy->act(normalize_obs(obs, norm));
    };
  }

  EpisodeRun run = run_episode(cfg, opts.seed, fn, /*stop_when_settled=*/false,
                               /*keep_rows=*/true);
  run.report.scenario = scenario_name;
  run.report.controller = controller == ControllerKind::Baseline ? "baseline" : "rl";
  return {std::move(run.log), std::move(run.report)};
}

std::pair<TrajectoryLog, RunReport> evaluate_plan(const ScenarioConfig& scenario,
                                                  const FeasibilityPlan& plan) {
  EpisodeRun run = run_episode(deterministic(scenario), 0, plan_controller(plan),
                               /*stop_when_settled=*/false, /*keep_rows=*/true);
  run.report.controller = "plan";
  return {std::move(run.log), std::move(run.report)};
}

FeasibilityResult feasibility_oracle(const ScenarioConfig& scenario) {
  const ScenarioConfig cfg = deterministic(scenario);

  auto min_gap_under = [&cfg](const FeasibilityPlan& plan) {
    EpisodeRun run = run_episode(cfg, 0, plan_controller(plan),
                                 /*stop_when_settled=*/true, /*keep_rows=*/false);
    double lo = std::numeric_limits<double>::infinity();
    for (double g : run.report.min_gap) lo = std::min(lo, g);
    return lo;
  };

  auto verified = [&](FeasibilityPlan plan, double lo) {
    // Soundness check: the witness must replay collision-free through the
    // full-horizon simulator.
    const auto replay = evaluate_plan(cfg, plan);
    if (replay.second.collided) {
      throw std::logic_error("feasibility_oracle: witness failed replay");
    }
    FeasibilityResult res;
    res.feasible = true;
    res.plan = plan;
    res.min_gap = lo;
    return res;
  };

  for (int d = 0; d <= 15; ++d) {
    const double decel = -0.5 * d;
    for (long onset = 0; onset <= 300; ++onset) {
      FeasibilityPlan plan{onset, decel, -1, 0.0};
      const double lo = min_gap_under(plan);
      if (lo > 0.0) return verified(plan, lo);
      if (d == 0) break;  // cruise plan ignores the onset
    }
  }

  // Rare fallback: allow a terminal acceleration segment to reopen the rear
  // gap.
  for (int d = 1; d <= 15; ++d) {
    const double decel = -0.5 * d;
    for (long onset = 0; onset <= 300; onset += 10) {
      for (long accel_start = onset + 100; accel_start <= 1400; accel_start += 100) {
        for (double accel : {1.0, 2.0, 3.0}) {
          FeasibilityPlan plan{onset, decel, accel_start, accel};
          const double lo = min_gap_under(plan);
          if (lo > 0.0) return verified(plan, lo);
        }
      }
    }
  }
  return {};
}

nlohmann::json report_to_json(const RunReport& report) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : report.collision_pairs) pairs.push_back({a, b});
  return nlohmann::json{{"scenario", report.scenario},
                        {"controller", report.controller},
                        {"collided", report.collided},
                        {"collision_pairs", pairs},
                        {"collision_step", report.collision_step},
                        {"min_gap", report.min_gap},
                        {"stop_time", report.stop_time},
                        {"return", report.episode_return}};
}

void export_trajectory_csv(const TrajectoryLog& log, const std::string& path) {
  if (log.rows.empty()) throw std::invalid_argument("export_trajectory_csv: empty log");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_trajectory_csv: cannot write " + path);
  out << "step,t,vehicle_id,x,v,a,gap_ahead\n";
  out.precision(17);
  for (const auto& r : log.rows) {
    out << r.step << ',' << r.t << ',' << r.vehicle_id << ',' << r.x << ','
        << r.v << ',' << r.a << ',' << r.gap_ahead << '\n';
  }
  if (!out.good()) throw std::runtime_error("export_trajectory_csv: write failed");
}

TrajectoryLog parse_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_trajectory_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "step,t,vehicle_id,x,v,a,gap_ahead") {
    throw std::runtime_error("parse_trajectory_csv: bad header");
  }
  TrajectoryLog log;
  int max_vehicle = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double fields[7];
    const char* p = line.c_str();
    for (int i = 0; i < 7; ++i) {
      char* end = nullptr;
      fields[i] = std::strtod(p, &end);  // strtod handles "inf"
      if (end == p || (i < 6 && *end != ',')) {
        throw std::runtime_error("parse_trajectory_csv: bad row: " + line);
      }
      p = end + 1;
    }
    TrajectoryRow r;
    r.step = static_cast<long>(fields[0]);
    r.t = fields[1];
    r.vehicle_id = static_cast<int>(fields[2]);
    r.x = fields[3];
    r.v = fields[4];
    r.a = fields[5];
    r.gap_ahead = fields[6];
    log.rows.push_back(r);
    max_vehicle = std::max(max_vehicle, r.vehicle_id);
  }
  if (log.rows.size() >= 2) {
    // dt recoverable from consecutive steps of vehicle 0
    for (std::size_t i = 1; i < log.rows.size(); ++i) {
      if (log.rows[i].step != log.rows[0].step) {
        log.dt = (log.rows[i].t - log.rows[0].t) /
                 static_cast<double>(log.rows[i].step - log.rows[0].step);
        break;
      }
    }
  }
  // Vehicle lengths are recoverable for all but the last vehicle:
  // len_i = x_i - x_{i+1} - gap_ahead(vehicle i+1).
  if (max_vehicle >= 0) {
    const std::size_t n = static_cast<std::size_t>(max_vehicle) + 1;
    log.lengths.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n && i + 1 < log.rows.size(); ++i) {
      log.lengths[i] = log.rows[i].x - log.rows[i + 1].x - log.rows[i + 1].gap_ahead;
    }
  }
  return log;
}

void export_trajectory_svg(const TrajectoryLog& log, ChartKind kind,
                           const std::string& path) {
  if (log.rows.empty()) throw std::invalid_argument("export_trajectory_svg: empty log");
  int max_vehicle = 0;
  for (const auto& r : log.rows) max_vehicle = std::max(max_vehicle, r.vehicle_id);
  const std::size_t n = static_cast<std::size_t>(max_vehicle) + 1;

  std::vector<SvgSeries> series;
  if (kind == ChartKind::TimeSpace) {
    for (std::size_t i = 0; i < n; ++i) {
      SvgSeries front{"vehicle " + std::to_string(i), {}, {}, false, true};
      SvgSeries rear{"", {}, {}, true, false};
      const double len = i < log.lengths.size() ? log.lengths[i] : 0.0;
      for (const auto& r : log.rows) {
        if (static_cast<std::size_t>(r.vehicle_id) != i) continue;
        front.x.push_back(r.t);
        front.y.push_back(r.x);
        if (len > 0.0) {
          rear.x.push_back(r.t);
          rear.y.push_back(r.x - len);
        }
      }
      series.push_back(std::move(front));
      if (!rear.x.empty()) series.push_back(std::move(rear));
    }
    write_svg_chart(path, "Time-space diagram", "time [s]", "position [m]", series);
  } else if (kind == ChartKind::TimeSpeed) {
    for (std::size_t i = 0; i < n; ++i) {
      SvgSeries s{"vehicle " + std::to_string(i), {}, {}, false, true};
      for (const auto& r : log.rows) {
        if (static_cast<std::size_t>(r.vehicle_id) != i) continue;
        s.x.push_back(r.t);
        s.y.push_back(r.v);
      }
      series.push_back(std::move(s));
    }
    write_svg_chart(path, "Time-speed diagram", "time [s]", "speed [m/s]", series);
  } else {
    for (std::size_t i = 1; i < n; ++i) {
      SvgSeries s{"gap " + std::to_string(i - 1) + "-" + std::to_string(i),
                  {}, {}, false, true};
      for (const auto& r : log.rows) {
        if (static_cast<std::size_t>(r.vehicle_id) != i) continue;
        s.x.push_back(r.t);
        s.y.push_back(r.gap_ahead);
      }
      series.push_back(std::move(s));
    }
    // zero line marks contact
    SvgSeries zero{"", {}, {}, true, false};
    zero.x = {series.front().x.front(), series.front().x.back()};
    zero.y = {0.0, 0.0};
    series.push_back(std::move(zero));
    write_svg_chart(path, "Spacing between vehicles", "time [s]", "gap [m]", series);
  }
}

SuiteResult run_training_suite(const SuiteOptions& opts) {
  if (opts.seeds.empty()) throw std::invalid_argument("run_training_suite: no seeds");

  SuiteResult result;
  result.seeds = opts.seeds;
  result.logs.resize(opts.seeds.size());

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int jobs = std::max(1, opts.jobs > 0 ? opts.jobs : (hw > 0 ? hw : 1));

  std::vector<std::optional<DdpgAgent>> agents(opts.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= opts.seeds.size()) break;
      TrainOptions to = opts.train;
      to.seed = opts.seeds[i];
      DdpgAgent agent(opts.agent, to.seed);
      result.logs[i] = train(agent, to);
      agents[i].emplace(std::move(agent));
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::min<std::size_t>(jobs, opts.seeds.size()); ++j) {
    pool.emplace_back(worker);
  }
  for (auto& th : pool) th.join();

  std::size_t shortest = std::numeric_limits<std::size_t>::max();
  for (const auto& log : result.logs) shortest = std::min(shortest, log.episodes.size());
  for (std::size_t e = 0; e < shortest; ++e) {
    double sum = 0.0;
    for (const auto& log : result.logs) sum += log.episodes[e].undiscounted_return;
    const double mean = sum / static_cast<double>(result.logs.size());
    double var = 0.0;
    for (const auto& log : result.logs) {
      const double d = log.episodes[e].undiscounted_return - mean;
      var += d * d;
    }
    result.mean_return.push_back(mean);
    result.std_return.push_back(std::sqrt(var / static_cast<double>(result.logs.size())));
  }

  if (!opts.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opts.out_dir);
    for (std::size_t i = 0; i < opts.seeds.size(); ++i) {
      const fs::path dir = fs::path(opts.out_dir) / ("seed_" + std::to_string(opts.seeds[i]));
      fs::create_directories(dir);
      std::ofstream log_out(dir / "training_log.csv");
      log_out << result.logs[i].to_csv();
      if (agents[i]) agents[i]->save_checkpoint((dir / "checkpoint.json").string());
    }
    std::ofstream agg(fs::path(opts.out_dir) / "aggregate.csv");
    agg << "episode,mean_return,std_return\n";
    agg.precision(17);
    for (std::size_t e = 0; e < result.mean_return.size(); ++e) {
      agg << e << ',' << result.mean_return[e] << ',' << result.std_return[e] << '\n';
    }
  }
  return result;
}

}  // namespace pg
