#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pg/ddpg.hpp"
#include "pg/env.hpp"
#include "pg/scenario.hpp"

namespace pg {

enum class ControllerKind { Baseline, RlPolicy };

struct TrajectoryRow {
  long step = 0;
  double t = 0.0;
  int vehicle_id = 0;
  double x = 0.0;
  double v = 0.0;
  double a = 0.0;
  double gap_ahead = 0.0;  // +inf for the lead vehicle
};

struct TrajectoryLog {
  double dt = 0.01;
  std::vector<double> lengths;  // per vehicle
  std::vector<TrajectoryRow> rows;
};

struct RunReport {
  std::string scenario;
  std::string controller;
  bool collided = false;
  std::vector<std::pair<std::size_t, std::size_t>> collision_pairs;
  long collision_step = -1;  // first collision
  std::vector<double> min_gap;    // per adjacent pair, over the whole run
  std::vector<double> stop_time;  // per vehicle; -1 if still moving at horizon
  double episode_return = 0.0;    // reward ledger, closed at first collision
};

nlohmann::json report_to_json(const RunReport& report);

struct EvalOptions {
  bool deterministic = true;
  std::uint64_t seed = 0;
};

// Run one episode with every middle vehicle under the given controller
// (the RL policy is shared across middles). The simulation keeps going past
// a collision so the full-horizon diagrams can be drawn.
std::pair<TrajectoryLog, RunReport> evaluate(const ScenarioConfig& scenario,
                                             ControllerKind controller,
                                             const DdpgAgent* policy,
                                             const EvalOptions& opts = {},
                                             const std::string& scenario_name = "");

// Open-loop plan applied by every middle vehicle: cruise, brake at constant
// decel from brake_onset_step, optionally switch to a constant acceleration
// from accel_start_step.
struct FeasibilityPlan {
  long brake_onset_step = 0;
  double decel = 0.0;  // <= 0
  long accel_start_step = -1;
  double accel = 0.0;
};

struct FeasibilityResult {
  bool feasible = false;
  FeasibilityPlan plan;
  double min_gap = 0.0;  // under the witness plan
};

// Grid search for an open-loop middle-vehicle plan that keeps every gap
// positive while leader and follower behave as scripted/TTC. A returned
// witness has been re-verified by replay.
FeasibilityResult feasibility_oracle(const ScenarioConfig& scenario);

// Replay of a plan for consistency checks and plotting.
std::pair<TrajectoryLog, RunReport> evaluate_plan(const ScenarioConfig& scenario,
                                                  const FeasibilityPlan& plan);

void export_trajectory_csv(const TrajectoryLog& log, const std::string& path);
TrajectoryLog parse_trajectory_csv(const std::string& path);

enum class ChartKind { TimeSpace, TimeSpeed, Spacing };
void export_trajectory_svg(const TrajectoryLog& log, ChartKind kind,
                           const std::string& path);

struct SuiteOptions {
  std::vector<std::uint64_t> seeds;
  AgentConfig agent;
  TrainOptions train;  // per-seed copy, seed field overridden
  int jobs = 0;        // parallel trainings; 0 = hardware concurrency
  std::string out_dir;  // when set, writes per-seed logs/checkpoints + aggregate
};

struct SuiteResult {
  std::vector<std::uint64_t> seeds;
  std::vector<TrainingLog> logs;
  // Across seeds, per episode index up to the shortest log.
  std::vector<double> mean_return;
  std::vector<double> std_return;
};

SuiteResult run_training_suite(const SuiteOptions& opts);

}  // namespace pg
