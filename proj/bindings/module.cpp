#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pg/config.hpp"
#include "pg/ddpg.hpp"
#include "pg/eval.hpp"

namespace py = pybind11;
using namespace pg;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Longitudinal car-following simulator, TTC baseline ADAS, and DDPG "
            "acceleration policy";

  py::enum_<VehicleClass>(m, "VehicleClass")
      .value("Light", VehicleClass::Light)
      .value("Heavy", VehicleClass::Heavy);

  py::class_<VehicleSpec>(m, "VehicleSpec")
      .def(py::init<>())
      .def_static("light", &VehicleSpec::light)
      .def_static("heavy", &VehicleSpec::heavy)
      .def_readwrite("cls", &VehicleSpec::cls)
      .def_readwrite("length", &VehicleSpec::length)
      .def_readwrite("max_decel", &VehicleSpec::max_decel)
      .def_readwrite("max_accel", &VehicleSpec::max_accel);

  py::class_<VehicleState>(m, "VehicleState")
      .def(py::init<double, double, double>(), py::arg("x") = 0.0,
           py::arg("v") = 0.0, py::arg("a") = 0.0)
      .def_readwrite("x", &VehicleState::x)
      .def_readwrite("v", &VehicleState::v)
      .def_readwrite("a", &VehicleState::a);

  m.def("step_kinematics", &step_kinematics, py::arg("state"), py::arg("spec"),
        py::arg("a_cmd"), py::arg("dt"));
  m.def("ttc", &ttc, py::arg("gap"), py::arg("v_rear"), py::arg("v_front"));

  py::class_<KalmanTrack>(m, "KalmanTrack")
      .def(py::init<>())
      .def_property_readonly("position", &KalmanTrack::position)
      .def_property_readonly("velocity", &KalmanTrack::velocity)
      .def_property_readonly("acceleration", &KalmanTrack::acceleration);
  m.def("make_track", &make_track, py::arg("position"), py::arg("velocity"),
        py::arg("acceleration"), py::arg("process_jerk_std") = 2.0,
        py::arg("meas_std") = 0.05);
  m.def("kf_predict", &kf_predict, py::arg("track"), py::arg("dt"));
  m.def("kf_update", &kf_update, py::arg("track"), py::arg("measured_position"));

  py::class_<BaselineController>(m, "BaselineController")
      .def(py::init<>())
      .def_readwrite("ttc_threshold", &BaselineController::ttc_threshold)
      .def_readwrite("aeb_latched", &BaselineController::aeb_latched);
  m.def("baseline_action", &baseline_action, py::arg("ctrl"), py::arg("front_gap"),
        py::arg("v_self"), py::arg("v_front_est"), py::arg("spec"));
  m.def("scripted_leader_action", &scripted_leader_action, py::arg("t_step"),
        py::arg("brake_step"), py::arg("brake_decel"));

  py::enum_<ScenarioId>(m, "ScenarioId")
      .value("Brake1", ScenarioId::Brake1)
      .value("Brake2", ScenarioId::Brake2)
      .value("MultiRL", ScenarioId::MultiRL)
      .value("TrainRandom", ScenarioId::TrainRandom);

  py::enum_<FollowerPolicyKind>(m, "FollowerPolicyKind")
      .value("BaselineAdas", FollowerPolicyKind::BaselineAdas)
      .value("RandomDecel", FollowerPolicyKind::RandomDecel);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("classes", &ScenarioConfig::classes)
      .def_readwrite("horizon_steps", &ScenarioConfig::horizon_steps)
      .def_readwrite("dt", &ScenarioConfig::dt)
      .def_readwrite("follower_policy", &ScenarioConfig::follower_policy)
      .def_readwrite("oracle_sensing", &ScenarioConfig::oracle_sensing)
      .def_readwrite("randomize_follower_class",
                     &ScenarioConfig::randomize_follower_class)
      .def("middle_count", &ScenarioConfig::middle_count)
      .def("to_json", [](const ScenarioConfig& cfg) {
        return nlohmann::json(cfg).dump();
      })
      .def_static("from_json", [](const std::string& text) {
        return nlohmann::json::parse(text).get<ScenarioConfig>();
      });

  m.def("make_scenario", &make_scenario, py::arg("id"), py::arg("multi_rl_middles") = 3);
  m.def("deterministic", &deterministic, py::arg("config"));

  py::class_<Observation>(m, "Observation")
      .def_readonly("d_fm", &Observation::d_fm)
      .def_readonly("d_mr", &Observation::d_mr)
      .def_readonly("v_f", &Observation::v_f)
      .def_readonly("v_m", &Observation::v_m)
      .def_readonly("v_r", &Observation::v_r)
      .def_readonly("a_f", &Observation::a_f)
      .def_readonly("a_m", &Observation::a_m)
      .def_readonly("a_r", &Observation::a_r)
      .def("as_array", &Observation::as_array);
  m.def("normalize_obs",
        [](const Observation& obs) { return normalize_obs(obs); });
  m.def("discounted_return", [](const std::vector<double>& rewards, double gamma) {
    return discounted_return(rewards, gamma);
  });

  py::class_<StepResult>(m, "StepResult")
      .def_readonly("observation", &StepResult::observation)
      .def_readonly("reward", &StepResult::reward)
      .def_readonly("done", &StepResult::done)
      .def_readonly("collisions", &StepResult::collisions);

  py::class_<Env>(m, "Env")
      .def(py::init<const ScenarioConfig&>(), py::arg("config"))
      .def("reset", &Env::reset, py::arg("seed"))
      .def("step", &Env::step, py::arg("a_cmd"))
      .def_property_readonly("active", &Env::active)
      .def_property_readonly("step_count", &Env::step_count);

  py::class_<AgentConfig>(m, "AgentConfig")
      .def(py::init<>())
      .def_readwrite("gamma", &AgentConfig::gamma)
      .def_readwrite("tau", &AgentConfig::tau)
      .def_readwrite("lr_actor", &AgentConfig::lr_actor)
      .def_readwrite("lr_critic", &AgentConfig::lr_critic)
      .def_readwrite("batch_size", &AgentConfig::batch_size)
      .def_readwrite("memory_capacity", &AgentConfig::memory_capacity)
      .def_readwrite("noise_std0", &AgentConfig::noise_std0)
      .def_readwrite("noise_decay", &AgentConfig::noise_decay)
      .def_readwrite("action_min", &AgentConfig::action_min)
      .def_readwrite("action_max", &AgentConfig::action_max)
      .def_readwrite("hidden", &AgentConfig::hidden)
      .def_readwrite("warmup", &AgentConfig::warmup);

  py::class_<DdpgAgent>(m, "DdpgAgent")
      .def(py::init<const AgentConfig&, std::uint64_t>(), py::arg("config"),
           py::arg("seed"))
      .def("act", &DdpgAgent::act, py::arg("normalized_observation"))
      .def("noise_std", &DdpgAgent::noise_std, py::arg("global_env_steps"))
      .def("save_checkpoint", &DdpgAgent::save_checkpoint, py::arg("path"))
      .def_static("load_checkpoint", &DdpgAgent::load_checkpoint, py::arg("path"));

  py::class_<EpisodeStats>(m, "EpisodeStats")
      .def_readonly("episode", &EpisodeStats::episode)
      .def_readonly("steps", &EpisodeStats::steps)
      .def_readonly("undiscounted_return", &EpisodeStats::undiscounted_return)
      .def_readonly("discounted_return", &EpisodeStats::discounted_return)
      .def_readonly("collided", &EpisodeStats::collided)
      .def_readonly("noise_std", &EpisodeStats::noise_std);

  py::class_<TrainingLog>(m, "TrainingLog")
      .def_readonly("episodes", &TrainingLog::episodes)
      .def_readonly("reached_target", &TrainingLog::reached_target)
      .def_readonly("target_episode", &TrainingLog::target_episode)
      .def("to_csv", &TrainingLog::to_csv);

  py::class_<TrainOptions>(m, "TrainOptions")
      .def(py::init<>())
      .def_readwrite("episodes", &TrainOptions::episodes)
      .def_readwrite("exploration_episodes", &TrainOptions::exploration_episodes)
      .def_readwrite("seed", &TrainOptions::seed)
      .def_readwrite("stop_ma_target", &TrainOptions::stop_ma_target)
      .def_readwrite("ma_window", &TrainOptions::ma_window)
      .def_readwrite("updates_enabled", &TrainOptions::updates_enabled)
      .def_readwrite("explore_scenario", &TrainOptions::explore_scenario)
      .def_readwrite("exploit_scenario", &TrainOptions::exploit_scenario);

  m.def("train", &train, py::arg("agent"), py::arg("options"),
        py::call_guard<py::gil_scoped_release>());

  py::enum_<ControllerKind>(m, "ControllerKind")
      .value("Baseline", ControllerKind::Baseline)
      .value("RlPolicy", ControllerKind::RlPolicy);

  py::class_<TrajectoryRow>(m, "TrajectoryRow")
      .def_readonly("step", &TrajectoryRow::step)
      .def_readonly("t", &TrajectoryRow::t)
      .def_readonly("vehicle_id", &TrajectoryRow::vehicle_id)
      .def_readonly("x", &TrajectoryRow::x)
      .def_readonly("v", &TrajectoryRow::v)
      .def_readonly("a", &TrajectoryRow::a)
      .def_readonly("gap_ahead", &TrajectoryRow::gap_ahead);

  py::class_<TrajectoryLog>(m, "TrajectoryLog")
      .def_readonly("dt", &TrajectoryLog::dt)
      .def_readonly("lengths", &TrajectoryLog::lengths)
      .def_readonly("rows", &TrajectoryLog::rows);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("scenario", &RunReport::scenario)
      .def_readonly("controller", &RunReport::controller)
      .def_readonly("collided", &RunReport::collided)
      .def_readonly("collision_pairs", &RunReport::collision_pairs)
      .def_readonly("collision_step", &RunReport::collision_step)
      .def_readonly("min_gap", &RunReport::min_gap)
      .def_readonly("stop_time", &RunReport::stop_time)
      .def_readonly("episode_return", &RunReport::episode_return)
      .def("to_json", [](const RunReport& r) { return report_to_json(r).dump(); });

  m.def(
      "evaluate",
      [](const ScenarioConfig& scenario, ControllerKind controller,
         const DdpgAgent* policy, bool deterministic, std::uint64_t seed,
         const std::string& name) {
        EvalOptions opts;
        opts.deterministic = deterministic;
        opts.seed = seed;
        return evaluate(scenario, controller, policy, opts, name);
      },
      py::arg("scenario"), py::arg("controller"), py::arg("policy") = nullptr,
      py::arg("deterministic") = true, py::arg("seed") = 0,
      py::arg("name") = "", py::call_guard<py::gil_scoped_release>());

  py::class_<FeasibilityPlan>(m, "FeasibilityPlan")
      .def_readonly("brake_onset_step", &FeasibilityPlan::brake_onset_step)
      .def_readonly("decel", &FeasibilityPlan::decel)
      .def_readonly("accel_start_step", &FeasibilityPlan::accel_start_step)
      .def_readonly("accel", &FeasibilityPlan::accel);

  py::class_<FeasibilityResult>(m, "FeasibilityResult")
      .def_readonly("feasible", &FeasibilityResult::feasible)
      .def_readonly("plan", &FeasibilityResult::plan)
      .def_readonly("min_gap", &FeasibilityResult::min_gap);

  m.def("feasibility_oracle", &feasibility_oracle, py::arg("scenario"),
        py::call_guard<py::gil_scoped_release>());
  m.def("evaluate_plan", &evaluate_plan, py::arg("scenario"), py::arg("plan"));

  m.def("export_trajectory_csv", &export_trajectory_csv, py::arg("log"), py::arg("path"));
  m.def("parse_trajectory_csv", &parse_trajectory_csv, py::arg("path"));

  py::enum_<ChartKind>(m, "ChartKind")
      .value("TimeSpace", ChartKind::TimeSpace)
      .value("TimeSpeed", ChartKind::TimeSpeed)
      .value("Spacing", ChartKind::Spacing);
  m.def("export_trajectory_svg", &export_trajectory_svg, py::arg("log"),
        py::arg("kind"), py::arg("path"));

#ifdef VERSION_INFO
#define PG_STR2(x) #x
#define PG_STR(x) PG_STR2(x)
  m.attr("__version__") = PG_STR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
