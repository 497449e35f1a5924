"""Longitudinal car-following simulation with a TTC baseline ADAS and a DDPG
acceleration policy trained from scratch in the C++ core."""

from ._core import (  # noqa: F401
    AgentConfig,
    BaselineController,
    ChartKind,
    ControllerKind,
    DdpgAgent,
    Env,
    EpisodeStats,
    FeasibilityPlan,
    FeasibilityResult,
    FollowerPolicyKind,
    KalmanTrack,
    Observation,
    RunReport,
    ScenarioConfig,
    ScenarioId,
    StepResult,
    TrainOptions,
    TrainingLog,
    TrajectoryLog,
    TrajectoryRow,
    VehicleClass,
    VehicleSpec,
    VehicleState,
    __version__,
    baseline_action,
    deterministic,
    discounted_return,
    evaluate,
    evaluate_plan,
    export_trajectory_csv,
    export_trajectory_svg,
    feasibility_oracle,
    kf_predict,
    kf_update,
    make_scenario,
    make_track,
    normalize_obs,
    parse_trajectory_csv,
    scripted_leader_action,
    step_kinematics,
    train,
    ttc,
)
