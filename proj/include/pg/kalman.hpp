#pragma once

#include <Eigen/Dense>

namespace pg {

enum class Side { Front, Rear };

// Constant-acceleration tracker fed by position-only measurements, with a
// white-jerk process noise model. State is (position, velocity, acceleration).
struct KalmanTrack {
  Eigen::Vector3d state = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Identity();
  double process_jerk_std = 2.0;  // m/s^3
  double meas_std = 0.05;         // m

  double position() const { return state(0); }
  double velocity() const { return state(1); }
  double acceleration() const { return state(2); }
};

// Track with the standard launch-condition initialization:
// covariance diag(1, 4, 4).
KalmanTrack make_track(double position, double velocity, double acceleration,
                       double process_jerk_std = 2.0, double meas_std = 0.05);

KalmanTrack kf_predict(const KalmanTrack& track, double dt);
KalmanTrack kf_update(const KalmanTrack& track, double measured_position);

// Reference point implied by a gap measurement: the leader's rear bumper for
// Front, the follower's front bumper for Rear.
double neighbor_position_from_gap(double ego_x, double ego_length,
                                  double gap_meas, Side side);

// One sensing cycle for a neighbor: gap -> position measurement, then
// predict + update.
KalmanTrack track_neighbor(double ego_x, double ego_length, double gap_meas,
                           Side side, const KalmanTrack& track, double dt);

}  // namespace pg
