#include "pg/kalman.hpp"

#include <cmath>
#include <stdexcept>

namespace pg {

KalmanTrack make_track(double position, double velocity, double acceleration,
                       double process_jerk_std, double meas_std) {
  KalmanTrack t;
  t.state << position, velocity, acceleration;
  t.cov = Eigen::Vector3d(1.0, 4.0, 4.0).asDiagonal();
  t.process_jerk_std = process_jerk_std;
  t.meas_std = meas_std;
  return t;
}

KalmanTrack kf_predict(const KalmanTrack& track, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("kf_predict: dt must be > 0");

  Eigen::Matrix3d f;
  f << 1.0, dt, 0.5 * dt * dt,
       0.0, 1.0, dt,
       0.0, 0.0, 1.0;

  // Discrete white-jerk process noise.
  const double q = track.process_jerk_std * track.process_jerk_std;
  const double d2 = dt * dt, d3 = d2 * dt, d4 = d3 * dt, d5 = d4 * dt;
  Eigen::Matrix3d noise;
  noise << d5 / 20.0, d4 / 8.0, d3 / 6.0,
           d4 / 8.0,  d3 / 3.0, d2 / 2.0,
           d3 / 6.0,  d2 / 2.0, dt;

  KalmanTrack next = track;
  next.state = f * track.state;
  next.cov = f * track.cov * f.transpose() + q * noise;
  next.cov = 0.5 * (next.cov + next.cov.transpose()).eval();
  return next;
}

KalmanTrack kf_update(const KalmanTrack& track, double measured_position) {
  if (!std::isfinite(measured_position)) {
    throw std::invalid_argument("kf_update: non-finite measurement");
  }

  const double r = track.meas_std * track.meas_std;
  const double innovation = measured_position - track.state(0);
  const double s = track.cov(0, 0) + r;
  const Eigen::Vector3d gain = track.cov.col(0) / s;

  KalmanTrack next = track;
  next.state = track.state + gain * innovation;
  // Joseph form keeps the covariance symmetric PSD.
  Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
  a.col(0) -= gain;
  next.cov = a * track.cov * a.transpose() + r * gain * gain.transpose();
  next.cov = 0.5 * (next.cov + next.cov.transpose()).eval();
  return next;
}

double neighbor_position_from_gap(double ego_x, double ego_length,
                                  double gap_meas, Side side) {
  if (gap_meas < 0.0) throw std::invalid_argument("negative gap measurement");
  return side == Side::Front ? ego_x + gap_meas : ego_x - ego_length - gap_meas;
}

KalmanTrack track_neighbor(double ego_x, double ego_length, double gap_meas,
                           Side side, const KalmanTrack& track, double dt) {
  const double meas = neighbor_position_from_gap(ego_x, ego_length, gap_meas, side);
  return kf_update(kf_predict(track, dt), meas);
}

}  // namespace pg
