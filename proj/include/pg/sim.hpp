#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace pg {

enum class VehicleClass { Light, Heavy };

// Physical parameters of one vehicle. Deceleration and acceleration limits
// are positive magnitudes.
struct VehicleSpec {
  VehicleClass cls = VehicleClass::Light;
  double length = 2.0;     // m
  double max_decel = 7.5;  // m/s^2
  double max_accel = 3.0;  // m/s^2

  static VehicleSpec light() { return {VehicleClass::Light, 2.0, 7.5, 3.0}; }
  static VehicleSpec heavy() { return {VehicleClass::Heavy, 15.0, 6.0, 1.5}; }
  static VehicleSpec of(VehicleClass cls) {
    return cls == VehicleClass::Heavy ? heavy() : light();
  }
  void validate() const;
};

// Kinematic state. x is the front-bumper coordinate; the rear bumper sits at
// x - length. v never goes negative; a is the acceleration applied over the
// last step.
struct VehicleState {
  double x = 0.0;  // m
  double v = 0.0;  // m/s
  double a = 0.0;  // m/s^2
};

// Constant-acceleration exact integration of one step. The command is
// clipped to the vehicle's limits; a vehicle that would reverse instead
// stops within the step at the analytic stopping distance.
VehicleState step_kinematics(const VehicleState& state, const VehicleSpec& spec,
                             double a_cmd, double dt);

// Chain of vehicles ordered front to rear, sharing one clock.
struct Chain {
  std::vector<VehicleSpec> specs;
  std::vector<VehicleState> states;
  double dt = 0.01;

  std::size_t size() const { return specs.size(); }
  // Front-bumper coordinates must strictly decrease front to rear.
  void validate_initial() const;
};

// Bumper-to-bumper distance between vehicle i and the one behind it.
// Negative means overlap.
double gap(const Chain& chain, std::size_t i);

// All adjacent pairs currently touching or overlapping (gap <= 0).
std::vector<std::pair<std::size_t, std::size_t>> detect_collision(const Chain& chain);

// Time to collision of a rear vehicle closing on a front one. Infinite when
// there is no closing speed. Throws if the pair already overlaps.
double ttc(double gap, double v_rear, double v_front);

}  // namespace pg
