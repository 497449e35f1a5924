#pragma once

#include "pg/sim.hpp"

namespace pg {

// TTC-gated AEB on top of constant-velocity cruise. Once triggered, the
// brake stays latched until the vehicle has stopped.
struct BaselineController {
  double ttc_threshold = 1.4;  // s
  bool aeb_latched = false;
};

// Commanded acceleration for this step; updates the latch in place.
double baseline_action(BaselineController& ctrl, double front_gap, double v_self,
                       double v_front_est, const VehicleSpec& spec);

// Leader script: cruise until brake_step, then hold brake_decel (kinematics
// clamps at standstill).
double scripted_leader_action(long t_step, long brake_step, double brake_decel);

}  // namespace pg
