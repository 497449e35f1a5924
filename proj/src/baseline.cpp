#include "pg/baseline.hpp"

#include <stdexcept>

namespace pg {

double baseline_action(BaselineController& ctrl, double front_gap, double v_self,
                       double v_front_est, const VehicleSpec& spec) {
  if (front_gap < 0.0) {
    throw std::invalid_argument("baseline_action: negative front gap");
  }
  if (ctrl.aeb_latched && v_self <= 0.0) {
    ctrl.aeb_latched = false;  // stopped; hold position from here
  }
  if (!ctrl.aeb_latched && v_self > 0.0 &&
      ttc(front_gap, v_self, v_front_est) < ctrl.ttc_threshold) {
    ctrl.aeb_latched = true;
  }
  return ctrl.aeb_latched ? -spec.max_decel : 0.0;
}

double scripted_leader_action(long t_step, long brake_step, double brake_decel) {
  if (brake_step < 0) throw std::invalid_argument("brake_step must be >= 0");
  return t_step >= brake_step ? brake_decel : 0.0;
}

}  // namespace pg
