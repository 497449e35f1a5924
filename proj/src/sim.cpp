#include "pg/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pg {

void VehicleSpec::validate() const {
  if (!(length > 0.0) || !(max_decel > 0.0) || !(max_accel >= 0.0)) {
    throw std::invalid_argument(
        "VehicleSpec: need length > 0, max_decel > 0, max_accel >= 0");
  }
}

VehicleState step_kinematics(const VehicleState& state, const VehicleSpec& spec,
                             double a_cmd, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_kinematics: dt must be > 0");
  if (!std::isfinite(state.x) || !std::isfinite(state.v) || !std::isfinite(a_cmd)) {
    throw std::invalid_argument("step_kinematics: non-finite input");
  }

  const double a = std::clamp(a_cmd, -spec.max_decel, spec.max_accel);
  VehicleState next;
  const double v_end = state.v + a * dt;
  if (v_end < 0.0) {
    // Stops inside the step: advance by v^2 / (2|a|) instead of the full-dt
    // displacement, which would bias positions near standstill.
    next.x = state.x + (a < 0.0 ? state.v * state.v / (-2.0 * a) : 0.0);
    next.v = 0.0;
    next.a = state.v > 0.0 ? a : 0.0;  // a parked vehicle isn't accelerating
  } else {
    next.x = state.x + state.v * dt + 0.5 * a * dt * dt;
    next.v = v_end;
    next.a = a;
  }
  return next;
}

void Chain::validate_initial() const {
  if (specs.size() != states.size()) {
    throw std::invalid_argument("Chain: specs/states size mismatch");
  }
  if (specs.size() < 2) throw std::invalid_argument("Chain: need >= 2 vehicles");
  if (!(dt > 0.0)) throw std::invalid_argument("Chain: dt must be > 0");
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    if (!(states[i].x > states[i + 1].x)) {
      throw std::invalid_argument("Chain: x must strictly decrease front to rear");
    }
  }
  for (const auto& s : specs) s.validate();
}

double gap(const Chain& chain, std::size_t i) {
  if (i + 1 >= chain.size()) throw std::out_of_range("gap: index out of range");
  return chain.states[i].x - chain.specs[i].length - chain.states[i + 1].x;
}

std::vector<std::pair<std::size_t, std::size_t>> detect_collision(const Chain& chain) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (gap(chain, i) <= 0.0) pairs.emplace_back(i, i + 1);
  }
  return pairs;
}

double ttc(double gap, double v_rear, double v_front) {
  if (gap < 0.0) throw std::domain_error("ttc: negative gap, already colliding");
  const double closing = v_rear - v_front;
  if (closing <= 0.0) return std::numeric_limits<double>::infinity();
  return gap / closing;
}

}  // namespace pg
