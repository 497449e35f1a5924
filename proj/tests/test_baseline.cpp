#include <doctest.h>

#include <stdexcept>

#include "pg/baseline.hpp"

using namespace pg;

TEST_CASE("baseline holds speed while TTC is safe") {
  BaselineController ctrl;
  CHECK(baseline_action(ctrl, 16.0, 25.0, 25.0, VehicleSpec::light()) == 0.0);
  CHECK_FALSE(ctrl.aeb_latched);
}

TEST_CASE("baseline brakes at max deceleration below the TTC threshold") {
  // TTC = 10 / 7.5 = 1.333 s < 1.4 s
  BaselineController light_ctrl;
  CHECK(baseline_action(light_ctrl, 10.0, 25.0, 17.5, VehicleSpec::light()) == -7.5);
  CHECK(light_ctrl.aeb_latched);

  BaselineController heavy_ctrl;
  CHECK(baseline_action(heavy_ctrl, 10.0, 25.0, 17.5, VehicleSpec::heavy()) == -6.0);
}

TEST_CASE("threshold is strict: TTC exactly 1.4 s does not trigger") {
  // 14 / 10 = 1.4 exactly
  BaselineController ctrl;
  CHECK(baseline_action(ctrl, 14.0, 25.0, 15.0, VehicleSpec::light()) == 0.0);
  CHECK_FALSE(ctrl.aeb_latched);

  CHECK(baseline_action(ctrl, 14.0 - 1e-9, 25.0, 15.0, VehicleSpec::light()) == -7.5);
  CHECK(ctrl.aeb_latched);
}

TEST_CASE("brake latches until standstill, then releases to hold") {
  BaselineController ctrl;
  REQUIRE(baseline_action(ctrl, 5.0, 25.0, 10.0, VehicleSpec::light()) == -7.5);

  // safe TTC again, still moving: brake held
  CHECK(baseline_action(ctrl, 50.0, 20.0, 25.0, VehicleSpec::light()) == -7.5);
  CHECK(baseline_action(ctrl, 80.0, 5.0, 25.0, VehicleSpec::light()) == -7.5);

  // stopped: hold position
  CHECK(baseline_action(ctrl, 80.0, 0.0, 25.0, VehicleSpec::light()) == 0.0);
  CHECK_FALSE(ctrl.aeb_latched);
  CHECK(baseline_action(ctrl, 80.0, 0.0, 25.0, VehicleSpec::light()) == 0.0);
}

TEST_CASE("command sequence is a 0 -> -max_decel step function while moving") {
  BaselineController ctrl;
  double v = 25.0;
  double gap = 12.0;
  bool braked = false;
  bool stopped = false;
  for (int k = 0; k < 1000 && !stopped; ++k) {
    if (!braked) gap -= 0.01;  // leader slowly closing in; TTC = gap / 5
    const double a = baseline_action(ctrl, gap, v, 20.0, VehicleSpec::light());
    if (a != 0.0) {
      CHECK(a == -7.5);
      braked = true;
    } else {
      CHECK_FALSE((braked && v > 0.0));  // never cruise again while moving
    }
    if (braked) v = std::max(0.0, v - 7.5 * 0.01);
    stopped = v == 0.0;
  }
  CHECK(braked);
  CHECK(stopped);
}

TEST_CASE("baseline rejects negative gaps") {
  BaselineController ctrl;
  CHECK_THROWS_AS(baseline_action(ctrl, -0.1, 25.0, 20.0, VehicleSpec::light()),
                  std::invalid_argument);
}

TEST_CASE("scripted leader: cruise, then hold the brake") {
  CHECK(scripted_leader_action(99, 100, -3.0) == 0.0);
  CHECK(scripted_leader_action(100, 100, -3.0) == -3.0);
  CHECK(scripted_leader_action(500, 100, -3.0) == -3.0);
  CHECK(scripted_leader_action(0, 0, -3.0) == -3.0);
  CHECK_THROWS_AS(scripted_leader_action(0, -1, -3.0), std::invalid_argument);
}
