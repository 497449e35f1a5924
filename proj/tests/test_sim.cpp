#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>

#include "pg/rng.hpp"
#include "pg/sim.hpp"

using namespace pg;

namespace {

Chain make_chain(std::vector<double> xs, std::vector<double> vs,
                 std::vector<VehicleSpec> specs, double dt = 0.01) {
  Chain c;
  c.dt = dt;
  c.specs = std::move(specs);
  for (std::size_t i = 0; i < xs.size(); ++i) c.states.push_back({xs[i], vs[i], 0.0});
  return c;
}

// Fine-substep explicit integration with the same no-reverse rule; oracle
// for the within-step stop distance.
VehicleState substep_oracle(VehicleState s, const VehicleSpec& spec, double a_cmd,
                            double dt, int substeps) {
  const double a = std::clamp(a_cmd, -spec.max_decel, spec.max_accel);
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) {
    if (s.v <= 0.0 && a <= 0.0) break;
    const double v_next = s.v + a * h;
    if (v_next < 0.0) {
      s.x += s.v * s.v / (-2.0 * a);
      s.v = 0.0;
      break;
    }
    s.x += s.v * h + 0.5 * a * h * h;
    s.v = v_next;
  }
  return s;
}

}  // namespace

TEST_CASE("step_kinematics closed-form examples") {
  const VehicleSpec light = VehicleSpec::light();

  auto r = step_kinematics({0.0, 25.0, 0.0}, light, -3.0, 0.01);
  CHECK(r.x == doctest::Approx(0.24985).epsilon(1e-12));
  CHECK(r.v == doctest::Approx(24.97).epsilon(1e-12));
  CHECK(r.a == -3.0);

  r = step_kinematics({10.0, 25.0, 0.0}, light, 0.0, 0.01);
  CHECK(r.x == doctest::Approx(10.25).epsilon(1e-12));
  CHECK(r.v == 25.0);
}

TEST_CASE("step_kinematics stops within the step") {
  const VehicleSpec light = VehicleSpec::light();
  const VehicleState s{100.0, 0.05, 0.0};

  const auto r = step_kinematics(s, light, -7.5, 0.01);
  CHECK(r.v == 0.0);
  CHECK(r.x == doctest::Approx(100.0 + 0.05 * 0.05 / 15.0).epsilon(1e-12));

  const auto fine = substep_oracle(s, light, -7.5, 0.01, 100000);
  CHECK(r.x == doctest::Approx(fine.x).epsilon(1e-9));
  CHECK(fine.v == 0.0);
}

TEST_CASE("step_kinematics clips commands to vehicle limits") {
  const VehicleSpec light = VehicleSpec::light();
  const VehicleSpec heavy = VehicleSpec::heavy();
  CHECK(step_kinematics({0, 25, 0}, light, -20.0, 0.01).a == -7.5);
  CHECK(step_kinematics({0, 25, 0}, light, 5.0, 0.01).a == 3.0);
  CHECK(step_kinematics({0, 25, 0}, heavy, -20.0, 0.01).a == -6.0);
}

TEST_CASE("step_kinematics parked vehicle stays parked under braking") {
  const auto r = step_kinematics({5.0, 0.0, 0.0}, VehicleSpec::light(), -7.5, 0.01);
  CHECK(r.x == 5.0);
  CHECK(r.v == 0.0);
  CHECK(r.a == 0.0);
}

TEST_CASE("step_kinematics rejects bad input") {
  const VehicleSpec light = VehicleSpec::light();
  CHECK_THROWS_AS(step_kinematics({0, 25, 0}, light, -3.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(step_kinematics({0, 25, 0}, light, -3.0, -0.01), std::invalid_argument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step_kinematics({nan, 25, 0}, light, -3.0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(step_kinematics({0, 25, 0}, light, nan, 0.01), std::invalid_argument);
}

TEST_CASE("integration exactness over many constant-acceleration steps") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const double x0 = rng.uniform(-100.0, 100.0);
    const double v0 = rng.uniform(5.0, 40.0);
    const double dt = rng.uniform(0.001, 0.05);
    const int n = 500 + static_cast<int>(rng.uniform_index(1500));
    // keep v positive throughout so no stop event fires
    const double a_min = -v0 / (n * dt);
    const double a = rng.uniform(std::max(-7.5, a_min * 0.99), 3.0);

    VehicleState s{x0, v0, 0.0};
    const VehicleSpec spec = VehicleSpec::light();
    for (int i = 0; i < n; ++i) s = step_kinematics(s, spec, a, dt);

    const double t = n * dt;
    const double x_exact = x0 + v0 * t + 0.5 * a * t * t;
    const double v_exact = v0 + a * t;
    CHECK(s.x == doctest::Approx(x_exact).epsilon(1e-9));
    CHECK(s.v == doctest::Approx(v_exact).epsilon(1e-9));
  }
}

TEST_CASE("no reversing, position non-decreasing") {
  Rng rng(32);
  const VehicleSpec spec = VehicleSpec::light();
  VehicleState s{0.0, 10.0, 0.0};
  for (int i = 0; i < 5000; ++i) {
    const double prev_x = s.x;
    s = step_kinematics(s, spec, rng.uniform(-12.0, 5.0), 0.01);
    CHECK(s.v >= 0.0);
    CHECK(s.x >= prev_x);
  }
}

TEST_CASE("dt refinement: aligned piecewise-constant commands give identical states") {
  Rng rng(33);
  const VehicleSpec spec = VehicleSpec::light();
  VehicleState coarse{0.0, 25.0, 0.0};
  VehicleState fine = coarse;
  for (int i = 0; i < 400; ++i) {
    const double cmd = rng.uniform(-9.0, 4.0);
    coarse = step_kinematics(coarse, spec, cmd, 0.02);
    fine = step_kinematics(fine, spec, cmd, 0.01);
    fine = step_kinematics(fine, spec, cmd, 0.01);
    CHECK(fine.x == doctest::Approx(coarse.x).epsilon(1e-12));
    CHECK(fine.v == doctest::Approx(coarse.v).epsilon(1e-12));
  }
}

TEST_CASE("gap uses front-bumper convention") {
  auto c = make_chain({36.0, 18.0, 0.0}, {25, 25, 25},
                      {VehicleSpec::light(), VehicleSpec::light(), VehicleSpec::heavy()});
  CHECK(gap(c, 0) == 16.0);
  CHECK(gap(c, 1) == 16.0);

  auto touching = make_chain({20.0, 18.0}, {0, 0},
                             {VehicleSpec::light(), VehicleSpec::light()});
  CHECK(gap(touching, 0) == 0.0);
  CHECK_THROWS_AS(gap(touching, 1), std::out_of_range);
}

TEST_CASE("detect_collision reports touching and overlapping pairs") {
  auto safe = make_chain({36, 18, 0}, {25, 25, 25},
                         {VehicleSpec::light(), VehicleSpec::light(), VehicleSpec::light()});
  CHECK(detect_collision(safe).empty());

  auto touch = make_chain({20, 18, 11}, {0, 0, 0},
                          {VehicleSpec::light(), VehicleSpec::light(), VehicleSpec::light()});
  REQUIRE(detect_collision(touch).size() == 1);
  CHECK(detect_collision(touch)[0] == std::pair<std::size_t, std::size_t>{0, 1});

  auto pileup = make_chain({20.0, 18.3, 16.4}, {0, 0, 0},
                           {VehicleSpec::light(), VehicleSpec::light(), VehicleSpec::light()});
  REQUIRE(detect_collision(pileup).size() == 2);
}

TEST_CASE("collision detection matches gap sign over random chains") {
  Rng rng(34);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(5);
    Chain c;
    c.specs.assign(n, VehicleSpec::light());
    double x = 200.0;
    for (std::size_t i = 0; i < n; ++i) {
      x -= rng.uniform(1.0, 25.0);
      c.states.push_back({x, 0.0, 0.0});
    }
    const auto pairs = detect_collision(c);
    std::size_t k = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const bool hit = gap(c, i) <= 0.0;
      const bool reported = k < pairs.size() && pairs[k].first == i;
      CHECK(hit == reported);
      if (reported) ++k;
    }
    CHECK(k == pairs.size());
  }
}

TEST_CASE("ttc examples and scale invariance") {
  CHECK(std::isinf(ttc(16.0, 25.0, 25.0)));
  CHECK(ttc(16.0, 25.0, 17.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ttc(10.5, 25.0, 17.5) == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(ttc(0.0, 25.0, 17.0) == 0.0);
  CHECK_THROWS_AS(ttc(-0.1, 25.0, 17.0), std::domain_error);

  Rng rng(35);
  for (int trial = 0; trial < 100; ++trial) {
    const double g = rng.uniform(0.1, 50.0);
    const double vf = rng.uniform(0.0, 30.0);
    const double vr = vf + rng.uniform(0.1, 20.0);
    const double k = rng.uniform(0.1, 10.0);
    CHECK(ttc(k * g, k * vr, k * vf) == doctest::Approx(ttc(g, vr, vf)).epsilon(1e-12));
  }
}

TEST_CASE("chain initial validation") {
  auto bad = make_chain({18.0, 18.0}, {25, 25},
                        {VehicleSpec::light(), VehicleSpec::light()});
  CHECK_THROWS_AS(bad.validate_initial(), std::invalid_argument);

  VehicleSpec s = VehicleSpec::light();
  s.length = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
