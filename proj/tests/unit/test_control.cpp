#include <cmath>
#include <random>

#include "doctest.h"
#include "fowf/control/controller.hpp"
#include "fowf/error.hpp"
#include "fowf/farm/closed_loop.hpp"
#include "fowf/lpv/design.hpp"
#include "helpers.hpp"

using namespace fowf;
using namespace fowf::control;
using plant::TurbineParams;
using plant::TurbineState;
using testing_support::rpm;

namespace {

TurbineParams toy_params() {
  TurbineParams p;
  p.rotor_inertia = 1000.0;
  p.generator_inertia = 0.0;
  p.gear_ratio = 10.0;
  p.generator_efficiency = 0.9;
  p.max_generator_torque = 1e9;
  return p;
}

Region3Schedule scalar_schedule(double k_i, double k_x) {
  Region3Schedule s;
  s.wind = {12.0};
  s.k_i = {k_i};
  s.k_x = {{k_x}};
  s.feedback_states = {TurbineState::kPitch};
  return s;
}

// C_p(lambda) = a lambda^n over a fine lambda axis, flat in beta.
plant::AeroSurfaces power_law_surface(double a, int n) {
  std::vector<double> lam, beta{0.0, 0.6}, cp, ct;
  for (int i = 0; i <= 2000; ++i) lam.push_back(0.01 * i);
  for (double l : lam) {
    const double v = a * std::pow(l, n);
    cp.insert(cp.end(), {v, v});
    ct.insert(ct.end(), {0.5, 0.5});
  }
  return plant::AeroSurfaces(lam, beta, cp, ct);
}

// Default coefficients with the thrust removed so the platform stays at rest.
plant::AeroSurfaces thrustless_surfaces() {
  const auto& s = testing_support::default_surfaces();
  std::vector<double> cp, ct;
  for (std::size_t i = 0; i < s.lambda_axis().size(); ++i) {
    for (std::size_t j = 0; j < s.beta_axis().size(); ++j) {
      cp.push_back(s.cp_at(i, j));
      ct.push_back(0.0);
    }
  }
  return plant::AeroSurfaces(s.lambda_axis(), s.beta_axis(), cp, ct);
}

}  // namespace

TEST_CASE("region 2 torque law hand values") {
  const auto g = Region2Gains::make(0.1, 1.0, toy_params());
  CHECK(region2_torque(0.0, 0.0, g).torque == 0.0);
  const double expected = 1000.0 / (0.1 * 10.0) * (0.1 * 2.0 + 1.0 * 0.5);
  CHECK(region2_torque(0.5, 2.0, g).torque == doctest::Approx(expected));
  CHECK(expected == doctest::Approx(700.0));
  // linear away from the clamps
  const double a = region2_torque(0.3, 1.0, g).torque;
  const double b = region2_torque(0.1, 4.0, g).torque;
  CHECK(region2_torque(0.4, 5.0, g).torque == doctest::Approx(a + b));
  // clamp at zero
  const auto neg = region2_torque(-1.0, 0.0, g);
  CHECK(neg.torque == 0.0);
  CHECK(neg.saturated);
}

TEST_CASE("model-based torque law and its fixed point") {
  const auto g = Region2Gains::make(0.1, 1.0, toy_params());
  CHECK(region2_torque_model_based(0.0, 0.0, 1.0, 0.0, g) == 0.0);
  CHECK(region2_torque_model_based(0.0, 0.0, 1.0, 5000.0, g) ==
        doctest::Approx(1000.0 / 10.0 * 0.0 + 5000.0 / (10.0 * 1.0)));
  CHECK(region2_torque_model_based(0.0, 0.0, 1.0, 5000.0, g) == doctest::Approx(500.0));
  CHECK_THROWS_AS(region2_torque_model_based(0.0, 0.0, 0.0, 1.0, g), SingularityError);

  // Feeding back P_gen = nu N omega T makes T a fixed point of the pre-substitution law.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> e(-0.2, 0.2), ie(0.0, 5.0), om(0.5, 2.0);
  for (int k = 0; k < 50; ++k) {
    const double ee = e(rng), ii = ie(rng), w = om(rng);
    const double t = region2_torque(ee, ii, g).raw;
    const double power = g.generator_efficiency * g.gear_ratio * w * t;
    CHECK(region2_torque_model_based(ee, ii, w, power, g) == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("gain condition is enforced at construction") {
  const TurbineParams p = toy_params();
  CHECK_THROWS_AS(Region2Gains::make(0.0, 1.0, p), ConfigError);
  const double bound = (1.0 - 0.9) * 5000.0 / 1000.0;
  CHECK(Region2Gains::min_proportional_gain(5000.0, p) == doctest::Approx(bound));
  CHECK_THROWS_AS(Region2Gains::make(0.1, 0.99 * bound, p, 5000.0), ConfigError);
  CHECK_NOTHROW(Region2Gains::make(0.1, 1.01 * bound, p, 5000.0));
}

TEST_CASE("Lipschitz estimate on analytic torque surfaces") {
  const TurbineParams p;
  const auto g = lpv::default_region2_gains(p);
  // C_p = a lambda gives a torque independent of rotor speed.
  const auto flat = check_region2_gains(g, power_law_surface(0.03, 1), p, {0.8, 1.3}, {8.0, 10.0});
  CHECK(flat.lipschitz < 1e-6 * p.equivalent_inertia());
  CHECK(flat.pass);

  // C_p = a lambda^2 gives T_a = c omega with c = 0.5 rho A u a R^2.
  const double a = 0.005;
  const double u = 9.0;
  const auto lin = check_region2_gains(g, power_law_surface(a, 2), p, {0.8, 1.3}, {u, u});
  const double c = 0.5 * p.air_density * p.swept_area() * u * a * p.rotor_radius * p.rotor_radius;
  CHECK(lin.lipschitz == doctest::Approx(c).epsilon(1e-3));
}

TEST_CASE("shrinking the box never increases L") {
  const TurbineParams p;
  const auto g = lpv::default_region2_gains(p);
  const auto& s = testing_support::default_surfaces();
  const double big = check_region2_gains(g, s, p, {rpm(6), rpm(13)}, {5, 12}).lipschitz;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> f(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double o1 = rpm(6) + f(rng) * rpm(7), o2 = rpm(6) + f(rng) * rpm(7);
    const double w1 = 5 + 7 * f(rng), w2 = 5 + 7 * f(rng);
    const double small = check_region2_gains(g, s, p, {std::min(o1, o2), std::max(o1, o2)},
                                             {std::min(w1, w2), std::max(w1, w2)})
                             .lipschitz;
    CHECK(small <= big);
  }
  CHECK_THROWS_AS(check_region2_gains(g, s, p, {1.0, 0.5}, {5, 6}), DomainError);
}

TEST_CASE("default Region-2 gains pass the check over the operating box") {
  const TurbineParams p;
  const auto g = lpv::default_region2_gains(p);
  const auto chk = check_region2_gains(g, testing_support::default_surfaces(), p, {rpm(8), rpm(12)},
                                       {4.0, 26.0});
  CHECK(chk.pass);
  CHECK(g.k_p > chk.min_k_p);
}

TEST_CASE("region 3 pitch law") {
  const auto s = scalar_schedule(0.02, 0.1);
  CHECK(region3_pitch(0.0, {0.0}, s, 12.0, 0.6).beta == 0.0);
  const auto cmd = region3_pitch(-1.0, {0.5}, s, 12.0, 0.6);
  CHECK(cmd.raw == doctest::Approx(-0.02 * -1.0 - 0.1 * 0.5));
  CHECK(cmd.raw == doctest::Approx(-0.03));
  CHECK(cmd.beta == 0.0);
  CHECK(cmd.saturated);
  CHECK(region3_pitch(-100.0, {0.0}, s, 12.0, 0.6).beta == 0.6);
  CHECK_THROWS_AS(region3_pitch(0.0, {0.0, 1.0}, s, 12.0, 0.6), ConfigError);
}

TEST_CASE("gain schedule interpolation") {
  Region3Schedule s;
  s.wind = {12, 14, 16};
  s.k_i = {-0.01, -0.02, -0.05};
  s.k_x = {{1, 2, 3, 4, 5}, {2, 4, 6, 8, 10}, {0, 0, 0, 0, 0}};
  for (std::size_t i = 0; i < s.wind.size(); ++i) {
    const auto g = s.at(s.wind[i]);
    CHECK(g.k_i == s.k_i[i]);
    CHECK(g.k_x == s.k_x[i]);
  }
  const auto mid = s.at(13.0);
  CHECK(mid.k_i == doctest::Approx(-0.015));
  CHECK(mid.k_x[4] == doctest::Approx(7.5));
  CHECK(s.at(5.0).k_i == s.k_i.front());
  CHECK(s.at(30.0).k_i == s.k_i.back());
  s.wind = {12, 12, 16};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("sigmoid weight") {
  const BlendConfig b;
  CHECK(sigmoid_weight(b.u_0, b) == 0.5);
  CHECK(sigmoid_weight(12.0, b) == doctest::Approx(1.0 / (1.0 + std::exp(-5.0 * 0.5))));
  CHECK(sigmoid_weight(12.0, b) == doctest::Approx(0.92414).epsilon(1e-5));
  for (double d : {0.01, 0.3, 1.0, 4.0}) {
    CHECK(sigmoid_weight(b.u_0 + d, b) + sigmoid_weight(b.u_0 - d, b) == doctest::Approx(1.0));
    CHECK(sigmoid_weight(b.u_0 + d, b) > sigmoid_weight(b.u_0 + 0.5 * d, b));
  }
  BlendConfig bad;
  bad.k_s = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("blended command limits and midpoint") {
  const TurbineParams p;
  ControllerConfig cfg;
  cfg.region2 = lpv::default_region2_gains(p);
  cfg.region3 = scalar_schedule(-0.03, 0.0);
  cfg.region3.feedback_states = {TurbineState::kOmegaR};
  cfg.region3_torque = Region3Torque::kZero;
  TurbineState x = TurbineState::at_speed(1.1, p);
  const double omega_c = 1.0;
  ControllerState cs;
  cs.int_e = 2.0;

  const auto raw_torque = region2_torque(0.1, cs.int_e, cfg.region2).torque;
  const auto raw_pitch = region3_pitch(cs.int_e, {0.1}, cfg.region3, 12.0, p.max_pitch).beta;
  REQUIRE(raw_pitch > 0.0);
  REQUIRE(raw_torque > 0.0);

  cs.wind_filtered = 3.0;
  auto c = blended_command(omega_c, x, {3.0, 0, 0}, cs, cfg, p, 0.0);
  CHECK(c.eta.beta == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c.eta.torque == doctest::Approx(raw_torque).epsilon(1e-12));

  cs.wind_filtered = 25.0;
  c = blended_command(omega_c, x, {25.0, 0, 0}, cs, cfg, p, 0.0);
  CHECK(c.eta.torque < 1e-12 * raw_torque);
  CHECK(c.eta.beta == doctest::Approx(raw_pitch).epsilon(1e-12));

  cs.wind_filtered = cfg.blend.u_0;
  c = blended_command(omega_c, x, {11.5, 0, 0}, cs, cfg, p, 0.0);
  CHECK(c.eta.beta == doctest::Approx(0.5 * raw_pitch));
  CHECK(c.eta.torque == doctest::Approx(0.5 * raw_torque));
}

TEST_CASE("blend is Lipschitz in the scheduling wind") {
  const TurbineParams p;
  ControllerConfig cfg;
  cfg.region2 = lpv::default_region2_gains(p);
  cfg.region3 = scalar_schedule(-0.03, 0.0);
  cfg.region3.feedback_states = {TurbineState::kOmegaR};
  cfg.region3_torque = Region3Torque::kZero;
  const TurbineState x = TurbineState::at_speed(1.1, p);
  ControllerState cs;
  cs.int_e = 2.0;
  const double beta = region3_pitch(cs.int_e, {0.1}, cfg.region3, 12.0, p.max_pitch).beta;
  const double torque = region2_torque(0.1, cs.int_e, cfg.region2).torque;
  const double bound = cfg.blend.k_s * (beta + torque) / 4.0;
  const double du = 1e-3;
  for (double u = 9.0; u < 14.0; u += 0.1) {
    cs.wind_filtered = u;
    const auto a = evaluate_controller(1.0, x, u, cs, cfg, p).eta;
    cs.wind_filtered = u + du;
    const auto b = evaluate_controller(1.0, x, u, cs, cfg, p).eta;
    const double change = std::abs(a.beta - b.beta) + std::abs(a.torque - b.torque);
    CHECK(change <= bound * du * (1 + 1e-6));
  }
}

TEST_CASE("anti-windup holds the integrator while the torque channel saturates") {
  const TurbineParams p;
  ControllerConfig cfg;
  cfg.region2 = lpv::default_region2_gains(p);
  cfg.region3 = scalar_schedule(-0.03, 0.0);
  cfg.region3.feedback_states = {TurbineState::kOmegaR};
  ControllerState cs;
  cs.wind_filtered = 6.0;
  cs.int_e = 100.0;  // far past T_max
  const TurbineState x = TurbineState::at_speed(1.2, p);
  const auto ev = evaluate_controller(1.0, x, 6.0, cs, cfg, p);
  CHECK(ev.torque_law.saturated);
  CHECK(ev.int_e_rate == 0.0);
  const auto unsat = evaluate_controller(1.3, x, 6.0, cs, cfg, p);
  CHECK(unsat.int_e_rate == doctest::Approx(1.2 - 1.3));
}

namespace {

farm::TurbineModel region2_model(std::shared_ptr<const plant::AeroSurfaces> s) {
  TurbineParams p;
  p.drivetrain = plant::DrivetrainMode::kStiff;
  farm::TurbineModel m;
  m.params = p;
  m.surfaces = std::move(s);
  m.controller.region2 = lpv::default_region2_gains(p);
  m.controller.region3 = scalar_schedule(0.0, 0.0);
  m.controller.region3.feedback_states = {TurbineState::kOmegaR};
  m.controller.blend.u_0 = 1000.0;  // pure Region 2
  return m;
}

}  // namespace

TEST_CASE("region 2 closed loop converges from random initial conditions") {
  const auto m = region2_model(testing_support::shared_default_surfaces());
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> wc(rpm(8), rpm(12)), dw(-0.1, 0.1), wind(7.0, 10.0),
      ie(0.5, 1.5);
  for (int trial = 0; trial < 12; ++trial) {
    const double omega_c = wc(rng);
    const double u = wind(rng);
    const double ta = plant::aero_torque(omega_c, 0.0, {u, 0, 0}, m.params, m.aero());
    const auto& g = m.controller.region2;
    const double ie_star = (1.0 - g.generator_efficiency) * ta / (g.equivalent_inertia * g.k_it);

    farm::ClosedLoopState x = farm::ClosedLoopState::initial(omega_c + dw(rng), u, m);
    x.ctrl.int_e = ie_star * ie(rng);
    double worst_tail = 0.0;
    for (int n = 0; n < 600; ++n) {
      x = farm::step_closed_loop(x, omega_c, {u, 0, 0}, 0.5, m);
      if (n >= 500) worst_tail = std::max(worst_tail, std::abs(x.plant.omega_r() - omega_c));
    }
    CHECK(worst_tail < 1e-3);
    CHECK(x.ctrl.int_e == doctest::Approx(ie_star).epsilon(1e-3));
  }
}

TEST_CASE("plant plus controller reproduces the closed-loop error dynamics") {
  const auto m = region2_model(std::make_shared<const plant::AeroSurfaces>(thrustless_surfaces()));
  const auto& g = m.controller.region2;
  const double omega_c = rpm(10);
  const double u = 8.0;
  const double j = g.equivalent_inertia;
  const double slack = 1.0 - g.generator_efficiency;

  // Oracle: d/dt [int e, e] = [e, T_a(omega_c + e)/J - (K_IT int e + K_p e)/(1 - nu)]
  auto rhs = [&](double ie, double e, double& die, double& de) {
    die = e;
    de = plant::aero_torque(omega_c + e, 0.0, {u, 0, 0}, m.params, m.aero()) / j -
         (g.k_it * ie + g.k_p * e) / slack;
  };
  double ie = 0.8, e = 0.05;
  farm::ClosedLoopState x = farm::ClosedLoopState::initial(omega_c + e, u, m);
  x.plant[TurbineState::kSurge] = 0.0;
  x.plant[TurbineState::kPitch] = 0.0;
  x.ctrl.int_e = ie;
  const double dt = 0.05;
  double worst = 0.0;
  for (int n = 0; n < 2000; ++n) {
    double a1, b1, a2, b2, a3, b3, a4, b4;
    rhs(ie, e, a1, b1);
    rhs(ie + 0.5 * dt * a1, e + 0.5 * dt * b1, a2, b2);
    rhs(ie + 0.5 * dt * a2, e + 0.5 * dt * b2, a3, b3);
    rhs(ie + dt * a3, e + dt * b3, a4, b4);
    ie += dt / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    e += dt / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
    x = farm::step_closed_loop(x, omega_c, {u, 0, 0}, dt, m);
    worst = std::max(worst, std::abs((x.plant.omega_r() - omega_c) - e));
  }
  CHECK(worst < 1e-9);
  CHECK(std::abs(e) < 1e-3);
}
