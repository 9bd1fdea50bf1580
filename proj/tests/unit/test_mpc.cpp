#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "doctest.h"
#include "fowf/error.hpp"
#include "fowf/farm/farm.hpp"
#include "fowf/lpv/design.hpp"
#include "fowf/lpv/lpv.hpp"
#include "fowf/mpc/mpc.hpp"
#include "fowf/mpc/optimizer.hpp"
#include "helpers.hpp"

using namespace fowf;
using namespace fowf::mpc;

namespace {

const farm::TurbineModel& stiff_model() {
  static const farm::TurbineModel m = [] {
    auto t = lpv::build_turbine_model(plant::TurbineParams{}, testing_support::shared_default_surfaces());
    t.params.drivetrain = plant::DrivetrainMode::kStiff;
    return t;
  }();
  return m;
}

const lpv::LpvGrid& grid() {
  static const lpv::LpvGrid g =
      lpv::build_lpv_grid(stiff_model(), lpv::default_omega_nodes(), lpv::default_wind_nodes());
  return g;
}

FarmSnapshot snapshot(const farm::Layout& layout, const std::vector<plant::WindVector>& fw, double rpm) {
  farm::FarmModel f(stiff_model(), wake::WakeConfig{}, layout);
  std::vector<double> oc(static_cast<std::size_t>(layout.turbines()), rpm_to_rad(rpm));
  f.initialize(fw, oc);
  FarmSnapshot s;
  s.turbines = f.states();
  s.wakes = f.wakes();
  s.freestream = fw;
  const auto smp = f.sample(fw, oc);
  for (const auto& t : smp.turbines) {
    s.inflow.push_back(t.inflow);
    s.ct.push_back(t.out.ct);
    s.power.push_back(t.out.power);
  }
  s.omega_c = oc;
  return s;
}

MpcConfig toy_config() {
  MpcConfig c;
  c.horizons = 2;
  return c;
}

}  // namespace

TEST_CASE("horizon cost hand value") {
  MpcConfig cfg;
  cfg.horizons = 3;
  cfg.horizon = 10.0;
  cfg.q_e = 2.0;
  cfg.q_omega = 0.5;
  auto plan = CommandPlan::constant(2, 2, 10.0);
  Prediction p;
  p.farm_power.assign(20, 27.0);
  p.omega_start = {{10.0, 11.0}, {9.0, 10.0}};
  // 2 * 3^2 * 20 s + 0.5 * (0 + 1 + 1 + 0)
  CHECK(horizon_cost(p, plan, 30.0, cfg) == doctest::Approx(361.0).epsilon(1e-14));
  p.farm_power.pop_back();
  CHECK_THROWS_AS(horizon_cost(p, plan, 30.0, cfg), ConfigError);
}

TEST_CASE("constant error cost is Q_e eps^2 times the horizon span") {
  MpcConfig cfg;
  const auto plan = CommandPlan::constant(1, cfg.intervals(), 10.0);
  Prediction p;
  p.farm_power.assign(static_cast<std::size_t>(cfg.steps_per_interval() * cfg.intervals()), 29.5);
  p.omega_start.assign(static_cast<std::size_t>(cfg.intervals()), {10.0});
  CHECK(horizon_cost(p, plan, 30.0, cfg) == doctest::Approx(0.25 * cfg.horizon * cfg.intervals()));
}

TEST_CASE("plan shift and config validation") {
  CommandPlan p = CommandPlan::constant(2, 3, 9.0);
  p.at(0, 0) = 8.0;
  p.at(0, 1) = 10.0;
  p.at(1, 2) = 11.0;
  const auto s = p.shifted();
  CHECK(s.at(0, 0) == 10.0);
  CHECK(s.at(0, 2) == 9.0);
  CHECK(s.at(1, 1) == 11.0);
  CHECK(s.at(1, 2) == 11.0);

  MpcConfig c;
  c.horizons = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = MpcConfig{};
  c.horizon = 10.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(predictor_from_string(to_string(PredictorKind::kLpvDelay)) == PredictorKind::kLpvDelay);
  CHECK_THROWS_AS(predictor_from_string("pid"), ConfigError);
}

TEST_CASE("box optimizer on a quadratic with an active bound") {
  const CostFunction f = [](const std::vector<double>& x) {
    return (x[0] - 2.0) * (x[0] - 2.0) + 3.0 * (x[1] + 0.5) * (x[1] + 0.5) + x[0] * x[1];
  };
  OptimizerOptions opt;
  opt.max_iterations = 100;
  const auto r = minimize_box(f, {0.5, 0.5}, {0.0, 0.0}, {1.5, 1.0}, opt);
  // x1 sits on its lower bound; then x0 minimizes (x0 - 2)^2 on [0, 1.5]
  CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(0.0).epsilon(1e-6));
  for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k] <= r.history[k - 1]);
  CHECK(r.cost <= r.initial_cost);
}

TEST_CASE("optimizer gradient is independent of worker count") {
  const CostFunction f = [](const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::sin(x[i] * static_cast<double>(i + 1));
    return s;
  };
  const std::vector<double> x{0.1, 0.4, 0.9, 1.2, 0.3}, lo(5, 0.0), hi(5, 1.0);
  const auto g1 = fd_gradient(f, x, lo, hi, 1e-4, 1);
  const auto g3 = fd_gradient(f, x, lo, hi, 1e-4, 3);
  CHECK(g1 == g3);
  CHECK(g1[0] == doctest::Approx(std::cos(0.1)).epsilon(1e-6));
  CHECK_THROWS_AS(minimize_box([](const std::vector<double>&) { return std::nan(""); }, {0.5}, {0.0}, {1.0}),
                  SolverError);
}

TEST_CASE("nonlinear predictor holds a trimmed turbine") {
  const farm::Layout one{1, 1, 882.0};
  const auto s = snapshot(one, {{13.5, 0.0, 0.0}}, 11.0);
  NonlinearPredictor nl(stiff_model(), one);
  MpcConfig cfg;
  const auto p = nl.predict(s, CommandPlan::constant(1, cfg.intervals(), 11.0), cfg, true);
  REQUIRE(p.farm_power.size() == static_cast<std::size_t>(cfg.intervals() * cfg.steps_per_interval()));
  for (double v : p.farm_power) CHECK(v == doctest::Approx(s.power[0] * 1e-6).epsilon(1e-4));
  for (const auto& w : p.omega_start) CHECK(w[0] == doctest::Approx(11.0).epsilon(1e-4));
}

TEST_CASE("nonlinear predictor matches the standalone closed loop for one turbine") {
  const farm::Layout one{1, 1, 882.0};
  const auto s = snapshot(one, {{13.5, 0.0, 0.0}}, 11.0);
  NonlinearPredictor nl(stiff_model(), one);
  MpcConfig cfg;
  auto plan = CommandPlan::constant(1, cfg.intervals(), 11.0);
  plan.at(0, 0) = 9.0;
  plan.at(0, 2) = 12.0;
  const auto p = nl.predict(s, plan, cfg, true);

  farm::ClosedLoopState x = s.turbines[0];
  const plant::WindVector wind{s.inflow[0], 0.0, 0.0};
  const int steps = cfg.steps_per_interval();
  for (int q = 0; q < cfg.intervals(); ++q) {
    CHECK(p.omega_start[static_cast<std::size_t>(q)][0] == doctest::Approx(rad_to_rpm(x.plant.omega_r())));
    for (int k = 0; k < steps; ++k) {
      const double oc = rpm_to_rad(plan.at(0, q));
      const auto y = farm::closed_loop_outputs(x, oc, wind, stiff_model());
      CHECK(p.farm_power[static_cast<std::size_t>(q * steps + k)] == doctest::Approx(y.power * 1e-6).epsilon(1e-9));
      x = farm::step_closed_loop(x, oc, wind, cfg.predictor_dt, stiff_model());
    }
  }
}

TEST_CASE("lpv predictor reproduces the measured power at the snapshot") {
  const farm::Layout lay;
  const std::vector<plant::WindVector> fw{{14.5, 0.0, 0.0}, {13.5, 0.0, 0.0}};
  const auto s = snapshot(lay, fw, 11.0);
  LpvDelayPredictor lp(grid(), lay, wake::WakeConfig{}, stiff_model().params, 1.0);
  lp.prepare(s);
  MpcConfig cfg;
  const auto p = lp.predict(s, CommandPlan::constant(8, cfg.intervals(), 11.0), cfg, true);
  for (int i = 0; i < 8; ++i) CHECK(p.turbine_power[0][i] == doctest::Approx(s.power[i] * 1e-6).epsilon(1e-9));
  // the snapshot is a fixed point of the corrected model under constant commands
  for (int i = 0; i < 8; ++i) CHECK(p.turbine_power.back()[i] == doctest::Approx(s.power[i] * 1e-6).epsilon(0.05));
}

TEST_CASE("lpv and nonlinear predictions agree within 10 percent of farm power") {
  const farm::Layout lay;
  const std::vector<plant::WindVector> fw{{14.5, 0.0, 0.0}, {13.5, 0.0, 0.0}};
  const auto s = snapshot(lay, fw, 11.0);
  NonlinearPredictor nl(stiff_model(), lay);
  LpvDelayPredictor lp(grid(), lay, wake::WakeConfig{}, stiff_model().params, 1.0);
  lp.prepare(s);
  MpcConfig cfg;
  auto plan = CommandPlan::constant(8, cfg.intervals(), 11.0);
  for (int i = 0; i < 8; ++i)
    for (int q = 0; q < cfg.intervals(); ++q) plan.at(i, q) = 10.0 + 0.25 * q;
  const auto a = nl.predict(s, plan, cfg, false);
  const auto b = lp.predict(s, plan, cfg, false);
  double err = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < a.farm_power.size(); ++k) {
    err += std::abs(a.farm_power[k] - b.farm_power[k]);
    mean += a.farm_power[k];
  }
  CHECK(err / mean < 0.10);
}

TEST_CASE("lpv delay lines need a dt match") {
  const farm::Layout lay;
  LpvDelayPredictor lp(grid(), lay, wake::WakeConfig{}, stiff_model().params, 1.0);
  const auto s = snapshot(lay, {{13.5, 0.0, 0.0}, {13.5, 0.0, 0.0}}, 11.0);
  MpcConfig cfg;
  cfg.predictor_dt = 0.5;
  CHECK_THROWS_AS(lp.predict(s, CommandPlan::constant(8, cfg.intervals(), 11.0), cfg, false), ConfigError);
}

TEST_CASE("single turbine single horizon matches a 0.001 rpm scan") {
  const farm::Layout one{1, 1, 882.0};
  const auto s = snapshot(one, {{13.5, 0.0, 0.0}}, 11.0);
  NonlinearPredictor nl(stiff_model(), one);
  const MpcConfig cfg = toy_config();
  const double sp = 3.0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 4000; ++k) {
    const double w = 8.0 + 0.001 * k;
    best = std::min(best, evaluate_plan(nl, s, CommandPlan::constant(1, 1, w), sp, cfg));
  }
  const auto plan = solve_mpc(nl, s, sp, cfg, CommandPlan::constant(1, 1, 11.0));
  CHECK(plan.cost <= best + 1e-3);
}

TEST_CASE("two turbine first horizon matches a coarse grid") {
  const farm::Layout two{2, 1, 882.0};
  const auto s = snapshot(two, {{13.5, 0.0, 0.0}}, 11.0);
  NonlinearPredictor nl(stiff_model(), two);
  const MpcConfig cfg = toy_config();
  const double sp = 6.0, h = 0.25;
  double best = std::numeric_limits<double>::infinity();
  double w0 = 0.0, w1 = 0.0;
  for (int a = 0; a <= 16; ++a)
    for (int b = 0; b <= 16; ++b) {
      CommandPlan p = CommandPlan::constant(2, 1, 8.0);
      p.at(0, 0) = 8.0 + h * a;
      p.at(1, 0) = 8.0 + h * b;
      const double c = evaluate_plan(nl, s, p, sp, cfg);
      if (c < best) {
        best = c;
        w0 = p.at(0, 0);
        w1 = p.at(1, 0);
      }
    }
  const auto plan = solve_mpc(nl, s, sp, cfg, CommandPlan::constant(2, 1, 11.0));
  CHECK(plan.cost <= best);
  CHECK(std::abs(plan.at(0, 0) - w0) <= h);
  CHECK(std::abs(plan.at(1, 0) - w1) <= h);
}

TEST_CASE("unreachable setpoint saturates at the upper bound") {
  const farm::Layout one{1, 1, 882.0};
  const auto s = snapshot(one, {{13.5, 0.0, 0.0}}, 10.0);
  NonlinearPredictor nl(stiff_model(), one);
  const MpcConfig cfg = toy_config();
  const auto plan = solve_mpc(nl, s, 20.0, cfg, CommandPlan::constant(1, 1, 10.0));
  CHECK(plan.at(0, 0) == doctest::Approx(cfg.omega_max_rpm));
}

TEST_CASE("with no tracking weight the commands stay at the current speed") {
  const farm::Layout one{1, 1, 882.0};
  const auto s = snapshot(one, {{13.5, 0.0, 0.0}}, 10.0);
  NonlinearPredictor nl(stiff_model(), one);
  MpcConfig cfg = toy_config();
  cfg.q_e = 0.0;
  cfg.optimizer.max_iterations = 100;
  const auto plan = solve_mpc(nl, s, 30.0, cfg, CommandPlan::constant(1, 1, 11.5));
  CHECK(plan.at(0, 0) == doctest::Approx(rad_to_rpm(s.turbines[0].plant.omega_r())).epsilon(1e-3));
}

TEST_CASE("solutions are feasible and never worse than the warm start") {
  const farm::Layout lay;
  const auto s = snapshot(lay, {{14.0, 0.0, 0.0}, {13.5, 0.0, 0.0}}, 11.0);
  LpvDelayPredictor lp(grid(), lay, wake::WakeConfig{}, stiff_model().params, 1.0);
  lp.prepare(s);
  MpcConfig cfg;
  cfg.optimizer.max_iterations = 5;
  const auto warm = CommandPlan::constant(8, cfg.intervals(), 11.0);
  const auto plan = solve_mpc(lp, s, 27.0, cfg, warm);
  for (double w : plan.omega) {
    CHECK(w >= cfg.omega_min_rpm);
    CHECK(w <= cfg.omega_max_rpm);
  }
  CHECK(plan.cost <= plan.warm_cost);
  CHECK(plan.warm_cost == doctest::Approx(evaluate_plan(lp, s, warm, 27.0, cfg)));
}

TEST_CASE("receding horizon controller is deterministic") {
  const farm::Layout lay;
  const auto s = snapshot(lay, {{14.0, 0.0, 0.0}, {13.5, 0.0, 0.0}}, 11.0);
  MpcConfig cfg;
  cfg.optimizer.max_iterations = 3;
  cfg.optimizer.workers = 2;
  std::vector<std::vector<double>> cmds;
  for (int run = 0; run < 2; ++run) {
    RecedingHorizonController c(
        std::make_unique<LpvDelayPredictor>(grid(), lay, wake::WakeConfig{}, stiff_model().params, 1.0), cfg, 8);
    c.update(s, 29.0);
    cmds.push_back(c.update(s, 31.0));
    CHECK(c.telemetry().size() == 2);
  }
  CHECK(cmds[0] == cmds[1]);
}
