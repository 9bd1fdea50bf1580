#include "fowf/farm/closed_loop.hpp"

#include <cmath>

#include "fowf/error.hpp"

namespace fowf::farm {

using plant::TurbineState;

double ClosedLoopState::get(int i) const {
  if (i < TurbineState::kSize) return plant[i];
  return i == kIntError ? ctrl.int_e : ctrl.wind_filtered;
}

void ClosedLoopState::set(int i, double v) {
  if (i < TurbineState::kSize) {
    plant[i] = v;
  } else if (i == kIntError) {
    ctrl.int_e = v;
  } else {
    ctrl.wind_filtered = v;
  }
}

ClosedLoopState ClosedLoopState::initial(double omega_r, double wind_speed, const TurbineModel& m) {
  ClosedLoopState s;
  s.plant = TurbineState::at_speed(omega_r, m.params);
  s.ctrl.wind_filtered = wind_speed;
  s.ctrl.weight = control::sigmoid_weight(wind_speed, m.controller.blend);
  // Platform offsets from the steady thrust at zero pitch.
  const auto th = plant::aero_thrust(omega_r, 0.0, {wind_speed, 0.0, 0.0}, m.params, m.aero());
  const double k_surge = m.params.restoring(TurbineState::kSurge);
  const double k_pitch = m.params.restoring(TurbineState::kPitch);
  if (k_surge > 0.0) s.plant[TurbineState::kSurge] = th.force / k_surge;
  if (k_pitch > 0.0) s.plant[TurbineState::kPitch] = th.force * m.params.hub_height / k_pitch;
  return s;
}

namespace {

ClosedLoopDerivative derivative_impl(const ClosedLoopState& x, double omega_c,
                                     const plant::WindVector& inflow, const TurbineModel& m,
                                     ClosedLoopOutputs* out) {
  const auto& p = m.params;
  const double hub = plant::hub_relative_wind(x.plant, inflow, p).magnitude();
  const auto ev = control::evaluate_controller(omega_c, x.plant, hub, x.ctrl, m.controller, p);
  const auto dp = plant::plant_derivative(x.plant, ev.eta, inflow, p, m.aero());
  ClosedLoopDerivative d{};
  for (int i = 0; i < TurbineState::kSize; ++i) d[static_cast<std::size_t>(i)] = dp[static_cast<std::size_t>(i)];
  d[ClosedLoopState::kIntError] = ev.int_e_rate;
  d[ClosedLoopState::kWindFiltered] = ev.filter_rate;
  if (out != nullptr) {
    const auto loads = plant::rotor_loads(x.plant, ev.eta.beta, inflow, p, m.aero());
    out->power = plant::generator_power(x.plant.omega_r(), ev.eta.torque, p);
    out->omega_r = x.plant.omega_r();
    out->ct = loads.ct;
    out->thrust = loads.thrust;
    out->beta = ev.eta.beta;
    out->torque = ev.eta.torque;
    out->weight = ev.weight;
    out->hub_wind = loads.wind_speed;
  }
  return d;
}

ClosedLoopState add_scaled(const ClosedLoopState& x, const ClosedLoopDerivative& d, double h) {
  ClosedLoopState y = x;
  for (int i = 0; i < ClosedLoopState::kSize; ++i) y.set(i, x.get(i) + h * d[static_cast<std::size_t>(i)]);
  return y;
}

}  // namespace

ClosedLoopDerivative closed_loop_derivative(const ClosedLoopState& x, double omega_c,
                                            const plant::WindVector& inflow,
                                            const TurbineModel& m, ClosedLoopOutputs* out) {
  return derivative_impl(x, omega_c, inflow, m, out);
}

ClosedLoopOutputs closed_loop_outputs(const ClosedLoopState& x, double omega_c,
                                      const plant::WindVector& inflow, const TurbineModel& m) {
  ClosedLoopOutputs out;
  derivative_impl(x, omega_c, inflow, m, &out);
  return out;
}

ClosedLoopState step_closed_loop(const ClosedLoopState& x, double omega_c,
                                 const plant::WindVector& inflow, double dt,
                                 const TurbineModel& m) {
  if (!(dt > 0.0)) throw DomainError("farm", "closed-loop step needs dt > 0");
  const auto k1 = derivative_impl(x, omega_c, inflow, m, nullptr);
  const auto k2 = derivative_impl(add_scaled(x, k1, 0.5 * dt), omega_c, inflow, m, nullptr);
  const auto k3 = derivative_impl(add_scaled(x, k2, 0.5 * dt), omega_c, inflow, m, nullptr);
  const auto k4 = derivative_impl(add_scaled(x, k3, dt), omega_c, inflow, m, nullptr);
  ClosedLoopState y = x;
  for (int i = 0; i < ClosedLoopState::kSize; ++i) {
    const auto j = static_cast<std::size_t>(i);
    y.set(i, x.get(i) + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
  }
  plant::enforce_constraints(y.plant, m.params);
  y.ctrl.weight = control::sigmoid_weight(y.ctrl.wind_filtered, m.controller.blend);
  plant::check_finite(y.plant, "closed-loop step");
  if (!std::isfinite(y.ctrl.int_e) || !std::isfinite(y.ctrl.wind_filtered)) {
    throw DivergenceError("farm", "controller state became non-finite");
  }
  return y;
}

}  // namespace fowf::farm
