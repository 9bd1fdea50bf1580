#include "fowf/plant/turbine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fowf/error.hpp"

namespace fowf::plant {

namespace {

using S = TurbineState;

constexpr int kRateOffset = S::kSurgeRate;  // rate of platform DOF i sits at i + 7

}  // namespace

TurbineState TurbineState::at_speed(double omega_r, const TurbineParams& p) {
  TurbineState s;
  s[kOmegaR] = omega_r;
  s[kOmegaG] = p.gear_ratio * omega_r;
  return s;
}

std::string_view dof_name(int index) {
  static constexpr std::string_view names[S::kSize] = {
      "surge",      "sway",      "heave",      "roll",      "pitch",
      "yaw",        "twist",     "surge_rate", "sway_rate", "heave_rate",
      "roll_rate",  "pitch_rate", "yaw_rate",  "omega_r",   "omega_g"};
  if (index < 0 || index >= S::kSize) return "unknown";
  return names[index];
}

double drivetrain_rhs(double /*omega_r*/, double aero_torque, double generator_torque,
                      const TurbineParams& p) {
  return (aero_torque - p.gear_ratio * generator_torque) / p.equivalent_inertia();
}

double generator_power(double omega_r, double generator_torque, const TurbineParams& p) {
  return p.generator_efficiency * p.gear_ratio * omega_r * generator_torque;
}

WindVector hub_relative_wind(const TurbineState& x, const WindVector& inflow,
                             const TurbineParams& p) {
  const double h = p.hub_height;
  return {inflow.u - (x[S::kSurgeRate] + h * x[S::kPitchRate]),
          inflow.v - (x[S::kSwayRate] - h * x[S::kRollRate]),
          inflow.w - x[S::kHeaveRate]};
}

RotorLoads rotor_loads(const TurbineState& x, double beta, const WindVector& inflow,
                       const TurbineParams& p, const AeroSurfaces& s) {
  RotorLoads out;
  const WindVector rel = hub_relative_wind(x, inflow, p);
  const double speed = rel.magnitude();
  out.wind_speed = speed;
  if (!(speed > 0.0)) return out;
  const double omega = std::max(x[S::kOmegaR], 0.0);
  const AeroCoefficients c = s.lookup(p.rotor_radius * omega / speed, beta);
  const double q = 0.5 * p.air_density * p.swept_area() * speed * speed;
  out.thrust = q * c.ct;
  out.ct = c.ct;
  // C_p / lambda stays finite as omega -> 0 for tables that start at cp = 0.
  out.torque = omega > 1e-6 ? q * speed * c.cp / omega : 0.0;
  return out;
}

StateDerivative plant_derivative(const TurbineState& x, const ControlInput& eta,
                                 const WindVector& inflow, const TurbineParams& p,
                                 const AeroSurfaces& s) {
  const RotorLoads loads = rotor_loads(x, eta.beta, inflow, p, s);
  StateDerivative d{};

  // Rigid platform: decoupled linear oscillators, aero thrust along the rotor
  // axis applied at hub height.
  std::array<double, 6> force{};
  const double cg = std::cos(eta.yaw);
  const double sg = std::sin(eta.yaw);
  force[S::kSurge] = loads.thrust * cg;
  force[S::kSway] = loads.thrust * sg;
  force[S::kPitch] = loads.thrust * cg * p.hub_height;
  force[S::kRoll] = -loads.thrust * sg * p.hub_height;
  for (int i = 0; i < 6; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double pos = x[i];
    const double vel = x[i + kRateOffset];
    d[k] = vel;
    d[k + kRateOffset] = (force[k] - p.damping[k] * vel - p.restoring(i) * pos) / p.inertia[k];
  }

  const double wr = x[S::kOmegaR];
  if (p.drivetrain == DrivetrainMode::kStiff) {
    const double acc = drivetrain_rhs(wr, loads.torque, eta.torque, p);
    d[S::kOmegaR] = acc;
    d[S::kOmegaG] = p.gear_ratio * acc;
    d[S::kTwist] = 0.0;
  } else {
    const double slip = wr - x[S::kOmegaG] / p.gear_ratio;
    const double shaft = p.drivetrain_stiffness * x[S::kTwist] + p.drivetrain_damping * slip;
    d[S::kTwist] = slip;
    d[S::kOmegaR] = (loads.torque - shaft) / p.rotor_inertia;
    d[S::kOmegaG] = (shaft / p.gear_ratio - eta.torque) / p.generator_inertia;
  }
  return d;
}

void enforce_constraints(TurbineState& x, const TurbineParams& p) {
  if (x[S::kOmegaR] < 0.0) x[S::kOmegaR] = 0.0;
  if (p.drivetrain == DrivetrainMode::kStiff) {
    x[S::kOmegaG] = p.gear_ratio * x[S::kOmegaR];
    x[S::kTwist] = 0.0;
  }
}

void check_finite(const TurbineState& x, std::string_view context) {
  for (int i = 0; i < S::kSize; ++i) {
    if (!std::isfinite(x[i])) {
      throw DivergenceError("plant", std::string(context) + ": integration diverged in DOF '" +
                                         std::string(dof_name(i)) + "'");
    }
  }
}

TurbineState step_turbine(const TurbineState& x, const ControlInput& eta,
                          const WindVector& inflow, double dt, const TurbineParams& p,
                          const AeroSurfaces& s) {
  if (!(dt > 0.0)) throw DomainError("plant", "step_turbine needs dt > 0");
  auto axpy = [](const TurbineState& base, const StateDerivative& k, double h) {
    TurbineState out = base;
    for (std::size_t i = 0; i < k.size(); ++i) out.x[i] += h * k[i];
    return out;
  };
  const StateDerivative k1 = plant_derivative(x, eta, inflow, p, s);
  const StateDerivative k2 = plant_derivative(axpy(x, k1, 0.5 * dt), eta, inflow, p, s);
  const StateDerivative k3 = plant_derivative(axpy(x, k2, 0.5 * dt), eta, inflow, p, s);
  const StateDerivative k4 = plant_derivative(axpy(x, k3, dt), eta, inflow, p, s);
  TurbineState next = x;
  for (std::size_t i = 0; i < next.x.size(); ++i) {
    next.x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  enforce_constraints(next, p);
  check_finite(next, "step_turbine");
  return next;
}

}  // namespace fowf::plant
