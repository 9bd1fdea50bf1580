#pragma once

#include <array>
#include <string_view>

#include "fowf/plant/aero.hpp"
#include "fowf/plant/params.hpp"

namespace fowf::plant {

/// Floating-turbine state: platform translations and rotations, drivetrain
/// twist, their rates, rotor speed and generator speed.
struct TurbineState {
  enum Index : int {
    kSurge = 0,
    kSway,
    kHeave,
    kRoll,
    kPitch,
    kYaw,
    kTwist,  // rotor azimuth minus generator azimuth / N_G
    kSurgeRate,
    kSwayRate,
    kHeaveRate,
    kRollRate,
    kPitchRate,
    kYawRate,
    kOmegaR,
    kOmegaG,
  };
  static constexpr int kSize = 15;

  std::array<double, kSize> x{};

  double& operator[](int i) { return x[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return x[static_cast<std::size_t>(i)]; }

  double omega_r() const { return x[kOmegaR]; }
  double omega_g() const { return x[kOmegaG]; }

  /// Turbine at rest with the generator locked to the rotor.
  static TurbineState at_speed(double omega_r, const TurbineParams& p);
};

std::string_view dof_name(int index);

/// Actuator commands applied to the plant.
struct ControlInput {
  double beta = 0.0;    // collective pitch (rad)
  double torque = 0.0;  // generator torque (N m)
  double yaw = 0.0;     // nacelle yaw (rad), held fixed
};

using StateDerivative = std::array<double, TurbineState::kSize>;

/// (T_a - N_G T_g) / J_eq.
double drivetrain_rhs(double omega_r, double aero_torque, double generator_torque,
                      const TurbineParams& p);

/// nu_G N_G omega_r T_g (W).
double generator_power(double omega_r, double generator_torque, const TurbineParams& p);

/// Inflow seen by the rotor once the hub velocity from platform motion is removed.
WindVector hub_relative_wind(const TurbineState& x, const WindVector& inflow,
                             const TurbineParams& p);

/// Aerodynamic loads at the current state, shared by the plant and the
/// controller so both see the same hub-relative inflow.
struct RotorLoads {
  double torque = 0.0;  // N m on the low-speed shaft
  double thrust = 0.0;  // N along the rotor axis
  double ct = 0.0;
  double wind_speed = 0.0;  // |hub-relative wind|
};

RotorLoads rotor_loads(const TurbineState& x, double beta, const WindVector& inflow,
                       const TurbineParams& p, const AeroSurfaces& s);

/// Continuous-time plant dynamics for fixed actuator inputs.
StateDerivative plant_derivative(const TurbineState& x, const ControlInput& eta,
                                 const WindVector& inflow, const TurbineParams& p,
                                 const AeroSurfaces& s);

/// Puts the state back on the admissible set: omega_r >= 0 and, for the
/// stiff drivetrain, omega_g = N_G omega_r with zero twist.
void enforce_constraints(TurbineState& x, const TurbineParams& p);

/// Throws DivergenceError naming the first non-finite DOF.
void check_finite(const TurbineState& x, std::string_view context);

/// One classical RK4 step of the plant with zero-order-hold inputs. Stable
/// for dt up to about 0.1 s in two-mass mode (drivetrain torsion near
/// 14 rad/s) and about 1 s in stiff mode.
TurbineState step_turbine(const TurbineState& x, const ControlInput& eta,
                          const WindVector& inflow, double dt, const TurbineParams& p,
                          const AeroSurfaces& s);

}  // namespace fowf::plant
