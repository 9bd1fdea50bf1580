#pragma once

#include <array>
#include <memory>

#include "fowf/control/controller.hpp"
#include "fowf/plant/aero.hpp"
#include "fowf/plant/params.hpp"
#include "fowf/plant/turbine.hpp"

namespace fowf::farm {

/// Plant, aero tables and controller settings of one turbine type.
struct TurbineModel {
  plant::TurbineParams params;
  std::shared_ptr<const plant::AeroSurfaces> surfaces;
  control::ControllerConfig controller;

  const plant::AeroSurfaces& aero() const { return *surfaces; }
};

/// Turbine plus its controller states, integrated together.
struct ClosedLoopState {
  static constexpr int kIntError = plant::TurbineState::kSize;
  static constexpr int kWindFiltered = kIntError + 1;
  static constexpr int kSize = kWindFiltered + 1;

  plant::TurbineState plant;
  control::ControllerState ctrl;

  double get(int i) const;
  void set(int i, double v);

  /// Steady operating guess at rotor speed omega_r and wind speed u.
  static ClosedLoopState initial(double omega_r, double wind_speed, const TurbineModel& m);
};

using ClosedLoopDerivative = std::array<double, ClosedLoopState::kSize>;

struct ClosedLoopOutputs {
  double power = 0.0;      // generator power (W)
  double omega_r = 0.0;    // rad/s
  double ct = 0.0;         // thrust coefficient at the rotor
  double beta = 0.0;       // applied pitch (rad)
  double torque = 0.0;     // applied generator torque (N m)
  double weight = 0.0;     // blend weight
  double hub_wind = 0.0;   // hub-relative wind speed (m/s)
  double thrust = 0.0;     // N
};

ClosedLoopDerivative closed_loop_derivative(const ClosedLoopState& x, double omega_c,
                                            const plant::WindVector& inflow,
                                            const TurbineModel& m,
                                            ClosedLoopOutputs* out = nullptr);

/// Outputs at the current sample without advancing anything.
ClosedLoopOutputs closed_loop_outputs(const ClosedLoopState& x, double omega_c,
                                      const plant::WindVector& inflow, const TurbineModel& m);

/// RK4 over dt with omega_c and inflow held.
ClosedLoopState step_closed_loop(const ClosedLoopState& x, double omega_c,
                                 const plant::WindVector& inflow, double dt,
                                 const TurbineModel& m);

}  // namespace fowf::farm
