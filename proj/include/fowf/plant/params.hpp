#pragma once

#include <array>
#include <string>

#include <nlohmann/json.hpp>

namespace fowf::plant {

enum class DrivetrainMode { kStiff, kTwoMass };

/// Physical parameters of one floating turbine. Defaults follow the public
/// NREL 5 MW / OC4 semi-submersible definitions; platform inertias include
/// added mass. Platform arrays are indexed surge, sway, heave, roll, pitch, yaw.
struct TurbineParams {
  // Rotor and drivetrain.
  double rotor_inertia = 38'759'227.0;   // kg m^2 about the low-speed shaft
  double generator_inertia = 534.116;    // kg m^2 about the high-speed shaft
  double gear_ratio = 97.0;              // N_G
  double generator_efficiency = 0.944;   // nu_G
  double rotor_radius = 63.0;            // m
  double air_density = 1.225;            // kg/m^3
  double drivetrain_stiffness = 867'637'000.0;  // N m/rad
  double drivetrain_damping = 6'215'000.0;      // N m s/rad
  DrivetrainMode drivetrain = DrivetrainMode::kTwoMass;

  // Actuator limits and rated point.
  double max_generator_torque = 47'402.91;  // N m
  double rated_generator_torque = 43'093.55;  // N m
  double rated_rotor_speed = 1.26711;         // rad/s (12.1 rpm)
  double max_pitch = 1.0;                     // rad

  // Platform.
  double hub_height = 90.0;  // m above the platform reference point
  std::array<double, 6> inertia{2.06e7, 2.06e7, 2.8e7, 1.75e10, 1.75e10, 1.3e10};
  std::array<double, 6> damping{2.4e5, 2.4e5, 2.1e6, 6.56e8, 6.56e8, 2.0e8};
  std::array<double, 6> hydrostatic_stiffness{0.0, 0.0, 3.836e6, 9.0e8, 9.0e8, 0.0};
  std::array<double, 6> mooring_stiffness{7.08e4, 7.08e4, 1.9e4, 6.2e7, 6.2e7, 8.0e7};

  double equivalent_inertia() const {
    return rotor_inertia + gear_ratio * gear_ratio * generator_inertia;
  }
  double swept_area() const;
  double restoring(int dof) const {
    return hydrostatic_stiffness[dof] + mooring_stiffness[dof];
  }
  /// Undamped natural frequency of one platform DOF (rad/s).
  double natural_frequency(int dof) const;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

TurbineParams turbine_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TurbineParams& p);
TurbineParams load_turbine_params(const std::string& path);

}  // namespace fowf::plant
