#include "fowf/plant/params.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "fowf/error.hpp"

namespace fowf::plant {

namespace {

constexpr const char* kDofNames[6] = {"surge", "sway", "heave", "roll", "pitch", "yaw"};

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError("plant", std::string(name) + " must be positive and finite");
  }
}

std::array<double, 6> dof_array(const nlohmann::json& j, const char* key,
                                const std::array<double, 6>& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& node = j.at(key);
  std::array<double, 6> out = fallback;
  if (node.is_array()) {
    if (node.size() != 6) throw ConfigError("plant", std::string(key) + " needs 6 entries");
    for (std::size_t i = 0; i < 6; ++i) out[i] = node[i].get<double>();
  } else {
    for (std::size_t i = 0; i < 6; ++i) {
      if (node.contains(kDofNames[i])) out[i] = node.at(kDofNames[i]).get<double>();
    }
  }
  return out;
}

nlohmann::json dof_object(const std::array<double, 6>& a) {
  nlohmann::json j;
  for (std::size_t i = 0; i < 6; ++i) j[kDofNames[i]] = a[i];
  return j;
}

}  // namespace

double TurbineParams::swept_area() const {
  return std::numbers::pi * rotor_radius * rotor_radius;
}

double TurbineParams::natural_frequency(int dof) const {
  return std::sqrt(restoring(dof) / inertia[static_cast<std::size_t>(dof)]);
}

void TurbineParams::validate() const {
  require_positive(rotor_inertia, "rotor_inertia");
  require_positive(generator_inertia, "generator_inertia");
  require_positive(gear_ratio, "gear_ratio");
  require_positive(rotor_radius, "rotor_radius");
  require_positive(air_density, "air_density");
  require_positive(drivetrain_stiffness, "drivetrain_stiffness");
  require_positive(drivetrain_damping, "drivetrain_damping");
  require_positive(max_generator_torque, "max_generator_torque");
  require_positive(rated_generator_torque, "rated_generator_torque");
  require_positive(rated_rotor_speed, "rated_rotor_speed");
  require_positive(max_pitch, "max_pitch");
  require_positive(hub_height, "hub_height");
  if (!(generator_efficiency > 0.0 && generator_efficiency < 1.0)) {
    throw ConfigError("plant", "generator_efficiency must lie in (0, 1)");
  }
  for (int i = 0; i < 6; ++i) {
    const std::string dof = kDofNames[i];
    require_positive(inertia[i], ("inertia." + dof).c_str());
    require_positive(damping[i], ("damping." + dof).c_str());
    require_positive(restoring(i), ("restoring stiffness." + dof).c_str());
    if (hydrostatic_stiffness[i] < 0.0 || mooring_stiffness[i] < 0.0) {
      throw ConfigError("plant", "stiffness." + dof + " must be >= 0");
    }
  }
}

TurbineParams turbine_params_from_json(const nlohmann::json& j) {
  TurbineParams p;
  auto read = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = j.at(key).get<double>();
  };
  read("rotor_inertia", p.rotor_inertia);
  read("generator_inertia", p.generator_inertia);
  read("gear_ratio", p.gear_ratio);
  read("generator_efficiency", p.generator_efficiency);
  read("rotor_radius", p.rotor_radius);
  read("air_density", p.air_density);
  read("drivetrain_stiffness", p.drivetrain_stiffness);
  read("drivetrain_damping", p.drivetrain_damping);
  read("max_generator_torque", p.max_generator_torque);
  read("rated_generator_torque", p.rated_generator_torque);
  read("rated_rotor_speed", p.rated_rotor_speed);
  read("max_pitch", p.max_pitch);
  read("hub_height", p.hub_height);
  if (j.contains("drivetrain")) {
    const auto mode = j.at("drivetrain").get<std::string>();
    if (mode == "stiff") {
      p.drivetrain = DrivetrainMode::kStiff;
    } else if (mode == "two_mass") {
      p.drivetrain = DrivetrainMode::kTwoMass;
    } else {
      throw ConfigError("plant", "drivetrain must be 'stiff' or 'two_mass', got '" + mode + "'");
    }
  }
  if (j.contains("platform")) {
    const auto& pl = j.at("platform");
    p.inertia = dof_array(pl, "inertia", p.inertia);
    p.damping = dof_array(pl, "damping", p.damping);
    p.hydrostatic_stiffness = dof_array(pl, "hydrostatic_stiffness", p.hydrostatic_stiffness);
    p.mooring_stiffness = dof_array(pl, "mooring_stiffness", p.mooring_stiffness);
  }
  p.validate();
  return p;
}

nlohmann::json to_json(const TurbineParams& p) {
  nlohmann::json j;
  j["rotor_inertia"] = p.rotor_inertia;
  j["generator_inertia"] = p.generator_inertia;
  j["gear_ratio"] = p.gear_ratio;
  j["generator_efficiency"] = p.generator_efficiency;
  j["rotor_radius"] = p.rotor_radius;
  j["air_density"] = p.air_density;
  j["drivetrain_stiffness"] = p.drivetrain_stiffness;
  j["drivetrain_damping"] = p.drivetrain_damping;
  j["drivetrain"] = p.drivetrain == DrivetrainMode::kStiff ? "stiff" : "two_mass";
  j["max_generator_torque"] = p.max_generator_torque;
  j["rated_generator_torque"] = p.rated_generator_torque;
  j["rated_rotor_speed"] = p.rated_rotor_speed;
  j["max_pitch"] = p.max_pitch;
  j["hub_height"] = p.hub_height;
  j["platform"] = {{"inertia", dof_object(p.inertia)},
                   {"damping", dof_object(p.damping)},
                   {"hydrostatic_stiffness", dof_object(p.hydrostatic_stiffness)},
                   {"mooring_stiffness", dof_object(p.mooring_stiffness)}};
  return j;
}

TurbineParams load_turbine_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("plant", "cannot open parameter file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("plant", "parse error in '" + path + "': " + e.what());
  }
  return turbine_params_from_json(j);
}

}  // namespace fowf::plant
