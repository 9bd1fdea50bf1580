#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "fowf/farm/closed_loop.hpp"
#include "fowf/plant/aero.hpp"
#include "fowf/plant/params.hpp"

namespace testing_support {

// 2x2 table returning the same coefficients everywhere.
inline fowf::plant::AeroSurfaces constant_surfaces(double cp, double ct) {
  return fowf::plant::AeroSurfaces({0.0, 20.0}, {0.0, 0.6}, {cp, cp, cp, cp}, {ct, ct, ct, ct});
}

// Parameters with a chosen swept area, for hand-evaluated aero examples.
inline fowf::plant::TurbineParams params_with_area(double area) {
  fowf::plant::TurbineParams p;
  p.rotor_radius = std::sqrt(area / std::numbers::pi);
  return p;
}

inline const fowf::plant::AeroSurfaces& default_surfaces() {
  static const fowf::plant::AeroSurfaces s = fowf::plant::make_default_surfaces();
  return s;
}

inline std::shared_ptr<const fowf::plant::AeroSurfaces> shared_default_surfaces() {
  static const auto s =
      std::make_shared<const fowf::plant::AeroSurfaces>(fowf::plant::make_default_surfaces());
  return s;
}

inline double rpm(double v) { return v * std::numbers::pi / 30.0; }

}  // namespace testing_support
