#pragma once

#include <string>
#include <vector>

#include "fowf/plant/params.hpp"

namespace fowf::plant {

/// Three-component wind velocity in the turbine frame (m/s).
struct WindVector {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;

  double magnitude() const;
  WindVector scaled(double factor) const { return {u * factor, v * factor, w * factor}; }
};

struct AeroCoefficients {
  double cp = 0.0;
  double ct = 0.0;
  bool clamped = false;  // query fell outside the table or a value was limited
};

/// Power and thrust coefficient tables on a rectangular (lambda, beta) grid,
/// interpolated bilinearly with clamping at the boundary.
class AeroSurfaces {
 public:
  static constexpr double kBetzLimit = 16.0 / 27.0;
  static constexpr double kMaxThrustCoefficient = 1.0 - 1e-6;

  AeroSurfaces() = default;
  /// `cp` and `ct` are row-major with lambda as the slow index.
  AeroSurfaces(std::vector<double> lambda, std::vector<double> beta,
               std::vector<double> cp, std::vector<double> ct);

  AeroCoefficients lookup(double lambda, double beta) const;

  const std::vector<double>& lambda_axis() const { return lambda_; }
  const std::vector<double>& beta_axis() const { return beta_; }
  double cp_at(std::size_t i, std::size_t j) const { return cp_[i * beta_.size() + j]; }
  double ct_at(std::size_t i, std::size_t j) const { return ct_[i * beta_.size() + j]; }

 private:
  struct AxisHit {
    std::size_t index;
    double frac;
    bool clamped;
  };
  static AxisHit locate(const std::vector<double>& axis, double value, bool uniform,
                        double inv_step);

  std::vector<double> lambda_;
  std::vector<double> beta_;
  std::vector<double> cp_;
  std::vector<double> ct_;
  bool lambda_uniform_ = false;
  bool beta_uniform_ = false;
  double lambda_inv_step_ = 0.0;
  double beta_inv_step_ = 0.0;
};

/// Empirical C_p(lambda, beta) surrogate with a momentum-theory C_T derived
/// from it. `rotor_efficiency` is the ratio of C_p to ideal actuator-disc power.
AeroSurfaces make_default_surfaces(double rotor_efficiency = 0.85);

/// CSV with header `lambda,beta,cp,ct`; rows may come in any order but must
/// fill the full rectangular grid.
AeroSurfaces load_aero_csv(const std::string& path);
void save_aero_csv(const AeroSurfaces& s, const std::string& path);

double tip_speed_ratio(double omega_r, double wind_speed, const TurbineParams& p);

/// 0.5 rho A C_p |u|^3 (W).
double aero_power(double omega_r, double beta, const WindVector& wind,
                  const TurbineParams& p, const AeroSurfaces& s);

/// Aerodynamic power divided by rotor speed. Throws SingularityError when the
/// rotor is stopped while the surface reports nonzero power.
double aero_torque(double omega_r, double beta, const WindVector& wind,
                   const TurbineParams& p, const AeroSurfaces& s);

struct Thrust {
  double force = 0.0;  // N
  double ct = 0.0;
  bool clamped = false;
};

/// 0.5 rho A C_T |u|^2 (N) and the coefficient used.
Thrust aero_thrust(double omega_r, double beta, const WindVector& wind,
                   const TurbineParams& p, const AeroSurfaces& s);

}  // namespace fowf::plant
