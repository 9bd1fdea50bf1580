#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fowf/plant/aero.hpp"
#include "fowf/plant/params.hpp"
#include "fowf/plant/turbine.hpp"

namespace fowf::control {

/// Region-2 rotor-speed regulator gains. Construction enforces the
/// asymptotic-stability condition K_IT > 0, K_p > (1 - nu_G) L / J_eq.
struct Region2Gains {
  double k_it = 0.0;  // integral gain (1/s^2)
  double k_p = 0.0;   // proportional gain (1/s)
  double generator_efficiency = 0.944;
  double equivalent_inertia = 0.0;
  double gear_ratio = 97.0;
  double max_torque = 0.0;
  double lipschitz_bound = 0.0;  // L used for the construction-time check

  /// Smallest K_p allowed for the given L.
  static double min_proportional_gain(double lipschitz, const plant::TurbineParams& p);
  /// Throws ConfigError when the gain condition fails.
  static Region2Gains make(double k_it, double k_p, const plant::TurbineParams& p,
                           double lipschitz = 0.0);
  /// J_eq / ((1 - nu_G) N_G).
  double torque_scale() const;
};

struct TorqueCommand {
  double torque = 0.0;
  double raw = 0.0;
  bool saturated = false;
};

/// J_eq/((1 - nu_G) N_G) (K_IT int_e + K_p e), clamped to [0, T_max].
TorqueCommand region2_torque(double e, double int_e, const Region2Gains& g);

/// Pre-substitution form J_eq/N_G (K_IT int_e + K_p e) + P/(N_G omega_r);
/// unclamped. Throws SingularityError for omega_r <= 0.
double region2_torque_model_based(double e, double int_e, double omega_r, double power,
                                  const Region2Gains& g);

struct GainCheck {
  double lipschitz = 0.0;   // estimated max |dT_a/domega_r|
  double min_k_p = 0.0;     // (1 - nu_G) L / J_eq
  bool pass = false;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Estimates L by finite differences of T_a(omega_r, beta = 0) on a grid
/// anchored at zero (spacing `omega_step`), so a smaller box only drops
/// sample pairs. Wind samples use the same anchoring with `wind_step`.
GainCheck check_region2_gains(const Region2Gains& g, const plant::AeroSurfaces& surfaces,
                              const plant::TurbineParams& p, Interval omega_box,
                              Interval wind_box, double omega_step = 1e-3,
                              double wind_step = 0.25);

/// Entries of the Region-3 feedback vector. The rotor-speed entry is fed
/// back as the tracking error omega_r - omega_c.
std::vector<int> default_feedback_states();
std::string feedback_name(int state_index);

struct Region3Gains {
  double k_i = 0.0;
  std::vector<double> k_x;
};

/// Collective-pitch PI-LQR gains scheduled on wind speed.
struct Region3Schedule {
  std::vector<double> wind;   // strictly increasing breakpoints (m/s)
  std::vector<double> k_i;    // integral gain per breakpoint
  std::vector<std::vector<double>> k_x;  // feedback gain rows
  std::vector<int> feedback_states = default_feedback_states();

  void validate() const;
  /// Piecewise-linear in wind speed, clamped to the end breakpoints.
  Region3Gains at(double wind_speed) const;
};

struct PitchCommand {
  double beta = 0.0;
  double raw = 0.0;
  bool saturated = false;
};

/// -K_I(u) int_e - K_x(u) chi_fdbk, clamped to [0, beta_max].
PitchCommand region3_pitch(double int_e, const std::vector<double>& chi_fdbk,
                           const Region3Schedule& sched, double wind_speed, double beta_max);

struct BlendConfig {
  double k_s = 5.0;    // s/m
  double u_0 = 11.5;   // m/s
  void validate() const;
};

/// 1 / (1 + exp(-k_s (u - u_0))).
double sigmoid_weight(double u, const BlendConfig& b);

/// Generator torque applied on the pitch-controlled side of the blend.
/// kQuadratic follows T_rated (omega_r / omega_rated)^2 capped at T_max;
/// kZero reproduces a bare (1 - s) T_g torque channel.
enum class Region3Torque { kQuadratic, kZero };

struct ControllerConfig {
  Region2Gains region2;
  Region3Schedule region3;
  BlendConfig blend;
  Region3Torque region3_torque = Region3Torque::kQuadratic;
  double wind_filter_time_constant = 5.0;  // s
};

struct ControllerState {
  double int_e = 0.0;          // integral of omega_r - omega_c (rad)
  double wind_filtered = 0.0;  // low-passed hub-relative wind speed (m/s)
  double weight = 0.0;         // last sigmoid weight
};

/// Everything the blended controller computes from one state sample.
struct ControllerEval {
  plant::ControlInput eta;
  double weight = 0.0;
  TorqueCommand torque_law;
  PitchCommand pitch_law;
  double region3_torque = 0.0;
  double error = 0.0;
  double int_e_rate = 0.0;   // zero while the active channel is saturated
  double filter_rate = 0.0;
};

std::vector<double> feedback_vector(const plant::TurbineState& x, double omega_c,
                                    const std::vector<int>& states);

double region3_generator_torque(double omega_r, const ControllerConfig& cfg,
                                const plant::TurbineParams& p);

/// Evaluates both laws and the blend at (x, cs). `hub_wind_speed` is the
/// current hub-relative wind magnitude driving the low-pass filter.
ControllerEval evaluate_controller(double omega_c, const plant::TurbineState& x,
                                   double hub_wind_speed, const ControllerState& cs,
                                   const ControllerConfig& cfg, const plant::TurbineParams& p);

struct BlendedCommand {
  plant::ControlInput eta;
  ControllerState state;
};

/// Discrete controller update over `dt`: evaluates the blend at the current
/// sample, then advances int_e (with conditional integration) and the wind
/// filter by forward Euler.
BlendedCommand blended_command(double omega_c, const plant::TurbineState& x,
                               const plant::WindVector& inflow, const ControllerState& cs,
                               const ControllerConfig& cfg, const plant::TurbineParams& p,
                               double dt);

Region3Schedule load_schedule_csv(const std::string& path);
void save_schedule_csv(const Region3Schedule& s, const std::string& path);

BlendConfig blend_from_json(const nlohmann::json& j);

}  // namespace fowf::control
