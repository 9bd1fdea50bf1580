#pragma once

#include <string>
#include <vector>

namespace fowf::wake {

/// u (1 - sqrt(1 - C_T)). Throws DomainError unless 0 <= C_T < 1.
double initial_deficit(double u_inf, double ct);

/// 1 + k_w ln(1 + exp(kappa / (R sqrt 2))), overflow-safe.
double wake_diameter(double kappa, double k_w, double rotor_radius);

/// d(wake_diameter)/d(kappa).
double wake_diameter_slope(double kappa, double k_w, double rotor_radius);

/// delta_u0 / d_w^2 (1 + erf(kappa / (R sqrt 2))).
double pair_deficit(double delta_u0, double kappa, double k_w, double rotor_radius);

struct UpstreamTerm {
  double delta_u0 = 0.0;  // m/s
  double kappa = 0.0;     // m
  double k_w = 0.0;
};

/// Sum of pair_deficit over the upstream set.
double aggregate_deficit(const std::vector<UpstreamTerm>& upstream, double rotor_radius);

// ---------------------------------------------------------------------------
// Advection-diffusion deficit transport, one column at a time.

struct WakeConfig {
  double dx = 31.5;             // m
  double gaussian_width = 31.5; // m, standard deviation of G
  double k_w = 0.11;
  double rotor_radius = 63.0;   // m
  bool expansion_decay = true;  // w includes u_inf * 2 d_w'/d_w
  double extra_decay = 0.0;     // 1/s, added uniformly to w
  double super_gaussian_order = 8.0;
  double upstream_margin = 126.0;    // m of grid ahead of the front station
  double downstream_margin = 630.0;  // m of grid behind the last station

  void validate() const;
};

struct TurbineForcing {
  double inflow_speed = 0.0;  // u_inf,n: advection speed and reference for delta_u0
  double ct = 0.0;
  double direction_x = 1.0;   // streamwise component of the unit inflow direction
};

struct WakeStepInfo {
  bool ct_clamped = false;
  double courant = 0.0;
};

/// One column of turbines sharing a streamwise axis.
class WakeColumn {
 public:
  WakeColumn(std::vector<double> stations, const WakeConfig& cfg);

  std::size_t turbines() const { return stations_.size(); }
  std::size_t cells() const { return x_.size(); }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& stations() const { return stations_; }
  std::size_t station_cell(std::size_t n) const { return station_cell_[n]; }
  const WakeConfig& config() const { return cfg_; }

  std::vector<double>& deficit(std::size_t n) { return deficit_[n]; }
  const std::vector<double>& deficit(std::size_t n) const { return deficit_[n]; }
  const std::vector<double>& gaussian(std::size_t n) const { return gauss_[n]; }
  const std::vector<double>& shape(std::size_t n) const { return shape_[n]; }

  /// Decay rate w_n at cell k for advection speed u (1/s).
  double decay(std::size_t n, std::size_t k, double u) const;

  /// Source strength S_n = u delta_u0. G is a half Gaussian behind the
  /// station with unit integral, so without decay the steady deficit grows
  /// from delta_u0 at the station to 2 delta_u0.
  static double source_strength(double u, double delta_u0);

  /// Upwind advection, exact exponential decay, then the Gaussian source;
  /// station cells are set to delta_u0 and deficits floored at zero. C_T >= 1
  /// is clamped to 1 - 1e-6 and reported. Throws DomainError when u dt / dx > 1.
  WakeStepInfo step(const std::vector<TurbineForcing>& forcing, double dt);

  /// Steady state for constant forcing (what the step converges to).
  void set_steady(const std::vector<TurbineForcing>& forcing);

  /// U_inf,p minus the upstream wakes at x_query, floored at zero.
  /// `directions` holds the streamwise direction component per turbine (empty means 1).
  double velocity(double u_front, double x_query, const std::vector<double>& directions = {},
                  bool* floored = nullptr) const;

  /// Effective streamwise inflow at each station.
  std::vector<double> station_velocities(double u_front, const std::vector<double>& directions = {}) const;

  void write_csv(const std::string& path) const;

 private:
  double sample(const std::vector<double>& field, double xq) const;

  WakeConfig cfg_;
  std::vector<double> stations_;
  std::vector<std::size_t> station_cell_;
  std::vector<double> x_;
  std::vector<std::vector<double>> deficit_;
  std::vector<std::vector<double>> gauss_;
  std::vector<std::vector<double>> expansion_;  // 2 d_w'/d_w (1/m)
  std::vector<std::vector<double>> shape_;      // W_n
  std::vector<double> scratch_;
};

/// Rotor-disk average of a super-Gaussian lateral profile with half-width
/// R d_w, i.e. the fraction of the centerline deficit seen by a rotor.
double super_gaussian_disk_average(double wake_diameter, double order);

// ---------------------------------------------------------------------------
// First-order delay lines.

/// Pade delay realization with unit DC gain:
/// x' = -(2/tau) x + nu, zeta = (4/tau) x - nu, stepped by exact ZOH.
/// The stored state is z = (2/tau) x (m/s), so a change of tau leaves the
/// output of a settled line unchanged.
struct DelayLine {
  std::size_t upstream = 0;
  std::size_t downstream = 0;
  double kappa = 0.0;  // m
  double state = 0.0;  // z
  double tau = 0.0;        // s, last used
  double advection = 0.0;  // U_a of the upstream turbine, last used

  /// Sets the state to its steady value for constant nu.
  void settle(double nu, double u_a);
};

struct DelayStep {
  double zeta = 0.0;
  bool fast_tau_change = false;  // tau moved by more than 50% this step
};

/// Output at the current sample, then the state update. Throws DomainError
/// when tau <= 0 (kappa <= 0 or u_a <= 0).
DelayStep step_delay_line(DelayLine& d, double nu, double u_a, double dt);

/// U_a = u sqrt(1 - C_T).
double advection_speed(double u_inf, double ct);

}  // namespace fowf::wake
