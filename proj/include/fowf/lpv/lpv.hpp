#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fowf/farm/closed_loop.hpp"
#include "fowf/lpv/linalg.hpp"

namespace fowf::lpv {

/// Continuous-time linearization about an equilibrium. Deviation form:
/// d(dx)/dt = A dx + B du, dy = C dx + D du, with dx = x - x0 etc.
struct LinearModel {
  MatrixXd a, b, c, d;
  double omega_r = 0.0;     // operating point rotor speed (rad/s)
  double wind_speed = 0.0;  // operating point wind speed (m/s)
  VectorXd x0, u0, y0;
  double trim_residual = 0.0;

  Eigen::Index states() const { return a.rows(); }
  Eigen::Index inputs() const { return b.cols(); }
  Eigen::Index outputs() const { return c.rows(); }
  /// Throws ConfigError on inconsistent dimensions.
  void validate() const;
};

using Dynamics = std::function<VectorXd(const VectorXd& x, const VectorXd& u)>;
using OutputMap = std::function<VectorXd(const VectorXd& x, const VectorXd& u)>;

struct TrimOptions {
  double tolerance = 1e-8;
  int max_iterations = 60;
  std::vector<bool> free;  // which states Newton may move; empty means all
};

struct TrimResult {
  VectorXd x;
  double residual = 0.0;  // ||f(x, u)|| (infinity norm)
  int iterations = 0;
  bool singular = false;  // Jacobian rank deficient at some iterate
};

/// Damped Newton on f(x, u) = 0 over the free coordinates, using a
/// minimum-norm step so algebraic or neutral directions do not stall it.
/// Throws SolverError with the residual norm when it does not converge.
TrimResult find_trim(const Dynamics& f, const VectorXd& x_guess, const VectorXd& u,
                     const VectorXd& steps, const TrimOptions& opt = {});

/// Central finite differences about (x0, u0).
LinearModel linearize_at(const Dynamics& f, const OutputMap& g, const VectorXd& x0,
                         const VectorXd& u0, const VectorXd& x_steps, const VectorXd& u_steps);

// Closed-loop turbine in vector form. Inputs psi = [omega_c, u_x, u_y, u_z];
// outputs zeta = [P_gen (W), omega_r (rad/s), C_T].
constexpr int kInputOmegaC = 0;
constexpr int kOutputPower = 0;
constexpr int kOutputOmega = 1;
constexpr int kOutputThrustCoefficient = 2;

VectorXd closed_loop_vector(const farm::ClosedLoopState& s);
farm::ClosedLoopState closed_loop_from_vector(const VectorXd& v, const farm::TurbineModel& m);
Dynamics closed_loop_dynamics(const farm::TurbineModel& m);
OutputMap closed_loop_outputs(const farm::TurbineModel& m);
VectorXd closed_loop_state_steps(const farm::TurbineModel& m);

/// Equilibrium estimate from a scalar search over int_e with the platform at
/// its static offset; Newton polishes it.
farm::ClosedLoopState trim_guess(const farm::TurbineModel& m, double omega_r, double wind_speed);

/// Trims the closed loop with omega_c = omega_r and uniform axial wind,
/// then linearizes. `warm` seeds Newton when the scalar search fails.
LinearModel linearize_turbine(const farm::TurbineModel& m, double omega_r, double wind_speed,
                              const VectorXd* warm = nullptr);

enum class Interpolation { kBilinear, kNearest };

struct LpvGrid {
  std::vector<double> omega_nodes;  // rad/s, ascending
  std::vector<double> wind_nodes;   // m/s, ascending
  std::vector<LinearModel> models;  // omega-major: index i * wind_nodes.size() + j
  Interpolation interpolation = Interpolation::kBilinear;

  const LinearModel& node(std::size_t i, std::size_t j) const {
    return models[i * wind_nodes.size() + j];
  }
  void validate() const;
};

struct ScheduleInfo {
  bool clamped = false;
};

/// Bilinear weights of the four lattice corners around a scheduling point.
struct ScheduleWeights {
  std::array<std::size_t, 4> idx{};
  std::array<double, 4> w{};
  bool clamped = false;
};

ScheduleWeights schedule_weights(const LpvGrid& grid, double omega_r, double wind_speed);

/// Entrywise interpolation of all matrices and offsets over the lattice cell
/// containing (omega_r, wind_speed), clamped to the lattice boundary.
LinearModel schedule(const LpvGrid& grid, double omega_r, double wind_speed,
                     ScheduleInfo* info = nullptr);

/// Default lattice: 8..12 rpm by 0.5, 8..24 m/s by 2.
std::vector<double> default_omega_nodes();
std::vector<double> default_wind_nodes();

/// Builds the lattice, warm-starting each trim from its neighbour.
/// `workers` > 1 trims rows of the lattice in parallel.
LpvGrid build_lpv_grid(const farm::TurbineModel& m, const std::vector<double>& omega_nodes,
                       const std::vector<double>& wind_nodes, int workers = 1);

struct LpvStep {
  VectorXd x;  // next absolute state
  VectorXd y;  // outputs at the current sample
};

/// One ZOH step of a frozen model in absolute coordinates.
LpvStep step_lpv(const LinearModel& m, const VectorXd& x, const VectorXd& u, double dt);

/// Precomputed ZOH matrices at every node for a fixed dt; stepping
/// interpolates these, scheduled on the state's rotor speed and filtered wind.
class DiscreteLpv {
 public:
  DiscreteLpv(LpvGrid grid, double dt, int omega_index, int wind_index);

  LpvStep step(const VectorXd& x, const VectorXd& u, ScheduleInfo* info = nullptr) const;

  /// Allocation-free step: `out` holds [x_next; y] after the call.
  struct Workspace {
    VectorXd z, out;
  };
  void step_into(const VectorXd& x, const VectorXd& u, Workspace& ws, ScheduleInfo* info = nullptr) const;
  Eigen::Index states() const { return grid_.models.front().a.rows(); }
  double dt() const { return dt_; }
  const LpvGrid& grid() const { return grid_; }

 private:
  struct Node {
    MatrixXd ad, bd;
    MatrixXd affine;  // [[Ad, Bd, f], [C, D, g]] acting on [x; u; 1]
  };
  LpvGrid grid_;
  double dt_;
  int omega_index_;
  int wind_index_;
  std::vector<Node> nodes_;
};

/// Writes `dir/index.json` and one CSV per node holding the A, B, C, D and
/// offset blocks.
void save_lpv_grid(const LpvGrid& grid, const std::string& dir);
LpvGrid load_lpv_grid(const std::string& dir);

}  // namespace fowf::lpv
