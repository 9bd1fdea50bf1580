#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fowf/farm/farm.hpp"
#include "fowf/lpv/lpv.hpp"
#include "fowf/mpc/optimizer.hpp"
#include "fowf/wake/wake.hpp"

namespace fowf::mpc {

enum class PredictorKind { kNonlinear, kLpvDelay };

std::string to_string(PredictorKind k);
PredictorKind predictor_from_string(const std::string& s);

struct MpcConfig {
  double horizon = 50.0;       // T_C (s)
  int horizons = 5;            // N_C; N_C - 1 command intervals are optimized
  double q_e = 1.0;            // on power error in MW
  double q_omega = 0.01;       // on speed error in rpm
  double omega_min_rpm = 8.0;
  double omega_max_rpm = 12.0;
  double update_interval = 50.0;  // s
  double predictor_dt = 1.0;      // s
  PredictorKind predictor = PredictorKind::kNonlinear;
  OptimizerOptions optimizer;

  int intervals() const { return horizons - 1; }
  int steps_per_interval() const;
  void validate() const;
};

/// Row-major commands in rpm: value(i, q) = omega[i * intervals + q].
struct CommandPlan {
  int turbines = 0;
  int intervals = 0;
  std::vector<double> omega;
  double timestamp = 0.0;
  double cost = 0.0;
  double warm_cost = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool iteration_limit = false;
  double wall_time = 0.0;  // s

  double at(int i, int q) const { return omega[static_cast<std::size_t>(i * intervals + q)]; }
  double& at(int i, int q) { return omega[static_cast<std::size_t>(i * intervals + q)]; }
  static CommandPlan constant(int turbines, int intervals, double rpm);
  /// Drops the first interval and repeats the last.
  CommandPlan shifted() const;
};

/// What the farm controller sees when it solves.
struct FarmSnapshot {
  double time = 0.0;
  std::vector<farm::ClosedLoopState> turbines;
  std::vector<wake::WakeColumn> wakes;
  std::vector<plant::WindVector> freestream;  // per column, held over the horizon
  std::vector<double> inflow;                 // measured streamwise inflow per turbine
  std::vector<double> ct;                     // measured thrust coefficient per turbine
  std::vector<double> power;                  // W per turbine at the snapshot instant (optional)
  std::vector<double> omega_c;                // rad/s, commands in force at the snapshot (optional)
};

struct Prediction {
  std::vector<double> farm_power;                  // MW at each predictor step
  std::vector<std::vector<double>> omega_start;   // rpm, [interval][turbine]
  std::vector<std::vector<double>> turbine_power;  // MW, [step][turbine], only when requested
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  /// Pure in the plan; safe to call concurrently.
  virtual Prediction predict(const FarmSnapshot& s, const CommandPlan& plan, const MpcConfig& cfg,
                             bool per_turbine = false) const = 0;
  /// Measurement update between solves, called every predictor step.
  virtual void observe(const FarmSnapshot& /*s*/, double /*dt*/) {}
  /// Prepares a solve (bias terms, state copies).
  virtual void prepare(const FarmSnapshot& /*s*/) {}
  virtual PredictorKind kind() const = 0;
};

/// Stiff-drivetrain plant and inner loop coupled to a copy of the PDE wake.
class NonlinearPredictor : public Predictor {
 public:
  NonlinearPredictor(const farm::TurbineModel& model, const farm::Layout& layout);
  Prediction predict(const FarmSnapshot& s, const CommandPlan& plan, const MpcConfig& cfg,
                     bool per_turbine) const override;
  PredictorKind kind() const override { return PredictorKind::kNonlinear; }

 private:
  farm::TurbineModel model_;
  farm::Layout layout_;
};

/// Scheduled LPV turbines coupled through first-order delay lines.
class LpvDelayPredictor : public Predictor {
 public:
  LpvDelayPredictor(lpv::LpvGrid grid, const farm::Layout& layout, const wake::WakeConfig& wake,
                    const plant::TurbineParams& params, double dt);
  Prediction predict(const FarmSnapshot& s, const CommandPlan& plan, const MpcConfig& cfg,
                     bool per_turbine) const override;
  void observe(const FarmSnapshot& s, double dt) override;
  void prepare(const FarmSnapshot& s) override;
  PredictorKind kind() const override { return PredictorKind::kLpvDelay; }

  const std::vector<wake::DelayLine>& lines() const { return lines_; }
  /// Settles every line on the snapshot's inflow and thrust.
  void settle(const FarmSnapshot& s);
  /// Streamwise inflow bias added per turbine (measured minus delay model).
  const std::vector<double>& inflow_bias() const { return bias_; }
  /// Generator power offset per turbine (measured minus LPV output), W.
  const std::vector<double>& power_bias() const { return power_bias_; }
  /// One-step state offset per turbine that makes the snapshot state a fixed point.
  const std::vector<Eigen::VectorXd>& state_bias() const { return state_bias_; }
  bool bias_correction = true;
  bool state_correction = true;

 private:
  double pair_nu(double u_up, double ct_up, std::size_t line) const;
  Eigen::VectorXd initial_vector(const farm::ClosedLoopState& x) const;

  lpv::DiscreteLpv lpv_;
  farm::Layout layout_;
  wake::WakeConfig wake_;
  double rotor_radius_;
  double gear_ratio_;
  std::vector<wake::DelayLine> lines_;
  std::vector<double> line_gain_;  // pair_deficit per unit delta_u0
  std::vector<double> bias_;
  std::vector<double> power_bias_;
  std::vector<Eigen::VectorXd> state_bias_;
  bool settled_ = false;
};

/// Sum over intervals of Q_omega * (omega_r at interval start - command)^2
/// plus the rectangle-rule integral of Q_e * (P_sp - farm power)^2 in MW.
double horizon_cost(const Prediction& pred, const CommandPlan& plan, double p_sp_mw, const MpcConfig& cfg);

/// Cost of one plan, running the predictor.
double evaluate_plan(const Predictor& pred, const FarmSnapshot& s, const CommandPlan& plan, double p_sp_mw,
                     const MpcConfig& cfg);

/// Minimizes the horizon cost over the command box from `warm`.
CommandPlan solve_mpc(const Predictor& pred, const FarmSnapshot& s, double p_sp_mw, const MpcConfig& cfg,
                      const CommandPlan& warm);

struct SolveTelemetry {
  double time = 0.0;
  double p_sp = 0.0;
  double cost = 0.0;
  double warm_cost = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool iteration_limit = false;
  double wall_time = 0.0;
  int saturated = 0;  // dispatched commands on a bound
};

/// Receding-horizon wrapper: solve, dispatch the first interval, hold.
class RecedingHorizonController {
 public:
  RecedingHorizonController(std::unique_ptr<Predictor> predictor, MpcConfig cfg, int turbines);

  /// Solves and returns the first-interval commands in rad/s.
  std::vector<double> update(const FarmSnapshot& s, double p_sp_mw);
  void observe(const FarmSnapshot& s, double dt) { predictor_->observe(s, dt); }

  const MpcConfig& config() const { return cfg_; }
  const Predictor& predictor() const { return *predictor_; }
  const CommandPlan& plan() const { return plan_; }
  const std::vector<SolveTelemetry>& telemetry() const { return telemetry_; }
  /// Seeds the warm start, e.g. from the startup command.
  void seed(double rpm);

 private:
  std::unique_ptr<Predictor> predictor_;
  MpcConfig cfg_;
  CommandPlan plan_;
  bool have_plan_ = false;
  std::vector<SolveTelemetry> telemetry_;
};

void write_telemetry_csv(const std::string& path, const std::vector<SolveTelemetry>& t);

double rpm_to_rad(double rpm);
double rad_to_rpm(double rad);

}  // namespace fowf::mpc
