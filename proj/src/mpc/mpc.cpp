#include "fowf/mpc/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "fowf/error.hpp"

namespace fowf::mpc {

double rpm_to_rad(double rpm) { return rpm * M_PI / 30.0; }
double rad_to_rpm(double rad) { return rad * 30.0 / M_PI; }

std::string to_string(PredictorKind k) { return k == PredictorKind::kNonlinear ? "nl-mpc" : "lpvtd-mpc"; }

PredictorKind predictor_from_string(const std::string& s) {
  if (s == "nl-mpc" || s == "nl") return PredictorKind::kNonlinear;
  if (s == "lpvtd-mpc" || s == "lpvtd") return PredictorKind::kLpvDelay;
  throw ConfigError("mpc", "unknown controller '" + s + "' (expected nl-mpc or lpvtd-mpc)");
}

int MpcConfig::steps_per_interval() const {
  return static_cast<int>(std::lround(horizon / predictor_dt));
}

void MpcConfig::validate() const {
  auto bad = [](const std::string& m) { throw ConfigError("mpc", m); };
  if (!(horizon > 0.0)) bad("horizon T_C must be positive");
  if (horizons < 2) bad("N_C must be at least 2");
  if (!(q_e >= 0.0) || !(q_omega >= 0.0)) bad("weights must be non-negative");
  if (!(omega_min_rpm < omega_max_rpm)) bad("speed bounds must be ordered");
  if (!(update_interval > 0.0)) bad("update interval must be positive");
  if (!(predictor_dt > 0.0)) bad("predictor dt must be positive");
  if (std::abs(steps_per_interval() * predictor_dt - horizon) > 1e-9)
    bad("horizon must be a whole number of predictor steps");
}

CommandPlan CommandPlan::constant(int turbines, int intervals, double rpm) {
  CommandPlan p;
  p.turbines = turbines;
  p.intervals = intervals;
  p.omega.assign(static_cast<std::size_t>(turbines * intervals), rpm);
  return p;
}

CommandPlan CommandPlan::shifted() const {
  CommandPlan p = *this;
  for (int i = 0; i < turbines; ++i) {
    for (int q = 0; q + 1 < intervals; ++q) p.at(i, q) = at(i, q + 1);
  }
  return p;
}

// ---------------------------------------------------------------------------

NonlinearPredictor::NonlinearPredictor(const farm::TurbineModel& model, const farm::Layout& layout)
    : model_(model), layout_(layout) {
  model_.params.drivetrain = plant::DrivetrainMode::kStiff;
}

Prediction NonlinearPredictor::predict(const FarmSnapshot& s, const CommandPlan& plan, const MpcConfig& cfg,
                                       bool per_turbine) const {
  std::vector<farm::ClosedLoopState> states;
  states.reserve(s.turbines.size());
  for (const auto& x : s.turbines) states.push_back(farm::to_stiff(x, model_));
  farm::FarmModel f(model_, layout_, s.wakes, std::move(states));
  const int nt = layout_.turbines();
  const int steps = cfg.steps_per_interval();
  Prediction out;
  out.farm_power.reserve(static_cast<std::size_t>(steps * plan.intervals));
  std::vector<double> omega_c(static_cast<std::size_t>(nt));
  for (int q = 0; q < plan.intervals; ++q) {
    std::vector<double> start(static_cast<std::size_t>(nt));
    for (int i = 0; i < nt; ++i) {
      start[static_cast<std::size_t>(i)] = rad_to_rpm(f.states()[static_cast<std::size_t>(i)].plant.omega_r());
      omega_c[static_cast<std::size_t>(i)] = rpm_to_rad(plan.at(i, q));
    }
    out.omega_start.push_back(std::move(start));
    for (int k = 0; k < steps; ++k) {
      const auto fs = f.step(s.freestream, omega_c, cfg.predictor_dt);
      out.farm_power.push_back(fs.power * 1e-6);
      if (per_turbine) {
        std::vector<double> p(static_cast<std::size_t>(nt));
        for (int i = 0; i < nt; ++i) p[static_cast<std::size_t>(i)] = fs.turbines[static_cast<std::size_t>(i)].out.power * 1e-6;
        out.turbine_power.push_back(std::move(p));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

LpvDelayPredictor::LpvDelayPredictor(lpv::LpvGrid grid, const farm::Layout& layout,
                                     const wake::WakeConfig& wake, const plant::TurbineParams& params,
                                     double dt)
    : lpv_(std::move(grid), dt, plant::TurbineState::kOmegaR, farm::ClosedLoopState::kWindFiltered),
      layout_(layout),
      wake_(wake),
      rotor_radius_(params.rotor_radius),
      gear_ratio_(params.gear_ratio) {
  layout_.validate();
  for (int c = 0; c < layout_.columns; ++c)
    for (int j = 1; j < layout_.rows; ++j)
      for (int i = 0; i < j; ++i) {
        wake::DelayLine d;
        d.upstream = static_cast<std::size_t>(layout_.index(c, i));
        d.downstream = static_cast<std::size_t>(layout_.index(c, j));
        d.kappa = layout_.spacing * (j - i);
        lines_.push_back(d);
        line_gain_.push_back(wake::pair_deficit(1.0, d.kappa, wake_.k_w, rotor_radius_));
      }
  bias_.assign(static_cast<std::size_t>(layout_.turbines()), 0.0);
  power_bias_.assign(static_cast<std::size_t>(layout_.turbines()), 0.0);
  state_bias_.assign(static_cast<std::size_t>(layout_.turbines()), Eigen::VectorXd::Zero(lpv_.states()));
}

double LpvDelayPredictor::pair_nu(double u_up, double ct_up, std::size_t line) const {
  const double ct = std::clamp(ct_up, 0.0, 0.999);
  return wake::initial_deficit(std::max(u_up, 0.0), ct) * line_gain_[line];
}

Eigen::VectorXd LpvDelayPredictor::initial_vector(const farm::ClosedLoopState& x) const {
  Eigen::VectorXd v = lpv::closed_loop_vector(x);
  v(plant::TurbineState::kOmegaG) = gear_ratio_ * v(plant::TurbineState::kOmegaR);
  v(plant::TurbineState::kTwist) = 0.0;
  return v;
}

void LpvDelayPredictor::settle(const FarmSnapshot& s) {
  for (std::size_t l = 0; l < lines_.size(); ++l) {
    auto& d = lines_[l];
    const double u = s.inflow[d.upstream], ct = s.ct[d.upstream];
    d.settle(pair_nu(u, ct, l), std::max(wake::advection_speed(u, ct), 1e-3));
  }
  settled_ = true;
}

void LpvDelayPredictor::observe(const FarmSnapshot& s, double dt) {
  if (!settled_) settle(s);
  for (std::size_t l = 0; l < lines_.size(); ++l) {
    auto& d = lines_[l];
    const double u = s.inflow[d.upstream], ct = s.ct[d.upstream];
    wake::step_delay_line(d, pair_nu(u, ct, l), std::max(wake::advection_speed(u, ct), 1e-3), dt);
  }
}

void LpvDelayPredictor::prepare(const FarmSnapshot& s) {
  if (!settled_) settle(s);
  std::fill(bias_.begin(), bias_.end(), 0.0);
  std::fill(power_bias_.begin(), power_bias_.end(), 0.0);
  for (auto& b : state_bias_) b.setZero();
  if (!bias_correction) return;
  std::vector<double> model(bias_.size(), 0.0);
  for (int c = 0; c < layout_.columns; ++c)
    for (int r = 0; r < layout_.rows; ++r)
      model[static_cast<std::size_t>(layout_.index(c, r))] = s.freestream[static_cast<std::size_t>(c)].u;
  for (std::size_t l = 0; l < lines_.size(); ++l) {
    const auto& d = lines_[l];
    const double nu = pair_nu(s.inflow[d.upstream], s.ct[d.upstream], l);
    model[d.downstream] -= 2.0 * d.state - nu;
  }
  for (std::size_t i = 0; i < bias_.size(); ++i) bias_[i] = s.inflow[i] - model[i];

  if (s.power.size() != bias_.size() || s.omega_c.size() != bias_.size()) return;
  lpv::DiscreteLpv::Workspace ws;
  Eigen::VectorXd psi(4);
  for (int c = 0; c < layout_.columns; ++c) {
    const auto& fw = s.freestream[static_cast<std::size_t>(c)];
    for (int r = 0; r < layout_.rows; ++r) {
      const auto i = static_cast<std::size_t>(layout_.index(c, r));
      psi << s.omega_c[i], s.inflow[i], fw.v, fw.w;
      const Eigen::VectorXd x0 = initial_vector(s.turbines[i]);
      lpv_.step_into(x0, psi, ws);
      power_bias_[i] = s.power[i] - ws.out(lpv_.states() + lpv::kOutputPower);
      if (state_correction) state_bias_[i] = x0 - ws.out.head(lpv_.states());
    }
  }
}

Prediction LpvDelayPredictor::predict(const FarmSnapshot& s, const CommandPlan& plan, const MpcConfig& cfg,
                                      bool per_turbine) const {
  if (std::abs(cfg.predictor_dt - lpv_.dt()) > 1e-12)
    throw ConfigError("mpc", "LPV predictor was discretized for a different dt");
  const int nt = layout_.turbines();
  std::vector<Eigen::VectorXd> x;
  x.reserve(static_cast<std::size_t>(nt));
  for (const auto& st : s.turbines) x.push_back(initial_vector(st));
  auto lines = lines_;
  std::vector<double> u_now(static_cast<std::size_t>(nt)), ct_now(static_cast<std::size_t>(nt));
  std::vector<double> deficit(static_cast<std::size_t>(nt));
  Eigen::VectorXd psi(4);
  lpv::DiscreteLpv::Workspace ws;
  const Eigen::Index n = lpv_.states();
  const int steps = cfg.steps_per_interval();
  Prediction out;
  out.farm_power.reserve(static_cast<std::size_t>(steps * plan.intervals));
  for (int q = 0; q < plan.intervals; ++q) {
    std::vector<double> start(static_cast<std::size_t>(nt));
    for (int i = 0; i < nt; ++i)
      start[static_cast<std::size_t>(i)] = rad_to_rpm(x[static_cast<std::size_t>(i)](plant::TurbineState::kOmegaR));
    out.omega_start.push_back(std::move(start));
    for (int k = 0; k < steps; ++k) {
      double total = 0.0;
      std::vector<double> tp;
      if (per_turbine) tp.assign(static_cast<std::size_t>(nt), 0.0);
      std::fill(deficit.begin(), deficit.end(), 0.0);
      std::size_t line = 0;
      for (int c = 0; c < layout_.columns; ++c) {
        const auto& fw = s.freestream[static_cast<std::size_t>(c)];
        for (int r = 0; r < layout_.rows; ++r) {
          const auto j = static_cast<std::size_t>(layout_.index(c, r));
          // lines into j are stored contiguously, upstream first
          for (int i = 0; i < r; ++i, ++line) {
            auto& d = lines[line];
            const double uu = u_now[d.upstream], cu = ct_now[d.upstream];
            deficit[j] += wake::step_delay_line(d, pair_nu(uu, cu, line),
                                                std::max(wake::advection_speed(uu, cu), 1e-3), cfg.predictor_dt)
                              .zeta;
          }
          const double u = std::max(fw.u - deficit[j] + bias_[j], 0.0);
          psi << rpm_to_rad(plan.at(static_cast<int>(j), q)), u, fw.v, fw.w;
          lpv_.step_into(x[j], psi, ws);
          x[j] = ws.out.head(n) + state_bias_[j];
          u_now[j] = u;
          ct_now[j] = ws.out(n + lpv::kOutputThrustCoefficient);
          const double p = (ws.out(n + lpv::kOutputPower) + power_bias_[j]) * 1e-6;
          total += p;
          if (per_turbine) tp[j] = p;
        }
      }
      out.farm_power.push_back(total);
      if (per_turbine) out.turbine_power.push_back(std::move(tp));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

double horizon_cost(const Prediction& pred, const CommandPlan& plan, double p_sp_mw, const MpcConfig& cfg) {
  const int steps = cfg.steps_per_interval();
  if (pred.farm_power.size() != static_cast<std::size_t>(steps * plan.intervals))
    throw ConfigError("mpc", "prediction length does not match the plan");
  double j = 0.0;
  for (int q = 0; q < plan.intervals; ++q) {
    for (int i = 0; i < plan.turbines; ++i) {
      const double e = pred.omega_start[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)] - plan.at(i, q);
      j += cfg.q_omega * e * e;
    }
    for (int k = 0; k < steps; ++k) {
      const double e = p_sp_mw - pred.farm_power[static_cast<std::size_t>(q * steps + k)];
      j += cfg.q_e * e * e * cfg.predictor_dt;
    }
  }
  return j;
}

double evaluate_plan(const Predictor& pred, const FarmSnapshot& s, const CommandPlan& plan, double p_sp_mw,
                     const MpcConfig& cfg) {
  return horizon_cost(pred.predict(s, plan, cfg, false), plan, p_sp_mw, cfg);
}

CommandPlan solve_mpc(const Predictor& pred, const FarmSnapshot& s, double p_sp_mw, const MpcConfig& cfg,
                      const CommandPlan& warm) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  CommandPlan templ = warm;
  const std::size_t n = warm.omega.size();
  const std::vector<double> lo(n, cfg.omega_min_rpm), hi(n, cfg.omega_max_rpm);
  auto f = [&](const std::vector<double>& x) {
    CommandPlan p = templ;
    p.omega = x;
    return evaluate_plan(pred, s, p, p_sp_mw, cfg);
  };
  const auto r = minimize_box(f, warm.omega, lo, hi, cfg.optimizer);
  CommandPlan out = warm;
  out.omega = r.x;
  out.cost = r.cost;
  out.warm_cost = r.initial_cost;
  out.iterations = r.iterations;
  out.evaluations = r.evaluations;
  out.iteration_limit = r.iteration_limit;
  out.timestamp = s.time;
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

// ---------------------------------------------------------------------------

RecedingHorizonController::RecedingHorizonController(std::unique_ptr<Predictor> predictor, MpcConfig cfg,
                                                     int turbines)
    : predictor_(std::move(predictor)), cfg_(std::move(cfg)) {
  cfg_.validate();
  plan_ = CommandPlan::constant(turbines, cfg_.intervals(), cfg_.omega_max_rpm);
}

void RecedingHorizonController::seed(double rpm) {
  plan_ = CommandPlan::constant(plan_.turbines, plan_.intervals,
                                std::clamp(rpm, cfg_.omega_min_rpm, cfg_.omega_max_rpm));
  have_plan_ = true;
}

std::vector<double> RecedingHorizonController::update(const FarmSnapshot& s, double p_sp_mw) {
  if (!have_plan_) {
    for (int i = 0; i < plan_.turbines; ++i) {
      const double w = std::clamp(rad_to_rpm(s.turbines[static_cast<std::size_t>(i)].plant.omega_r()),
                                  cfg_.omega_min_rpm, cfg_.omega_max_rpm);
      for (int q = 0; q < plan_.intervals; ++q) plan_.at(i, q) = w;
    }
    have_plan_ = true;
  }
  predictor_->prepare(s);
  const CommandPlan warm = plan_.shifted();
  plan_ = solve_mpc(*predictor_, s, p_sp_mw, cfg_, warm);
  SolveTelemetry t;
  t.time = s.time;
  t.p_sp = p_sp_mw;
  t.cost = plan_.cost;
  t.warm_cost = plan_.warm_cost;
  t.iterations = plan_.iterations;
  t.evaluations = plan_.evaluations;
  t.iteration_limit = plan_.iteration_limit;
  t.wall_time = plan_.wall_time;
  std::vector<double> cmd(static_cast<std::size_t>(plan_.turbines));
  for (int i = 0; i < plan_.turbines; ++i) {
    const double w = plan_.at(i, 0);
    if (w <= cfg_.omega_min_rpm || w >= cfg_.omega_max_rpm) ++t.saturated;
    cmd[static_cast<std::size_t>(i)] = rpm_to_rad(w);
  }
  telemetry_.push_back(t);
  return cmd;
}

void write_telemetry_csv(const std::string& path, const std::vector<SolveTelemetry>& t) {
  std::ofstream f(path);
  if (!f) throw IoError("mpc", "cannot write '" + path + "'");
  f << "time_s,p_sp_mw,cost,warm_cost,iterations,evaluations,iteration_limit,wall_time_s,saturated\n";
  f << std::setprecision(10);
  for (const auto& r : t)
    f << r.time << ',' << r.p_sp << ',' << r.cost << ',' << r.warm_cost << ',' << r.iterations << ','
      << r.evaluations << ',' << (r.iteration_limit ? 1 : 0) << ',' << r.wall_time << ',' << r.saturated << '\n';
}

}  // namespace fowf::mpc
