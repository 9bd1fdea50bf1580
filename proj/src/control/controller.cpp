#include "fowf/control/controller.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fowf/error.hpp"

namespace fowf::control {

using plant::TurbineState;

double Region2Gains::min_proportional_gain(double lipschitz, const plant::TurbineParams& p) {
  return (1.0 - p.generator_efficiency) * lipschitz / p.equivalent_inertia();
}

Region2Gains Region2Gains::make(double k_it, double k_p, const plant::TurbineParams& p,
                                double lipschitz) {
  if (!(k_it > 0.0)) throw ConfigError("control", "Region-2 integral gain K_IT must be > 0");
  if (lipschitz < 0.0) throw ConfigError("control", "Lipschitz bound must be >= 0");
  const double bound = min_proportional_gain(lipschitz, p);
  if (!(k_p > bound)) {
    std::ostringstream msg;
    msg << "Region-2 proportional gain K_p = " << k_p << " must exceed (1 - nu_G) L / J_eq = "
        << bound;
    throw ConfigError("control", msg.str());
  }
  Region2Gains g;
  g.k_it = k_it;
  g.k_p = k_p;
  g.generator_efficiency = p.generator_efficiency;
  g.equivalent_inertia = p.equivalent_inertia();
  g.gear_ratio = p.gear_ratio;
  g.max_torque = p.max_generator_torque;
  g.lipschitz_bound = lipschitz;
  return g;
}

double Region2Gains::torque_scale() const {
  return equivalent_inertia / ((1.0 - generator_efficiency) * gear_ratio);
}

TorqueCommand region2_torque(double e, double int_e, const Region2Gains& g) {
  TorqueCommand out;
  out.raw = g.torque_scale() * (g.k_it * int_e + g.k_p * e);
  out.torque = std::clamp(out.raw, 0.0, g.max_torque);
  out.saturated = out.torque != out.raw;
  return out;
}

double region2_torque_model_based(double e, double int_e, double omega_r, double power,
                                  const Region2Gains& g) {
  if (!(omega_r > 0.0)) {
    throw SingularityError("control", "model-based Region-2 torque needs omega_r > 0");
  }
  return g.equivalent_inertia / g.gear_ratio * (g.k_it * int_e + g.k_p * e) +
         power / (g.gear_ratio * omega_r);
}

namespace {

// Anchored grid points k * step inside [lo, hi].
std::vector<double> anchored_samples(Interval box, double step) {
  std::vector<double> out;
  const auto first = static_cast<long long>(std::ceil(box.lo / step - 1e-12));
  const auto last = static_cast<long long>(std::floor(box.hi / step + 1e-12));
  for (long long k = first; k <= last; ++k) out.push_back(static_cast<double>(k) * step);
  return out;
}

}  // namespace

GainCheck check_region2_gains(const Region2Gains& g, const plant::AeroSurfaces& surfaces,
                              const plant::TurbineParams& p, Interval omega_box,
                              Interval wind_box, double omega_step, double wind_step) {
  if (!(omega_box.hi >= omega_box.lo) || !(wind_box.hi >= wind_box.lo)) {
    throw DomainError("control", "gain-check boxes must be nonempty");
  }
  if (!(omega_step > 0.0) || !(wind_step > 0.0)) {
    throw DomainError("control", "gain-check sampling steps must be positive");
  }
  const std::vector<double> omegas = anchored_samples(omega_box, omega_step);
  std::vector<double> winds = anchored_samples(wind_box, wind_step);
  if (winds.empty()) winds.push_back(0.5 * (wind_box.lo + wind_box.hi));

  double lipschitz = 0.0;
  for (double u : winds) {
    const plant::WindVector wind{u, 0.0, 0.0};
    double prev = 0.0;
    for (std::size_t k = 0; k < omegas.size(); ++k) {
      const double ta = plant::aero_torque(omegas[k], 0.0, wind, p, surfaces);
      if (k > 0) {
        lipschitz = std::max(lipschitz, std::abs(ta - prev) / (omegas[k] - omegas[k - 1]));
      }
      prev = ta;
    }
  }
  GainCheck out;
  out.lipschitz = lipschitz;
  out.min_k_p = (1.0 - g.generator_efficiency) * lipschitz / g.equivalent_inertia;
  out.pass = g.k_it > 0.0 && g.k_p > out.min_k_p;
  return out;
}

std::vector<int> default_feedback_states() {
  return {TurbineState::kOmegaR, TurbineState::kSurge, TurbineState::kPitch,
          TurbineState::kSurgeRate, TurbineState::kPitchRate};
}

std::string feedback_name(int state_index) {
  if (state_index == TurbineState::kOmegaR) return "speed_error";
  return std::string(plant::dof_name(state_index));
}

void Region3Schedule::validate() const {
  if (wind.empty()) throw ConfigError("control", "Region-3 schedule has no breakpoints");
  if (k_i.size() != wind.size() || k_x.size() != wind.size()) {
    throw ConfigError("control", "Region-3 schedule columns have mismatched lengths");
  }
  for (std::size_t i = 1; i < wind.size(); ++i) {
    if (!(wind[i] > wind[i - 1])) {
      throw ConfigError("control", "Region-3 breakpoints must be strictly increasing");
    }
  }
  for (const auto& row : k_x) {
    if (row.size() != feedback_states.size()) {
      throw ConfigError("control", "Region-3 K_x row length does not match the feedback set");
    }
  }
}

Region3Gains Region3Schedule::at(double wind_speed) const {
  Region3Gains out;
  if (wind.size() == 1 || !(wind_speed > wind.front())) {
    out.k_i = k_i.front();
    out.k_x = k_x.front();
    return out;
  }
  if (!(wind_speed < wind.back())) {
    out.k_i = k_i.back();
    out.k_x = k_x.back();
    return out;
  }
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(wind.begin(), wind.end(), wind_speed) - wind.begin());
  const std::size_t lo = hi - 1;
  const double t = (wind_speed - wind[lo]) / (wind[hi] - wind[lo]);
  out.k_i = (1.0 - t) * k_i[lo] + t * k_i[hi];
  out.k_x.resize(k_x[lo].size());
  for (std::size_t j = 0; j < out.k_x.size(); ++j) {
    out.k_x[j] = (1.0 - t) * k_x[lo][j] + t * k_x[hi][j];
  }
  return out;
}

PitchCommand region3_pitch(double int_e, const std::vector<double>& chi_fdbk,
                           const Region3Schedule& sched, double wind_speed, double beta_max) {
  if (chi_fdbk.size() != sched.feedback_states.size()) {
    throw ConfigError("control", "feedback vector has " + std::to_string(chi_fdbk.size()) +
                                     " entries, schedule expects " +
                                     std::to_string(sched.feedback_states.size()));
  }
  const Region3Gains g = sched.at(wind_speed);
  double raw = -g.k_i * int_e;
  for (std::size_t j = 0; j < chi_fdbk.size(); ++j) raw -= g.k_x[j] * chi_fdbk[j];
  PitchCommand out;
  out.raw = raw;
  out.beta = std::clamp(raw, 0.0, beta_max);
  out.saturated = out.beta != raw;
  return out;
}

void BlendConfig::validate() const {
  if (!(k_s > 0.0)) throw ConfigError("control", "sigmoid steepness k_s must be > 0");
  if (!std::isfinite(u_0)) throw ConfigError("control", "sigmoid midpoint u_0 must be finite");
}

double sigmoid_weight(double u, const BlendConfig& b) {
  return 1.0 / (1.0 + std::exp(-b.k_s * (u - b.u_0)));
}

std::vector<double> feedback_vector(const TurbineState& x, double omega_c,
                                    const std::vector<int>& states) {
  std::vector<double> out(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    out[j] = states[j] == TurbineState::kOmegaR ? x.omega_r() - omega_c : x[states[j]];
  }
  return out;
}

double region3_generator_torque(double omega_r, const ControllerConfig& cfg,
                                const plant::TurbineParams& p) {
  if (cfg.region3_torque == Region3Torque::kZero) return 0.0;
  const double ratio = omega_r / p.rated_rotor_speed;
  return std::min(p.rated_generator_torque * ratio * ratio, p.max_generator_torque);
}

ControllerEval evaluate_controller(double omega_c, const TurbineState& x, double hub_wind_speed,
                                   const ControllerState& cs, const ControllerConfig& cfg,
                                   const plant::TurbineParams& p) {
  ControllerEval out;
  const double u = cs.wind_filtered;
  out.error = x.omega_r() - omega_c;
  out.weight = sigmoid_weight(u, cfg.blend);
  out.torque_law = region2_torque(out.error, cs.int_e, cfg.region2);

  const auto& sched = cfg.region3;
  const Region3Gains g = sched.at(u);
  double raw = -g.k_i * cs.int_e;
  for (std::size_t j = 0; j < sched.feedback_states.size(); ++j) {
    const int idx = sched.feedback_states[j];
    const double v = idx == TurbineState::kOmegaR ? out.error : x[idx];
    raw -= g.k_x[j] * v;
  }
  out.pitch_law.raw = raw;
  out.pitch_law.beta = std::clamp(raw, 0.0, p.max_pitch);
  out.pitch_law.saturated = out.pitch_law.beta != raw;

  out.region3_torque = region3_generator_torque(x.omega_r(), cfg, p);
  const double s = out.weight;
  out.eta.beta = s * out.pitch_law.beta;
  out.eta.torque = (1.0 - s) * out.torque_law.torque + s * out.region3_torque;
  out.eta.yaw = 0.0;

  // Conditional integration on the dominant channel: hold int_e while that
  // channel is saturated and the error would drive it further out.
  bool hold = false;
  if (s >= 0.5) {
    const double direction = -g.k_i * out.error;  // d(beta_raw)/dt from integration
    hold = (raw > p.max_pitch && direction > 0.0) || (raw < 0.0 && direction < 0.0);
  } else {
    const double direction = cfg.region2.k_it * out.error;
    hold = (out.torque_law.raw > cfg.region2.max_torque && direction > 0.0) ||
           (out.torque_law.raw < 0.0 && direction < 0.0);
  }
  out.int_e_rate = hold ? 0.0 : out.error;
  out.filter_rate = (hub_wind_speed - cs.wind_filtered) / cfg.wind_filter_time_constant;
  return out;
}

BlendedCommand blended_command(double omega_c, const TurbineState& x,
                               const plant::WindVector& inflow, const ControllerState& cs,
                               const ControllerConfig& cfg, const plant::TurbineParams& p,
                               double dt) {
  if (!(dt >= 0.0)) throw DomainError("control", "blended_command needs dt >= 0");
  const double hub = plant::hub_relative_wind(x, inflow, p).magnitude();
  const ControllerEval ev = evaluate_controller(omega_c, x, hub, cs, cfg, p);
  BlendedCommand out;
  out.eta = ev.eta;
  out.state = cs;
  out.state.int_e += dt * ev.int_e_rate;
  out.state.wind_filtered += dt * ev.filter_rate;
  out.state.weight = ev.weight;
  return out;
}

Region3Schedule load_schedule_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("control", "cannot open gain schedule '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("control", "empty gain schedule '" + path + "'");
  std::vector<std::string> header;
  {
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell.erase(std::remove_if(cell.begin(), cell.end(), ::isspace), cell.end());
      header.push_back(cell);
    }
  }
  if (header.size() < 3 || header[0] != "wind" || header[1] != "k_i_beta") {
    throw IoError("control", "gain schedule header must start with 'wind,k_i_beta' in '" + path + "'");
  }
  Region3Schedule s;
  s.feedback_states.clear();
  for (std::size_t c = 2; c < header.size(); ++c) {
    const std::string name = header[c].rfind("k_x_", 0) == 0 ? header[c].substr(4) : header[c];
    int idx = -1;
    for (int i = 0; i < TurbineState::kSize; ++i) {
      if (feedback_name(i) == name) idx = i;
    }
    if (idx < 0) throw IoError("control", "unknown feedback state '" + name + "' in '" + path + "'");
    s.feedback_states.push_back(idx);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double w, ki;
    if (!(ss >> w >> ki)) {
      throw IoError("control", "bad row " + std::to_string(lineno) + " in '" + path + "'");
    }
    std::vector<double> row(s.feedback_states.size());
    for (auto& v : row) {
      if (!(ss >> v)) throw IoError("control", "short row " + std::to_string(lineno) + " in '" + path + "'");
    }
    s.wind.push_back(w);
    s.k_i.push_back(ki);
    s.k_x.push_back(std::move(row));
  }
  s.validate();
  return s;
}

void save_schedule_csv(const Region3Schedule& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("control", "cannot write gain schedule '" + path + "'");
  out << "wind,k_i_beta";
  for (int idx : s.feedback_states) out << ",k_x_" << feedback_name(idx);
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < s.wind.size(); ++i) {
    out << s.wind[i] << ',' << s.k_i[i];
    for (double v : s.k_x[i]) out << ',' << v;
    out << '\n';
  }
}

BlendConfig blend_from_json(const nlohmann::json& j) {
  BlendConfig b;
  if (j.contains("k_s")) b.k_s = j.at("k_s").get<double>();
  if (j.contains("u_0")) b.u_0 = j.at("u_0").get<double>();
  b.validate();
  return b;
}

}  // namespace fowf::control
