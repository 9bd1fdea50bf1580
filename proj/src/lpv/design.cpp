#include "fowf/lpv/design.hpp"

#include <cmath>
#include <complex>

#include "fowf/error.hpp"

namespace fowf::lpv {

using plant::TurbineState;

LqrGain lqr(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q, const MatrixXd& r) {
  LqrGain out;
  out.care = solve_care(a, b, q, r, 1e-10);
  out.k = out.care.k;
  out.closed_loop = a - b * out.k;
  if (!is_hurwitz(out.closed_loop)) {
    throw SolverError("lpv", "LQR closed loop is not Hurwitz (spectral abscissa " +
                                 std::to_string(spectral_abscissa(out.closed_loop)) + ")");
  }
  return out;
}

PiLqrGain design_pi_lqr(const LinearModel& m, const MatrixXd& q, double r) {
  const Eigen::Index n = m.a.rows();
  if (m.b.cols() != 1) throw ConfigError("lpv", "PI-LQR design expects a single input");
  if (m.c.rows() < 1 || m.c.cols() != n) throw ConfigError("lpv", "PI-LQR design needs a regulated output row");
  if (q.rows() != n + 1 || q.cols() != n + 1) {
    throw ConfigError("lpv", "Q must be " + std::to_string(n + 1) + "x" + std::to_string(n + 1));
  }
  if (!(r > 0.0)) throw ConfigError("lpv", "R must be positive");
  PiLqrGain out;
  out.a_aug = MatrixXd::Zero(n + 1, n + 1);
  out.a_aug.block(0, 1, 1, n) = m.c.row(0);
  out.a_aug.block(1, 1, n, n) = m.a;
  out.b_aug = MatrixXd::Zero(n + 1, 1);
  out.b_aug.block(1, 0, n, 1) = m.b;
  out.lqr = lqr(out.a_aug, out.b_aug, q, MatrixXd::Constant(1, 1, r));
  out.k_i = out.lqr.k(0, 0);
  for (Eigen::Index j = 0; j < n; ++j) out.k_x.push_back(out.lqr.k(0, j + 1));
  return out;
}

LinearModel region3_design_model(const plant::TurbineParams& p_in, const plant::AeroSurfaces& s,
                                 const control::ControllerConfig& cfg, double omega_design,
                                 double wind_speed) {
  plant::TurbineParams p = p_in;
  p.drivetrain = plant::DrivetrainMode::kStiff;
  const plant::WindVector inflow{wind_speed, 0.0, 0.0};
  const double t_gen = control::region3_generator_torque(omega_design, cfg, p);

  auto speed_rate = [&](double beta) {
    const TurbineState x = TurbineState::at_speed(omega_design, p);
    const auto loads = plant::rotor_loads(x, beta, inflow, p, s);
    return plant::drivetrain_rhs(omega_design, loads.torque, t_gen, p);
  };
  double lo = 0.0;
  double hi = p.max_pitch;
  if (speed_rate(lo) < 0.0 || speed_rate(hi) > 0.0) {
    throw SolverError("lpv", "no pitch in [0, beta_max] balances the rotor at " +
                                 std::to_string(wind_speed) + " m/s");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (speed_rate(mid) > 0.0 ? lo : hi) = mid;
  }
  const double beta0 = 0.5 * (lo + hi);

  TurbineState base = TurbineState::at_speed(omega_design, p);
  const auto th = plant::aero_thrust(omega_design, beta0, inflow, p, s);
  base[TurbineState::kSurge] = th.force / p.restoring(TurbineState::kSurge);
  base[TurbineState::kPitch] = th.force * p.hub_height / p.restoring(TurbineState::kPitch);

  const std::array<int, 5> states{TurbineState::kOmegaR, TurbineState::kSurge, TurbineState::kPitch,
                                  TurbineState::kSurgeRate, TurbineState::kPitchRate};
  auto expand = [&](const VectorXd& z) {
    TurbineState x = base;
    for (std::size_t k = 0; k < states.size(); ++k) x[states[k]] = z(static_cast<Eigen::Index>(k));
    x[TurbineState::kOmegaG] = p.gear_ratio * x.omega_r();
    return x;
  };
  const Dynamics f = [&](const VectorXd& z, const VectorXd& u) {
    const TurbineState x = expand(z);
    plant::ControlInput eta;
    eta.beta = u(0);
    eta.torque = control::region3_generator_torque(x.omega_r(), cfg, p);
    const auto d = plant::plant_derivative(x, eta, inflow, p, s);
    VectorXd out(5);
    for (std::size_t k = 0; k < states.size(); ++k) out(static_cast<Eigen::Index>(k)) = d[static_cast<std::size_t>(states[k])];
    return out;
  };
  const OutputMap g = [](const VectorXd& z, const VectorXd&) { return VectorXd::Constant(1, z(0)); };

  VectorXd z0(5);
  for (std::size_t k = 0; k < states.size(); ++k) z0(static_cast<Eigen::Index>(k)) = base[states[k]];
  VectorXd u0(1);
  u0 << beta0;
  VectorXd zs(5);
  zs << 1e-5, 1e-3, 1e-5, 1e-4, 1e-6;
  VectorXd us(1);
  us << 1e-5;
  LinearModel m = linearize_at(f, g, z0, u0, zs, us);
  m.omega_r = omega_design;
  m.wind_speed = wind_speed;
  return m;
}

double loop_crossover(const MatrixXd& a, const MatrixXd& b, const MatrixXd& k, double w_min,
                      double w_max) {
  using C = std::complex<double>;
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXcd ac = a.cast<C>();
  const Eigen::MatrixXcd bc = b.cast<C>();
  const Eigen::MatrixXcd kc = k.cast<C>();
  auto gain = [&](double w) {
    Eigen::MatrixXcd m = C(0.0, w) * Eigen::MatrixXcd::Identity(n, n) - ac;
    const Eigen::MatrixXcd l = kc * m.partialPivLu().solve(bc);
    return std::abs(l(0, 0));
  };
  const int samples = 600;
  const double ratio = std::log(w_max / w_min);
  double last_above = -1.0;
  double next_w = 0.0;
  double prev_w = w_min;
  double prev_g = gain(w_min);
  for (int i = 1; i <= samples; ++i) {
    const double w = w_min * std::exp(ratio * i / samples);
    const double gw = gain(w);
    if (prev_g >= 1.0 && gw < 1.0) {
      last_above = prev_w;
      next_w = w;
    }
    prev_w = w;
    prev_g = gw;
  }
  if (last_above < 0.0) return gain(w_min) >= 1.0 ? w_max : 0.0;
  double lo = last_above;
  double hi = next_w;
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    (gain(mid) >= 1.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

namespace {

struct Trial {
  PiLqrGain gain;
  double crossover = 0.0;
};

Trial try_r(const LinearModel& m, const MatrixXd& q, double r) {
  Trial t{design_pi_lqr(m, q, r), 0.0};
  t.crossover = loop_crossover(t.gain.a_aug, t.gain.b_aug, t.gain.lqr.k);
  return t;
}

}  // namespace

Region3Design synthesize_region3_schedule(const plant::TurbineParams& p,
                                          const plant::AeroSurfaces& s,
                                          const control::ControllerConfig& cfg,
                                          const Region3DesignOptions& opt) {
  if (opt.q_diag.size() != 6) throw ConfigError("lpv", "Region-3 Q diagonal needs 6 entries");
  if (opt.breakpoints.empty()) throw ConfigError("lpv", "Region-3 design needs breakpoints");
  MatrixXd q = MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i) q(i, i) = opt.q_diag[static_cast<std::size_t>(i)];

  Region3Design out;
  out.pitch_frequency = p.natural_frequency(TurbineState::kPitch);
  const double limit = opt.bandwidth_margin * out.pitch_frequency;
  const LinearModel design = region3_design_model(p, s, cfg, opt.omega_design, opt.design_wind);

  if (opt.r > 0.0) {
    out.r = opt.r;
  } else {
    // Grow R until the crossover is below the limit, then bisect in log R for
    // the smallest such R (the fastest loop the rule allows).
    double r_lo = 1.0;
    double r_hi = 1.0;
    int guard = 0;
    if (try_r(design, q, r_hi).crossover > limit) {
      while (try_r(design, q, r_hi).crossover > limit) {
        r_lo = r_hi;
        r_hi *= 4.0;
        if (++guard > 80) throw SolverError("lpv", "bandwidth line search on R did not terminate");
      }
    } else {
      r_lo = r_hi / 4.0;
      while (try_r(design, q, r_lo).crossover <= limit && ++guard < 80) {
        r_hi = r_lo;
        r_lo /= 4.0;
      }
    }
    for (int it = 0; it < 40 && r_hi / r_lo > 1.0 + 1e-6; ++it) {
      const double mid = std::sqrt(r_lo * r_hi);
      (try_r(design, q, mid).crossover > limit ? r_lo : r_hi) = mid;
    }
    out.r = r_hi;
  }

  out.schedule.feedback_states = control::default_feedback_states();
  out.schedule.wind.clear();
  out.schedule.k_i.clear();
  out.schedule.k_x.clear();
  for (double w : opt.breakpoints) {
    const LinearModel m = region3_design_model(p, s, cfg, opt.omega_design, w);
    const Trial t = try_r(m, q, out.r);
    out.schedule.wind.push_back(w);
    out.schedule.k_i.push_back(t.gain.k_i);
    out.schedule.k_x.push_back(t.gain.k_x);
    out.points.push_back({w, t.crossover, t.gain.lqr.care.residual,
                          spectral_abscissa(t.gain.lqr.closed_loop)});
  }
  out.schedule.validate();
  return out;
}

}  // namespace fowf::lpv

namespace fowf::lpv {

control::Region2Gains default_region2_gains(const plant::TurbineParams& p) {
  const double slack = 1.0 - p.generator_efficiency;
  return control::Region2Gains::make(0.0625 * slack, 0.5 * slack, p);
}

farm::TurbineModel build_turbine_model(const plant::TurbineParams& p,
                                       std::shared_ptr<const plant::AeroSurfaces> surfaces,
                                       const control::BlendConfig& blend,
                                       const Region3DesignOptions& opt) {
  farm::TurbineModel m;
  m.params = p;
  m.surfaces = std::move(surfaces);
  m.controller.region2 = default_region2_gains(p);
  m.controller.blend = blend;
  m.controller.region3 = synthesize_region3_schedule(p, *m.surfaces, m.controller, opt).schedule;
  return m;
}

}  // namespace fowf::lpv
