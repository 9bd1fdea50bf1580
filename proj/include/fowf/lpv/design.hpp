#pragma once

#include <vector>

#include "fowf/control/controller.hpp"
#include "fowf/lpv/linalg.hpp"
#include "fowf/lpv/lpv.hpp"

namespace fowf::lpv {

struct LqrGain {
  MatrixXd k;
  CareResult care;
  MatrixXd closed_loop;  // A - B K
};

/// Plain LQR: u = -K x minimizing integral of x'Qx + u'Ru.
LqrGain lqr(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q, const MatrixXd& r);

struct PiLqrGain {
  double k_i = 0.0;          // gain on the integrated speed error
  std::vector<double> k_x;   // gains on the model states
  LqrGain lqr;
  MatrixXd a_aug, b_aug;
};

/// Integrator-augmented LQR. `m.c` row 0 is the regulated output whose
/// integral becomes the first augmented state; `q` is (n+1)x(n+1) over
/// [int e, x]; `r` weighs the single pitch input.
PiLqrGain design_pi_lqr(const LinearModel& m, const MatrixXd& q, double r);

/// Region-3 design model at (omega_design, wind): stiff drivetrain with the
/// Region-3 torque law, states [omega_r, surge, pitch, surge rate, pitch rate],
/// input beta, regulated output omega_r. The pitch trim is found by bisection.
LinearModel region3_design_model(const plant::TurbineParams& p, const plant::AeroSurfaces& s,
                                 const control::ControllerConfig& cfg, double omega_design,
                                 double wind_speed);

/// Highest frequency (rad/s) where |K (jwI - A)^-1 B| falls through 1, or 0
/// when the loop gain never exceeds 1 on [w_min, w_max].
double loop_crossover(const MatrixXd& a, const MatrixXd& b, const MatrixXd& k,
                      double w_min = 1e-4, double w_max = 1e2);

struct Region3DesignOptions {
  std::vector<double> breakpoints{12, 14, 16, 18, 20, 22, 24};
  double design_wind = 12.0;
  double omega_design = 1.2566370614359172;  // 12 rpm
  std::vector<double> q_diag{1.0, 1.0, 0.0, 0.0, 0.0, 1.0};  // [int e, omega, surge, pitch, surge rate, pitch rate]
  double r = 0.0;                 // <= 0: choose by the bandwidth line search
  double bandwidth_margin = 0.8;  // crossover <= margin * platform pitch frequency
};

struct Region3DesignPoint {
  double wind = 0.0;
  double crossover = 0.0;
  double riccati_residual = 0.0;
  double spectral_abscissa = 0.0;
};

struct Region3Design {
  control::Region3Schedule schedule;
  double r = 0.0;
  double pitch_frequency = 0.0;
  std::vector<Region3DesignPoint> points;
};

/// Chooses R at the design wind so the pitch-loop crossover sits below the
/// platform pitch frequency, then reuses (Q, R) at every breakpoint.
Region3Design synthesize_region3_schedule(const plant::TurbineParams& p,
                                          const plant::AeroSurfaces& s,
                                          const control::ControllerConfig& cfg,
                                          const Region3DesignOptions& opt = {});

}  // namespace fowf::lpv

namespace fowf::lpv {

/// Region-2 defaults: K_p = 0.5 (1 - nu_G), K_IT = 0.0625 (1 - nu_G), which
/// place both error-dynamics poles at -0.25 rad/s.
control::Region2Gains default_region2_gains(const plant::TurbineParams& p);

/// Turbine model with default Region-2 gains and a synthesized Region-3
/// schedule.
farm::TurbineModel build_turbine_model(const plant::TurbineParams& p,
                                       std::shared_ptr<const plant::AeroSurfaces> surfaces,
                                       const control::BlendConfig& blend = {},
                                       const Region3DesignOptions& opt = {});

}  // namespace fowf::lpv
