#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fowf/farm/farm.hpp"
#include "fowf/harness/inflow.hpp"
#include "fowf/mpc/mpc.hpp"
#include "fowf/pjm/score.hpp"

namespace fowf::harness {

constexpr int kScenarioVersion = 1;

struct InflowSource {
  enum class Kind { kSynthetic, kCsv } kind = Kind::kSynthetic;
  SynthSpec synth;
  std::vector<std::string> files;  // one per column for kCsv
  std::vector<double> scale{1.0, 1.0};
};

struct RegulationSource {
  /// kHold: setpoint fixed at the farm power measured at the end of startup.
  enum class Kind { kSynthetic, kCsv, kHold } kind = Kind::kSynthetic;
  RegulationSpec synth;
  std::string file;
};

/// Region-2 gains replacing the defaults.
struct GainOverride {
  double k_p = 0.0;   // 1/s
  double k_it = 0.0;  // 1/s^2
};

struct Scenario {
  int version = kScenarioVersion;
  std::string name = "desk";
  farm::Layout layout;
  InflowSource inflow;
  RegulationSource regulation;
  mpc::MpcConfig mpc;
  wake::WakeConfig wake;
  plant::TurbineParams params;
  std::string params_file;  // optional, overrides params
  std::string aero_file;    // optional aero table CSV
  control::BlendConfig blend;
  std::optional<GainOverride> region2;
  std::string schedule_file;  // optional Region-3 schedule CSV, otherwise synthesized
  std::string lpv_dir;      // optional prebuilt grid; otherwise built in-process
  double duration = 2900.0;
  double startup = 500.0;
  double dt = 0.05;
  double nominal_rpm = 11.0;
  double averaging_window = 30.0;  // s, freestream and inflow averages handed to the MPC
  std::uint64_t seed = 1;
  int workers = 1;

  void validate() const;
};

Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
nlohmann::json to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

struct TurbineSeries {
  std::vector<double> omega_r, omega_c, beta, torque, power, hub_wind, weight;
};

struct RunOutput {
  std::vector<double> time;
  std::vector<TurbineSeries> turbines;
  std::vector<double> farm_power;  // W
  std::vector<double> setpoint;    // W
  std::vector<mpc::SolveTelemetry> telemetry;
  pjm::PowerPair pair;             // MW, 10 s, post-startup
  pjm::Scorecard scorecard;
  double solve_wall_time = 0.0;    // s, summed over MPC solves
  double run_wall_time = 0.0;
  int floored_inflow_samples = 0;
  int clamped_thrust_steps = 0;
  /// Fraction of post-startup samples with s < 0.5, per turbine.
  std::vector<double> region2_fraction;
};

/// Everything a run needs that is built once: turbine model, LPV grid.
struct PreparedModels {
  farm::TurbineModel truth;  // two-mass drivetrain
  farm::TurbineModel stiff;  // predictor plant
  std::shared_ptr<const lpv::LpvGrid> grid;
};

PreparedModels prepare_models(const Scenario& s, bool need_grid);

/// Region-2 gain condition over the command box and winds of 4 to 26 m/s.
control::GainCheck check_gains(const Scenario& s, const farm::TurbineModel& m);

InflowBoundary build_inflow(const Scenario& s);
RawRegulation build_regulation(const Scenario& s);

RunOutput run_scenario(const Scenario& s, const PreparedModels& models);
RunOutput run_scenario(const Scenario& s);

/// series.csv (every `stride` samples), pair.csv, telemetry.csv,
/// scorecard.json, intervals.csv and summary.json into `dir`.
void write_run_output(const std::string& dir, const Scenario& s, const RunOutput& out, int stride = 20);

}  // namespace fowf::harness
