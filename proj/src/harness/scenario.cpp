#include "fowf/harness/scenario.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "fowf/csv.hpp"
#include "fowf/error.hpp"
#include "fowf/lpv/design.hpp"

namespace fowf::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve(const std::string& path, const std::string& base) {
  if (path.empty()) return path;
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base) / p).string();
}

template <class T>
void read(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

// Trailing mean over the last `n` pushed vectors.
class Window {
 public:
  explicit Window(std::size_t n) : n_(std::max<std::size_t>(n, 1)) {}
  void push(std::vector<double> v) {
    buf_.push_back(std::move(v));
    if (buf_.size() > n_) buf_.pop_front();
  }
  std::vector<double> mean() const {
    std::vector<double> m(buf_.front().size(), 0.0);
    for (const auto& v : buf_)
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += v[i];
    for (auto& x : m) x /= static_cast<double>(buf_.size());
    return m;
  }

 private:
  std::size_t n_;
  std::deque<std::vector<double>> buf_;
};

}  // namespace

void Scenario::validate() const {
  auto bad = [](const std::string& m) { throw ConfigError("harness", m); };
  if (version != kScenarioVersion) bad("unsupported scenario version " + std::to_string(version));
  layout.validate();
  if (!(dt > 0.0)) bad("dt must be positive");
  if (!(startup >= 0.0 && startup < duration)) bad("startup must lie in [0, duration)");
  if (!(averaging_window > 0.0)) bad("averaging_window must be positive");
  if (workers < 1) bad("workers must be at least 1");
  if (inflow.scale.size() != static_cast<std::size_t>(layout.columns))
    bad("need one inflow scale factor per column");
  for (double f : inflow.scale)
    if (!(f > 0.0)) bad("inflow scale factors must be positive");
  if (inflow.kind == InflowSource::Kind::kCsv && inflow.files.size() != static_cast<std::size_t>(layout.columns))
    bad("need one inflow file per column");
  const double obs = mpc.predictor_dt / dt;
  if (std::abs(obs - std::round(obs)) > 1e-9) bad("predictor dt must be a multiple of dt");
  const double upd = mpc.update_interval / mpc.predictor_dt;
  if (std::abs(upd - std::round(upd)) > 1e-9) bad("update interval must be a multiple of the predictor dt");
  if (!(nominal_rpm >= mpc.omega_min_rpm && nominal_rpm <= mpc.omega_max_rpm))
    bad("nominal_rpm must lie within the command bounds");
  mpc.validate();
  wake.validate();
  params.validate();
  blend.validate();
}

Scenario scenario_from_json(const json& j, const std::string& base_dir) {
  Scenario s;
  read(j, "version", s.version);
  if (s.version != kScenarioVersion)
    throw ConfigError("harness", "unsupported scenario version " + std::to_string(s.version));
  read(j, "name", s.name);
  read(j, "duration", s.duration);
  read(j, "startup", s.startup);
  read(j, "dt", s.dt);
  read(j, "nominal_rpm", s.nominal_rpm);
  read(j, "averaging_window", s.averaging_window);
  read(j, "seed", s.seed);
  read(j, "workers", s.workers);
  if (j.contains("controller")) s.mpc.predictor = mpc::predictor_from_string(j.at("controller").get<std::string>());
  if (j.contains("layout")) {
    const auto& l = j.at("layout");
    read(l, "rows", s.layout.rows);
    read(l, "columns", s.layout.columns);
    read(l, "spacing", s.layout.spacing);
  }
  s.inflow.scale.assign(static_cast<std::size_t>(s.layout.columns), 1.0);
  s.inflow.synth.duration = s.duration;
  s.regulation.synth.duration = s.duration;
  if (j.contains("inflow")) {
    const auto& in = j.at("inflow");
    const std::string type = in.value("type", "synthetic");
    if (type == "synthetic") {
      s.inflow.kind = InflowSource::Kind::kSynthetic;
    } else if (type == "csv") {
      s.inflow.kind = InflowSource::Kind::kCsv;
      for (const auto& f : in.at("files")) s.inflow.files.push_back(resolve(f.get<std::string>(), base_dir));
    } else {
      throw ConfigError("harness", "inflow type must be 'synthetic' or 'csv'");
    }
    read(in, "mean", s.inflow.synth.mean);
    read(in, "ti", s.inflow.synth.ti);
    read(in, "cutoff", s.inflow.synth.cutoff);
    read(in, "lateral_ratio", s.inflow.synth.lateral_ratio);
    read(in, "vertical_ratio", s.inflow.synth.vertical_ratio);
    read(in, "sample_dt", s.inflow.synth.dt);
    read(in, "scale", s.inflow.scale);
  }
  if (j.contains("regulation")) {
    const auto& r = j.at("regulation");
    const std::string type = r.value("type", "synthetic");
    if (type == "synthetic") {
      s.regulation.kind = RegulationSource::Kind::kSynthetic;
    } else if (type == "csv") {
      s.regulation.kind = RegulationSource::Kind::kCsv;
      s.regulation.file = resolve(r.at("file").get<std::string>(), base_dir);
    } else if (type == "hold") {
      s.regulation.kind = RegulationSource::Kind::kHold;
    } else {
      throw ConfigError("harness", "regulation type must be 'synthetic', 'csv' or 'hold'");
    }
    read(r, "time_constant", s.regulation.synth.time_constant);
    read(r, "period", s.regulation.synth.period);
    read(r, "amplitude", s.regulation.synth.amplitude);
    read(r, "mean", s.regulation.synth.mean);
  }
  if (j.contains("mpc")) {
    const auto& m = j.at("mpc");
    read(m, "horizon", s.mpc.horizon);
    read(m, "horizons", s.mpc.horizons);
    read(m, "q_e", s.mpc.q_e);
    read(m, "q_omega", s.mpc.q_omega);
    read(m, "omega_min_rpm", s.mpc.omega_min_rpm);
    read(m, "omega_max_rpm", s.mpc.omega_max_rpm);
    read(m, "update_interval", s.mpc.update_interval);
    read(m, "predictor_dt", s.mpc.predictor_dt);
    read(m, "max_iterations", s.mpc.optimizer.max_iterations);
    read(m, "gradient_step", s.mpc.optimizer.gradient_step);
    read(m, "tolerance", s.mpc.optimizer.tolerance);
    read(m, "memory", s.mpc.optimizer.memory);
  }
  if (j.contains("wake")) {
    const auto& w = j.at("wake");
    read(w, "dx", s.wake.dx);
    read(w, "gaussian_width", s.wake.gaussian_width);
    read(w, "k_w", s.wake.k_w);
    read(w, "expansion_decay", s.wake.expansion_decay);
    read(w, "extra_decay", s.wake.extra_decay);
    read(w, "super_gaussian_order", s.wake.super_gaussian_order);
    read(w, "upstream_margin", s.wake.upstream_margin);
    read(w, "downstream_margin", s.wake.downstream_margin);
  }
  if (j.contains("turbine")) {
    const auto& t = j.at("turbine");
    if (t.contains("params_file")) s.params_file = resolve(t.at("params_file").get<std::string>(), base_dir);
    if (t.contains("params")) s.params = plant::turbine_params_from_json(t.at("params"));
    if (t.contains("aero_file")) s.aero_file = resolve(t.at("aero_file").get<std::string>(), base_dir);
    if (t.contains("blend")) s.blend = control::blend_from_json(t.at("blend"));
    if (t.contains("region2")) {
      GainOverride g;
      read(t.at("region2"), "k_p", g.k_p);
      read(t.at("region2"), "k_it", g.k_it);
      s.region2 = g;
    }
    if (t.contains("schedule_file")) s.schedule_file = resolve(t.at("schedule_file").get<std::string>(), base_dir);
  }
  if (!s.params_file.empty()) s.params = plant::load_turbine_params(s.params_file);
  if (j.contains("lpv_dir")) s.lpv_dir = resolve(j.at("lpv_dir").get<std::string>(), base_dir);
  s.mpc.optimizer.workers = s.workers;
  s.validate();
  return s;
}

json to_json(const Scenario& s) {
  json j;
  j["version"] = s.version;
  j["name"] = s.name;
  j["duration"] = s.duration;
  j["startup"] = s.startup;
  j["dt"] = s.dt;
  j["nominal_rpm"] = s.nominal_rpm;
  j["averaging_window"] = s.averaging_window;
  j["seed"] = s.seed;
  j["workers"] = s.workers;
  j["controller"] = mpc::to_string(s.mpc.predictor);
  j["layout"] = {{"rows", s.layout.rows}, {"columns", s.layout.columns}, {"spacing", s.layout.spacing}};
  json in{{"scale", s.inflow.scale}};
  if (s.inflow.kind == InflowSource::Kind::kCsv) {
    in["type"] = "csv";
    in["files"] = s.inflow.files;
  } else {
    in["type"] = "synthetic";
    in["mean"] = s.inflow.synth.mean;
    in["ti"] = s.inflow.synth.ti;
    in["cutoff"] = s.inflow.synth.cutoff;
    in["lateral_ratio"] = s.inflow.synth.lateral_ratio;
    in["vertical_ratio"] = s.inflow.synth.vertical_ratio;
    in["sample_dt"] = s.inflow.synth.dt;
  }
  j["inflow"] = in;
  json r{{"amplitude", s.regulation.synth.amplitude}, {"mean", s.regulation.synth.mean}};
  switch (s.regulation.kind) {
    case RegulationSource::Kind::kSynthetic:
      r["type"] = "synthetic";
      r["time_constant"] = s.regulation.synth.time_constant;
      r["period"] = s.regulation.synth.period;
      break;
    case RegulationSource::Kind::kCsv:
      r["type"] = "csv";
      r["file"] = s.regulation.file;
      break;
    case RegulationSource::Kind::kHold:
      r["type"] = "hold";
      break;
  }
  j["regulation"] = r;
  j["mpc"] = {{"horizon", s.mpc.horizon},
              {"horizons", s.mpc.horizons},
              {"q_e", s.mpc.q_e},
              {"q_omega", s.mpc.q_omega},
              {"omega_min_rpm", s.mpc.omega_min_rpm},
              {"omega_max_rpm", s.mpc.omega_max_rpm},
              {"update_interval", s.mpc.update_interval},
              {"predictor_dt", s.mpc.predictor_dt},
              {"max_iterations", s.mpc.optimizer.max_iterations},
              {"gradient_step", s.mpc.optimizer.gradient_step},
              {"tolerance", s.mpc.optimizer.tolerance},
              {"memory", s.mpc.optimizer.memory}};
  j["wake"] = {{"dx", s.wake.dx},
               {"gaussian_width", s.wake.gaussian_width},
               {"k_w", s.wake.k_w},
               {"expansion_decay", s.wake.expansion_decay},
               {"extra_decay", s.wake.extra_decay},
               {"super_gaussian_order", s.wake.super_gaussian_order},
               {"upstream_margin", s.wake.upstream_margin},
               {"downstream_margin", s.wake.downstream_margin}};
  json t{{"params", plant::to_json(s.params)}, {"blend", {{"k_s", s.blend.k_s}, {"u_0", s.blend.u_0}}}};
  if (!s.aero_file.empty()) t["aero_file"] = s.aero_file;
  if (s.region2) t["region2"] = {{"k_p", s.region2->k_p}, {"k_it", s.region2->k_it}};
  if (!s.schedule_file.empty()) t["schedule_file"] = s.schedule_file;
  j["turbine"] = t;
  if (!s.lpv_dir.empty()) j["lpv_dir"] = s.lpv_dir;
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("harness", "cannot open scenario '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("harness", "scenario '" + path + "': " + e.what());
  }
  try {
    return scenario_from_json(j, fs::path(path).parent_path().string());
  } catch (const json::exception& e) {
    throw ConfigError("harness", "scenario '" + path + "': " + e.what());
  }
}

PreparedModels prepare_models(const Scenario& s, bool need_grid) {
  std::shared_ptr<const plant::AeroSurfaces> surfaces;
  if (s.aero_file.empty()) {
    surfaces = std::make_shared<plant::AeroSurfaces>(plant::make_default_surfaces());
  } else {
    surfaces = std::make_shared<plant::AeroSurfaces>(plant::load_aero_csv(s.aero_file));
  }
  PreparedModels m;
  if (s.schedule_file.empty()) {
    m.truth = lpv::build_turbine_model(s.params, surfaces, s.blend);
  } else {
    m.truth.params = s.params;
    m.truth.surfaces = surfaces;
    m.truth.controller.region2 = lpv::default_region2_gains(s.params);
    m.truth.controller.blend = s.blend;
    m.truth.controller.region3 = control::load_schedule_csv(s.schedule_file);
  }
  if (s.region2) m.truth.controller.region2 = control::Region2Gains::make(s.region2->k_it, s.region2->k_p, s.params);
  m.stiff = m.truth;
  m.stiff.params.drivetrain = plant::DrivetrainMode::kStiff;
  if (need_grid) {
    if (!s.lpv_dir.empty()) {
      m.grid = std::make_shared<lpv::LpvGrid>(lpv::load_lpv_grid(s.lpv_dir));
    } else {
      m.grid = std::make_shared<lpv::LpvGrid>(
          lpv::build_lpv_grid(m.stiff, lpv::default_omega_nodes(), lpv::default_wind_nodes(), s.workers));
    }
  }
  return m;
}

control::GainCheck check_gains(const Scenario& s, const farm::TurbineModel& m) {
  return control::check_region2_gains(m.controller.region2, m.aero(), m.params,
                                      {mpc::rpm_to_rad(s.mpc.omega_min_rpm), mpc::rpm_to_rad(s.mpc.omega_max_rpm)},
                                      {4.0, 26.0});
}

InflowBoundary build_inflow(const Scenario& s) {
  InflowBoundary b;
  if (s.inflow.kind == InflowSource::Kind::kCsv) {
    b = ingest_inflow(s.inflow.files, s.inflow.scale);
  } else {
    auto spec = s.inflow.synth;
    spec.duration = std::max(spec.duration, s.duration);
    b = synth_boundary(spec, s.inflow.scale, s.seed);
  }
  b.check_covers(s.duration);
  return b;
}

RawRegulation build_regulation(const Scenario& s) {
  switch (s.regulation.kind) {
    case RegulationSource::Kind::kCsv:
      return read_regd_csv(s.regulation.file);
    case RegulationSource::Kind::kHold:
      return RawRegulation{{0.0}, {0.0}};
    case RegulationSource::Kind::kSynthetic:
    default: {
      auto spec = s.regulation.synth;
      spec.duration = std::max(spec.duration, s.duration - s.startup);
      return synth_regd(spec, s.seed + 7);
    }
  }
}

RunOutput run_scenario(const Scenario& s) {
  return run_scenario(s, prepare_models(s, s.mpc.predictor == mpc::PredictorKind::kLpvDelay));
}

RunOutput run_scenario(const Scenario& s, const PreparedModels& models) {
  s.validate();
  const auto wall0 = std::chrono::steady_clock::now();
  const auto inflow = build_inflow(s);
  const auto regd = build_regulation(s);
  const auto raw_norm = [&](double t) { return std::clamp(regd.at(t), -1.0, 1.0); };

  const int nt = s.layout.turbines();
  const auto nsteps = static_cast<std::size_t>(std::lround(s.duration / s.dt));
  const auto obs_every = static_cast<std::size_t>(std::lround(s.mpc.predictor_dt / s.dt));

  farm::FarmModel farm(models.truth, s.wake, s.layout);
  std::vector<double> omega_c(static_cast<std::size_t>(nt), mpc::rpm_to_rad(s.nominal_rpm));
  farm.initialize(inflow.at(0.0), omega_c);

  std::unique_ptr<mpc::Predictor> predictor;
  if (s.mpc.predictor == mpc::PredictorKind::kLpvDelay) {
    if (!models.grid) throw ConfigError("harness", "LPV grid missing for the lpvtd controller");
    predictor = std::make_unique<mpc::LpvDelayPredictor>(*models.grid, s.layout, s.wake, models.stiff.params,
                                                         s.mpc.predictor_dt);
  } else {
    predictor = std::make_unique<mpc::NonlinearPredictor>(models.stiff, s.layout);
  }
  auto mpc_cfg = s.mpc;
  mpc_cfg.optimizer.workers = s.workers;
  mpc::RecedingHorizonController controller(std::move(predictor), mpc_cfg, nt);

  RunOutput out;
  out.time.reserve(nsteps + 1);
  out.turbines.assign(static_cast<std::size_t>(nt), {});
  const auto window = static_cast<std::size_t>(std::lround(s.averaging_window / s.mpc.predictor_dt));
  Window w_free(window), w_inflow(window), w_ct(window), w_tp(window);
  std::vector<std::size_t> region2(static_cast<std::size_t>(nt), 0);
  std::size_t post = 0;
  double next_update = s.startup;
  double held_setpoint = -1.0;
  Window w_power(window);

  auto record = [&](double t, const farm::FarmSample& fs, double sp) {
    out.time.push_back(t);
    out.farm_power.push_back(fs.power);
    out.setpoint.push_back(sp);
    const bool scoring = t >= s.startup - 1e-9;
    if (scoring) ++post;
    for (int i = 0; i < nt; ++i) {
      const auto& ts = fs.turbines[static_cast<std::size_t>(i)];
      auto& se = out.turbines[static_cast<std::size_t>(i)];
      se.omega_r.push_back(ts.out.omega_r);
      se.omega_c.push_back(omega_c[static_cast<std::size_t>(i)]);
      se.beta.push_back(ts.out.beta);
      se.torque.push_back(ts.out.torque);
      se.power.push_back(ts.out.power);
      se.hub_wind.push_back(ts.inflow);
      se.weight.push_back(ts.out.weight);
      if (ts.inflow_floored) ++out.floored_inflow_samples;
      if (scoring && ts.out.weight < 0.5) ++region2[static_cast<std::size_t>(i)];
    }
  };

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * s.dt;
    const auto fw = inflow.at(t);
    double sp = s.regulation.synth.mean;
    if (t >= s.startup - 1e-9) {
      if (s.regulation.kind == RegulationSource::Kind::kHold) {
        sp = held_setpoint;
      } else {
        sp = s.regulation.synth.mean + s.regulation.synth.amplitude * raw_norm(t - s.startup);
      }
    }

    if (k % obs_every == 0) {
      const auto fs = farm.sample(fw, omega_c);
      std::vector<double> free, u, ct, tp;
      for (const auto& c : fw) {
        free.push_back(c.u);
        free.push_back(c.v);
        free.push_back(c.w);
      }
      for (const auto& ts : fs.turbines) {
        u.push_back(ts.inflow);
        ct.push_back(ts.out.ct);
        tp.push_back(ts.out.power);
      }
      w_free.push(free);
      w_inflow.push(u);
      w_ct.push(ct);
      w_tp.push(tp);
      w_power.push({fs.power * 1e-6});
      mpc::FarmSnapshot lite;
      lite.time = t;
      lite.inflow = u;
      lite.ct = ct;
      controller.observe(lite, s.mpc.predictor_dt);

      if (t >= next_update - 1e-9) {
        if (s.regulation.kind == RegulationSource::Kind::kHold && held_setpoint < 0.0) {
          held_setpoint = w_power.mean()[0];
          sp = held_setpoint;
        }
        mpc::FarmSnapshot snap;
        snap.time = t;
        snap.turbines = farm.states();
        snap.wakes = farm.wakes();
        const auto fm = w_free.mean();
        for (int c = 0; c < s.layout.columns; ++c)
          snap.freestream.push_back({fm[3 * static_cast<std::size_t>(c)], fm[3 * static_cast<std::size_t>(c) + 1],
                                     fm[3 * static_cast<std::size_t>(c) + 2]});
        snap.inflow = w_inflow.mean();
        snap.ct = w_ct.mean();
        snap.power = w_tp.mean();
        snap.omega_c = omega_c;
        try {
          omega_c = controller.update(snap, sp);
        } catch (const Error& e) {
          std::ostringstream os;
          os << "t = " << t << " s: " << e.what();
          throw SolverError("harness", os.str());
        }
        next_update += s.mpc.update_interval;
      }
    }

    if (k == nsteps) {
      record(t, farm.sample(fw, omega_c), sp * 1e6);
      break;
    }
    farm::FarmSample fs;
    try {
      fs = farm.step(fw, omega_c, s.dt);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "t = " << t << " s: " << e.what();
      throw DivergenceError("harness", os.str());
    }
    record(t, fs, sp * 1e6);
  }

  out.telemetry = controller.telemetry();
  for (const auto& tl : out.telemetry) out.solve_wall_time += tl.wall_time;
  out.region2_fraction.resize(static_cast<std::size_t>(nt));
  for (int i = 0; i < nt; ++i)
    out.region2_fraction[static_cast<std::size_t>(i)] =
        post ? static_cast<double>(region2[static_cast<std::size_t>(i)]) / static_cast<double>(post) : 0.0;

  // score on the post-startup window, 10 s means
  std::vector<double> gen_mw(out.farm_power.size()), sp_mw(out.setpoint.size());
  for (std::size_t i = 0; i < gen_mw.size(); ++i) {
    gen_mw[i] = out.farm_power[i] * 1e-6;
    sp_mw[i] = out.setpoint[i] * 1e-6;
  }
  const double period = 10.0;
  const double span = std::floor((s.duration - s.startup) / period + 1e-9) * period;
  out.pair.start = s.startup;
  out.pair.period = period;
  out.pair.p_gen = pjm::resample_mean(out.time, gen_mw, s.startup, s.startup + span, period);
  out.pair.p_sp = pjm::resample_mean(out.time, sp_mw, s.startup, s.startup + span, period);
  out.scorecard = pjm::composite_score(out.pair);
  out.run_wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return out;
}

void write_run_output(const std::string& dir, const Scenario& s, const RunOutput& out, int stride) {
  fs::create_directories(dir);
  const fs::path d(dir);
  stride = std::max(stride, 1);
  {
    std::ofstream f(d / "series.csv");
    if (!f) throw IoError("harness", "cannot write '" + (d / "series.csv").string() + "'");
    f << "time_s,farm_power_mw,setpoint_mw";
    for (std::size_t i = 0; i < out.turbines.size(); ++i)
      f << ",t" << i << "_omega_r_rpm,t" << i << "_omega_c_rpm,t" << i << "_beta_deg,t" << i << "_torque_knm,t" << i
        << "_power_mw,t" << i << "_hub_wind,t" << i << "_weight";
    f << '\n' << std::setprecision(9);
    for (std::size_t k = 0; k < out.time.size(); k += static_cast<std::size_t>(stride)) {
      f << out.time[k] << ',' << out.farm_power[k] * 1e-6 << ',' << out.setpoint[k] * 1e-6;
      for (const auto& t : out.turbines)
        f << ',' << mpc::rad_to_rpm(t.omega_r[k]) << ',' << mpc::rad_to_rpm(t.omega_c[k]) << ','
          << t.beta[k] * 180.0 / M_PI << ',' << t.torque[k] * 1e-3 << ',' << t.power[k] * 1e-6 << ','
          << t.hub_wind[k] << ',' << t.weight[k];
      f << '\n';
    }
  }
  pjm::write_power_pair((d / "pair.csv").string(), out.pair);
  mpc::write_telemetry_csv((d / "telemetry.csv").string(), out.telemetry);
  pjm::write_scorecard((d / "scorecard.json").string(), (d / "intervals.csv").string(), out.scorecard);
  json summary{{"scenario", s.name},
               {"controller", mpc::to_string(s.mpc.predictor)},
               {"composite", out.scorecard.composite},
               {"composite_clamped", out.scorecard.composite_clamped},
               {"precision", out.scorecard.s_p},
               {"pass", out.scorecard.pass},
               {"solves", out.telemetry.size()},
               {"solve_wall_time_s", out.solve_wall_time},
               {"run_wall_time_s", out.run_wall_time},
               {"floored_inflow_samples", out.floored_inflow_samples},
               {"region2_fraction", out.region2_fraction}};
  std::ofstream js(d / "summary.json");
  js << summary.dump(2) << '\n';
  std::ofstream sc(d / "scenario.json");
  sc << to_json(s).dump(2) << '\n';
}

}  // namespace fowf::harness
