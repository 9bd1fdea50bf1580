// Acceptance checks. One line per criterion: PASS/FAIL, measured value, tolerance.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "CLI11.hpp"
#include "fowf/control/controller.hpp"
#include "fowf/farm/closed_loop.hpp"
#include "fowf/harness/scenario.hpp"
#include "fowf/lpv/design.hpp"
#include "fowf/lpv/linalg.hpp"
#include "fowf/mpc/mpc.hpp"
#include "fowf/pjm/score.hpp"
#include "fowf/wake/wake.hpp"

using namespace fowf;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kScoreTol = 1e-12;
constexpr double kScoreRuntime = 1.0;       // s
constexpr double kConvergeTol = 1e-3;       // rad/s
constexpr double kConvergeHorizon = 300.0;  // s
constexpr double kConvergeRuntime = 30.0;   // s
constexpr double kSigmoidTol = 1e-5;
constexpr double kSigmoidExpected = 0.92414;
constexpr double kPdeRatio = 1.8;
constexpr double kPdeRuntime = 60.0;
constexpr double kDelayTol = 1e-6;
constexpr double kRiccatiTol = 1e-8;
constexpr double kScalarGainTol = 1e-9;
constexpr double kScanCostTol = 1e-3;
constexpr double kMpcToyRuntime = 300.0;
constexpr double kCompositeBar = 0.75;
constexpr double kSpeedRatio = 1.5;
constexpr double kRunBudget = 7200.0;  // s per controller

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void skip(int id, const std::string& name, const std::string& why) {
  std::printf("[SKIP] %2d %s: %s\n", id, name.c_str(), why.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Independent correlation and delay-score oracles.
double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double a = 0.0, b = 0.0, c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    a += (x[i] - mx) * (y[i] - my);
    b += (x[i] - mx) * (x[i] - mx);
    c += (y[i] - my) * (y[i] - my);
  }
  return a / std::sqrt(b * c);
}

pjm::PowerPair noise_pair(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  pjm::PowerPair p;
  p.start = 0.0;
  p.period = 10.0;
  for (int i = 0; i < n; ++i) p.p_sp.push_back(30.0 + 3.0 * d(rng));
  return p;
}

// 1
void criterion_scoring() {
  const auto t0 = std::chrono::steady_clock::now();
  harness::RegulationSpec spec;
  spec.duration = 2400.0;
  const auto raw = harness::synth_regd(spec, 17);
  std::vector<double> rv;
  for (double t = 0.0; t < 2400.0 - 1e-9; t += 10.0) rv.push_back(raw.at(t));
  pjm::PowerPair perfect;
  perfect.period = 10.0;
  perfect.p_sp = pjm::normalize_regd_signal(rv).values;
  perfect.p_gen = perfect.p_sp;
  const auto card = pjm::composite_score(perfect);

  pjm::PowerPair offset;
  offset.period = 10.0;
  offset.p_sp.assign(240, 30.0);
  offset.p_gen.assign(240, 27.0);
  const double sp = pjm::precision_score(offset);
  const double rt = seconds_since(t0);
  const bool pass = std::abs(card.composite - 1.0) <= kScoreTol && std::abs(sp - 0.9) <= kScoreTol &&
                    rt < kScoreRuntime;
  report(1, "PJM scoring exactness", pass,
         fmt("composite %.15f, S_P(offset) %.15f, tol %.0e, %.3f s (< %.0f s)", card.composite, sp, kScoreTol, rt,
             kScoreRuntime));
}

// 2
void criterion_delta_star() {
  const auto t0 = std::chrono::steady_clock::now();
  const pjm::ScoreConfig cfg;
  auto pair = noise_pair(90, 23);
  pair.p_gen.resize(pair.p_sp.size());
  pair.p_gen[0] = pair.p_sp[0];
  for (std::size_t i = 1; i < pair.p_sp.size(); ++i) pair.p_gen[i] = pair.p_sp[i - 1];  // 10 s lag
  const auto got = pjm::find_delta_star(pair, 0, cfg);

  double best = -1e300, arg = -1.0;
  const std::vector<double> sp(pair.p_sp.begin(), pair.p_sp.begin() + 30);
  for (int k = 0; k <= 30; ++k) {
    const std::vector<double> g(pair.p_gen.begin() + k, pair.p_gen.begin() + k + 30);
    const double d = 10.0 * k;
    const double v = std::abs((d - 300.0) / 300.0) + pearson(g, sp);
    if (v > best) {
      best = v;
      arg = d;
    }
  }

  auto zero = noise_pair(90, 29);
  zero.p_gen = zero.p_sp;
  const auto z = pjm::find_delta_star(zero, 0, cfg);
  const double rt = seconds_since(t0);
  const bool pass = got.delta_star == arg && z.delta_star == 0.0 && z.s_d == 1.0 && rt < kScoreRuntime;
  report(2, "delta* recovery", pass,
         fmt("lagged: delta* %.0f s vs scan %.0f s; zero lag: delta* %.0f s, S_D %.3f; %.3f s", got.delta_star, arg,
             z.delta_star, z.s_d, rt));
}

// 3
void criterion_region2(const std::string& cli) {
  const auto t0 = std::chrono::steady_clock::now();
  plant::TurbineParams p;
  p.drivetrain = plant::DrivetrainMode::kStiff;
  control::BlendConfig pure2;
  pure2.u_0 = 1000.0;
  const auto surfaces = std::make_shared<const plant::AeroSurfaces>(plant::make_default_surfaces());
  const auto m = lpv::build_turbine_model(p, surfaces, pure2);
  const auto chk = control::check_region2_gains(m.controller.region2, m.aero(), p,
                                                {mpc::rpm_to_rad(8.0), mpc::rpm_to_rad(12.0)}, {4.0, 26.0});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> omega(mpc::rpm_to_rad(8.0), mpc::rpm_to_rad(12.0)), wind(7.0, 10.0),
      ie(-2.0, 2.0);
  double worst = 0.0;
  const double dt = 0.05;
  const int steps = static_cast<int>(kConvergeHorizon / dt);
  for (int trial = 0; trial < 10; ++trial) {
    const double u = wind(rng);
    auto x = farm::ClosedLoopState::initial(omega(rng), u, m);
    x.ctrl.int_e = ie(rng);
    // a step to each end of the command box, then back inside
    for (double oc : {mpc::rpm_to_rad(12.0), mpc::rpm_to_rad(8.0), omega(rng)}) {
      for (int k = 0; k < steps; ++k) x = farm::step_closed_loop(x, oc, {u, 0.0, 0.0}, dt, m);
      worst = std::max(worst, std::abs(x.plant.omega_r() - oc));
    }
  }

  // A gain 10x below the bound must be rejected by the validate command.
  bool flagged = false;
  std::string cli_note = "cli not run";
  if (!cli.empty() && fs::exists(cli)) {
    const auto dir = fs::temp_directory_path() / "fowf_acceptance";
    fs::create_directories(dir);
    harness::Scenario s;
    s.region2 = harness::GainOverride{0.1 * chk.min_k_p, m.controller.region2.k_it};
    const auto path = (dir / "low_gain.json").string();
    std::ofstream(path) << harness::to_json(s).dump(2);
    const auto log = (dir / "validate.log").string();
    const int rc = std::system((cli + " validate --scenario " + path + " > " + log + " 2>&1").c_str());
    const int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    flagged = code == 2 && ss.str().find("must exceed") != std::string::npos;
    cli_note = fmt("validate exit %d", code);
  } else {
    harness::Scenario s;
    s.region2 = harness::GainOverride{0.1 * chk.min_k_p, m.controller.region2.k_it};
    auto low = m;
    low.controller.region2 = control::Region2Gains::make(s.region2->k_it, s.region2->k_p, p);
    flagged = !harness::check_gains(s, low).pass;
    cli_note = "checked in-process";
  }
  const double rt = seconds_since(t0);
  const bool pass = chk.pass && worst < kConvergeTol && flagged && rt < kConvergeRuntime;
  report(3, "Region-2 convergence", pass,
         fmt("default gains %s (K_p %.4g > %.4g); worst |e| after %.0f s = %.2e (< %.0e); low gain flagged: %s (%s); "
             "%.1f s",
             chk.pass ? "pass" : "fail", m.controller.region2.k_p, chk.min_k_p, kConvergeHorizon, worst, kConvergeTol,
             flagged ? "yes" : "no", cli_note.c_str(), rt));
}

// 4
void criterion_sigmoid() {
  control::BlendConfig b;
  b.k_s = 5.0;
  b.u_0 = 11.5;
  const double mid = control::sigmoid_weight(11.5, b);
  const double v = control::sigmoid_weight(12.0, b);
  const double oracle = 1.0 / (1.0 + std::exp(-2.5));
  const bool pass = mid == 0.5 && std::abs(v - kSigmoidExpected) <= kSigmoidTol && std::abs(v - oracle) < 1e-15;
  report(4, "sigmoid values", pass, fmt("s(u_0) = %.17g, s(12) = %.7f (expected %.5f +- %.0e)", mid, v,
                                        kSigmoidExpected, kSigmoidTol));
}

// 5
double translation_error(double dx) {
  wake::WakeConfig c;
  c.dx = dx;
  c.expansion_decay = false;
  c.extra_decay = 0.0;
  c.upstream_margin = 0.0;
  c.downstream_margin = 2000.0;
  wake::WakeColumn col({0.0}, c);
  const double u = 10.0, sigma = 100.0, mu = 600.0, t_end = 60.0, dt = 0.5 * dx / u;
  auto g = [&](double x, double m) { return std::exp(-0.5 * (x - m) * (x - m) / (sigma * sigma)); };
  for (std::size_t k = 0; k < col.cells(); ++k) col.deficit(0)[k] = g(col.x()[k], mu);
  const int steps = static_cast<int>(std::lround(t_end / dt));
  for (int i = 0; i < steps; ++i) col.step({{u, 0.0}}, dt);
  double err = 0.0;
  for (std::size_t k = 0; k < col.cells(); ++k) {
    const double e = col.deficit(0)[k] - g(col.x()[k], mu + u * t_end);
    err += e * e * dx;
  }
  return std::sqrt(err);
}

void criterion_pde() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> err;
  for (double dx : {8.0, 4.0, 2.0, 1.0}) err.push_back(translation_error(dx));
  double worst = 1e300;
  std::string ratios;
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double r = err[i - 1] / err[i];
    worst = std::min(worst, r);
    ratios += fmt("%.3f ", r);
  }
  const double rt = seconds_since(t0);
  report(5, "wake PDE convergence", worst >= kPdeRatio && rt < kPdeRuntime,
         fmt("error ratios per dx halving (8->1 m): %s(>= %.1f); %.2f s", ratios.c_str(), kPdeRatio, rt));
}

// 6
void criterion_delay() {
  const double u = 8.0, kappa = 882.0, dt = 0.5;
  wake::DelayLine d;
  d.kappa = kappa;
  d.settle(0.0, u);
  const double tau = kappa / u;
  double y = 0.0;
  const int steps = static_cast<int>(std::ceil(10.0 * tau / dt));
  for (int i = 0; i < steps; ++i) y = wake::step_delay_line(d, 1.0, u, dt).zeta;
  const double gain_err = std::abs(y - 1.0);

  wake::DelayLine a, b;
  a.kappa = b.kappa = kappa;
  a.settle(0.5, u);
  b.settle(0.5, u);
  bool causal = true;
  for (int i = 0; i < 400; ++i) {
    const double za = wake::step_delay_line(a, 0.5, u, dt).zeta;
    const double zb = wake::step_delay_line(b, i < 200 ? 0.5 : 1.5, u, dt).zeta;
    if (i < 200 && za != zb) causal = false;
  }
  report(6, "delay line", gain_err <= kDelayTol && causal,
         fmt("|y(10 tau) - 1| = %.2e (<= %.0e); outputs identical before the input change: %s", gain_err, kDelayTol,
             causal ? "yes" : "no"));
}

// 7
void criterion_lqr() {
  plant::TurbineParams p;
  const auto surfaces = std::make_shared<const plant::AeroSurfaces>(plant::make_default_surfaces());
  auto m = lpv::build_turbine_model(p, surfaces);
  const auto d = lpv::synthesize_region3_schedule(p, *surfaces, m.controller);
  double worst_res = 0.0, worst_abs = -1e300;
  std::string winds;
  for (const auto& pt : d.points) {
    worst_res = std::max(worst_res, pt.riccati_residual);
    worst_abs = std::max(worst_abs, pt.spectral_abscissa);
    winds += fmt("%.0f ", pt.wind);
  }
  const lpv::MatrixXd one = lpv::MatrixXd::Ones(1, 1);
  const auto g = lpv::lqr(lpv::MatrixXd::Zero(1, 1), one, one, one);
  const double k_err = std::abs(g.k(0, 0) - 1.0);
  const bool pass = d.points.size() == 7 && worst_res < kRiccatiTol && worst_abs < 0.0 && k_err <= kScalarGainTol;
  report(7, "LQR synthesis", pass,
         fmt("breakpoints %s m/s: max residual %.2e (< %.0e), max Re(lambda) %.4f; scalar K error %.1e (<= %.0e)",
             winds.c_str(), worst_res, kRiccatiTol, worst_abs, k_err, kScalarGainTol));
}

// 8
mpc::FarmSnapshot snapshot(const farm::TurbineModel& model, const farm::Layout& layout, double u, double rpm) {
  farm::FarmModel f(model, wake::WakeConfig{}, layout);
  const std::vector<plant::WindVector> fw(static_cast<std::size_t>(layout.columns), plant::WindVector{u, 0.0, 0.0});
  std::vector<double> oc(static_cast<std::size_t>(layout.turbines()), mpc::rpm_to_rad(rpm));
  f.initialize(fw, oc);
  mpc::FarmSnapshot s;
  s.turbines = f.states();
  s.wakes = f.wakes();
  s.freestream = fw;
  for (const auto& t : f.sample(fw, oc).turbines) {
    s.inflow.push_back(t.inflow);
    s.ct.push_back(t.out.ct);
    s.power.push_back(t.out.power);
  }
  s.omega_c = oc;
  return s;
}

void criterion_mpc_toy() {
  const auto t0 = std::chrono::steady_clock::now();
  plant::TurbineParams p;
  p.drivetrain = plant::DrivetrainMode::kStiff;
  const auto m =
      lpv::build_turbine_model(p, std::make_shared<const plant::AeroSurfaces>(plant::make_default_surfaces()));
  mpc::MpcConfig cfg;
  cfg.horizons = 2;

  const farm::Layout one{1, 1, 882.0};
  const auto s1 = snapshot(m, one, 13.5, 11.0);
  mpc::NonlinearPredictor nl1(m, one);
  double best1 = std::numeric_limits<double>::infinity(), arg1 = 0.0;
  for (int k = 0; k <= 4000; ++k) {
    const double w = 8.0 + 0.001 * k;
    const double c = mpc::evaluate_plan(nl1, s1, mpc::CommandPlan::constant(1, 1, w), 3.0, cfg);
    if (c < best1) {
      best1 = c;
      arg1 = w;
    }
  }
  const auto sol1 = mpc::solve_mpc(nl1, s1, 3.0, cfg, mpc::CommandPlan::constant(1, 1, 11.0));
  const bool ok1 = sol1.cost <= best1 + kScanCostTol;

  const farm::Layout two{2, 1, 882.0};
  const auto s2 = snapshot(m, two, 13.5, 11.0);
  mpc::NonlinearPredictor nl2(m, two);
  const double h = 0.25;
  double best2 = std::numeric_limits<double>::infinity(), a0 = 0.0, a1 = 0.0;
  for (int a = 0; a <= 16; ++a)
    for (int b = 0; b <= 16; ++b) {
      auto plan = mpc::CommandPlan::constant(2, 1, 8.0);
      plan.at(0, 0) = 8.0 + h * a;
      plan.at(1, 0) = 8.0 + h * b;
      const double c = mpc::evaluate_plan(nl2, s2, plan, 6.0, cfg);
      if (c < best2) {
        best2 = c;
        a0 = plan.at(0, 0);
        a1 = plan.at(1, 0);
      }
    }
  const auto sol2 = mpc::solve_mpc(nl2, s2, 6.0, cfg, mpc::CommandPlan::constant(2, 1, 11.0));
  const bool ok2 = sol2.cost <= best2 && std::abs(sol2.at(0, 0) - a0) <= h && std::abs(sol2.at(1, 0) - a1) <= h;
  const double rt = seconds_since(t0);
  report(8, "MPC optimality on toy instances", ok1 && ok2 && rt < kMpcToyRuntime,
         fmt("1 turbine: %.4f rpm cost %.6f vs scan %.3f rpm cost %.6f (tol %.0e); 2 turbines: (%.3f, %.3f) cost %.5f "
             "vs grid (%.2f, %.2f) cost %.5f; %.1f s",
             sol1.at(0, 0), sol1.cost, arg1, best1, kScanCostTol, sol2.at(0, 0), sol2.at(1, 0), sol2.cost, a0, a1,
             best2, rt));
}

// 9 to 11
struct Run {
  harness::RunOutput out;
  double wall = 0.0;
};

Run run_one(harness::Scenario s, mpc::PredictorKind k, const harness::PreparedModels& models,
            const std::string& out_dir) {
  s.mpc.predictor = k;
  const auto t0 = std::chrono::steady_clock::now();
  Run r;
  r.out = harness::run_scenario(s, models);
  r.wall = seconds_since(t0);
  if (!out_dir.empty()) harness::write_run_output((fs::path(out_dir) / mpc::to_string(k)).string(), s, r.out);
  std::printf("       %s: composite %.4f (clamped %.4f), S_P %.4f, solves %zu, solve wall %.1f s, run wall %.1f s\n",
              mpc::to_string(k).c_str(), r.out.scorecard.composite, r.out.scorecard.composite_clamped,
              r.out.scorecard.s_p, r.out.telemetry.size(), r.out.solve_wall_time, r.wall);
  std::fflush(stdout);
  return r;
}

void criteria_end_to_end(const std::string& scenario_path, const std::string& out_dir, bool repeat) {
  const auto s = harness::load_scenario(scenario_path);
  std::printf("       scenario %s: %d x %d farm, %.0f s with %.0f s startup, update every %.0f s, %d iterations max\n",
              scenario_path.c_str(), s.layout.rows, s.layout.columns, s.duration, s.startup, s.mpc.update_interval,
              s.mpc.optimizer.max_iterations);
  const auto models = harness::prepare_models(s, true);
  const auto nl = run_one(s, mpc::PredictorKind::kNonlinear, models, out_dir);
  const auto lp = run_one(s, mpc::PredictorKind::kLpvDelay, models, out_dir);

  const auto& cn = nl.out.scorecard;
  const auto& cl = lp.out.scorecard;
  double region2 = 0.0;
  for (std::size_t i = 0; i < nl.out.region2_fraction.size(); ++i)
    if (i % static_cast<std::size_t>(s.layout.rows) != 0) region2 = std::max(region2, nl.out.region2_fraction[i]);
  report(9, "end-to-end desk scale", cn.composite_clamped >= kCompositeBar && cl.composite_clamped >= kCompositeBar &&
                                         nl.wall < kRunBudget && lp.wall < kRunBudget,
         fmt("NL-MPC %.4f, LPVTD-MPC %.4f (>= %.2f); downstream Region-2 fraction up to %.2f; wall %.0f / %.0f s",
             cn.composite_clamped, cl.composite_clamped, kCompositeBar, region2, nl.wall, lp.wall));

  const double ratio = nl.out.solve_wall_time / lp.out.solve_wall_time;
  report(10, "speed ordering", ratio >= kSpeedRatio,
         fmt("solve wall NL %.1f s, LPVTD %.1f s, ratio %.2f (>= %.1f)", nl.out.solve_wall_time,
             lp.out.solve_wall_time, ratio, kSpeedRatio));

  if (!repeat) {
    skip(11, "determinism", "repeat runs disabled");
    return;
  }
  const auto nl2 = run_one(s, mpc::PredictorKind::kNonlinear, models, "");
  const auto lp2 = run_one(s, mpc::PredictorKind::kLpvDelay, models, "");
  const bool same_nl = nl2.out.farm_power == nl.out.farm_power;
  const bool same_lp = lp2.out.farm_power == lp.out.farm_power;
  report(11, "determinism", same_nl && same_lp,
         fmt("bit-identical farm power: NL-MPC %s, LPVTD-MPC %s (seed %llu, %d workers)", same_nl ? "yes" : "no",
             same_lp ? "yes" : "no", static_cast<unsigned long long>(s.seed), s.workers));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string scenario = std::string(FOWF_SOURCE_DIR) + "/scenarios/desk.json";
  std::string cli = FOWF_CLI_PATH;
  std::string out_dir;
  bool quick = false, no_repeat = false;
  app.add_option("--scenario", scenario, "end-to-end scenario");
  app.add_option("--cli", cli, "path to the fowf executable");
  app.add_option("--out", out_dir, "write end-to-end run outputs here");
  app.add_flag("--quick", quick, "skip the end-to-end criteria");
  app.add_flag("--no-repeat", no_repeat, "skip the determinism repeats");
  CLI11_PARSE(app, argc, argv);

  const auto guard = [](int id, const std::string& name, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      report(id, name, false, std::string("threw: ") + e.what());
    }
  };
  guard(1, "PJM scoring exactness", criterion_scoring);
  guard(2, "delta* recovery", criterion_delta_star);
  guard(3, "Region-2 convergence", [&] { criterion_region2(cli); });
  guard(4, "sigmoid values", criterion_sigmoid);
  guard(5, "wake PDE convergence", criterion_pde);
  guard(6, "delay line", criterion_delay);
  guard(7, "LQR synthesis", criterion_lqr);
  guard(8, "MPC optimality on toy instances", criterion_mpc_toy);
  if (quick) {
    skip(9, "end-to-end desk scale", "--quick");
    skip(10, "speed ordering", "--quick");
    skip(11, "determinism", "--quick");
  } else {
    guard(9, "end-to-end desk scale", [&] { criteria_end_to_end(scenario, out_dir, !no_repeat); });
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
