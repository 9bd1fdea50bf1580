#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fowf/control/controller.hpp"
#include "fowf/error.hpp"
#include "fowf/harness/scenario.hpp"
#include "fowf/lpv/design.hpp"
#include "fowf/lpv/lpv.hpp"
#include "fowf/pjm/score.hpp"
#include "fowf/plant/aero.hpp"

using namespace fowf;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kInvalid = 2;

struct Common {
  std::string scenario;
  std::string controller;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

harness::Scenario load(const Common& c) {
  harness::Scenario s = c.scenario.empty() ? harness::Scenario{} : harness::load_scenario(c.scenario);
  if (!c.controller.empty()) s.mpc.predictor = mpc::predictor_from_string(c.controller);
  if (c.seed) s.seed = *c.seed;
  if (c.workers) {
    s.workers = *c.workers;
    s.mpc.optimizer.workers = *c.workers;
  }
  s.validate();
  return s;
}

int cmd_run(const Common& c, int stride) {
  const auto s = load(c);
  const std::string out = c.out.empty() ? "run_" + mpc::to_string(s.mpc.predictor) : c.out;
  const auto r = harness::run_scenario(s);
  harness::write_run_output(out, s, r, stride);
  std::printf("%s: composite %.4f (clamped %.4f) S_P %.4f %s; solve wall %.1f s; output in %s\n",
              mpc::to_string(s.mpc.predictor).c_str(), r.scorecard.composite, r.scorecard.composite_clamped,
              r.scorecard.s_p, r.scorecard.pass ? "PASS" : "FAIL", r.solve_wall_time, out.c_str());
  return kOk;
}

int cmd_score(const std::string& pair_path, const std::string& out) {
  const auto pair = pjm::read_power_pair(pair_path);
  const auto card = pjm::composite_score(pair);
  if (!out.empty()) {
    fs::create_directories(out);
    pjm::write_scorecard((fs::path(out) / "scorecard.json").string(), (fs::path(out) / "intervals.csv").string(),
                         card);
  }
  std::cout << pjm::scorecard_json(card) << '\n';
  return kOk;
}

int cmd_build_lpv(const Common& c) {
  const auto s = load(c);
  const std::string out = c.out.empty() ? "lpv_grid" : c.out;
  const auto m = harness::prepare_models(s, false);
  const auto g = lpv::build_lpv_grid(m.stiff, lpv::default_omega_nodes(), lpv::default_wind_nodes(), s.workers);
  lpv::save_lpv_grid(g, out);
  std::printf("wrote %zu x %zu lattice to %s\n", g.omega_nodes.size(), g.wind_nodes.size(), out.c_str());
  return kOk;
}

int cmd_design_gains(const Common& c) {
  const auto s = load(c);
  const std::string out = c.out.empty() ? "region3_schedule.csv" : c.out;
  const auto m = harness::prepare_models(s, false);
  const auto d = lpv::synthesize_region3_schedule(m.truth.params, m.truth.aero(), m.truth.controller);
  control::save_schedule_csv(d.schedule, out);
  std::printf("R = %.6g, platform pitch frequency %.4f rad/s\n", d.r, d.pitch_frequency);
  std::printf("%8s %12s %14s %14s\n", "wind", "crossover", "residual", "abscissa");
  for (const auto& p : d.points)
    std::printf("%8.2f %12.5f %14.3e %14.5f\n", p.wind, p.crossover, p.riccati_residual, p.spectral_abscissa);
  std::printf("schedule written to %s\n", out.c_str());
  return kOk;
}

int cmd_validate(const Common& c) {
  harness::Scenario s;
  harness::PreparedModels m;
  try {
    s = load(c);
    m = harness::prepare_models(s, false);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "invalid: %s\n", e.what());
    return kInvalid;
  }
  const auto chk = harness::check_gains(s, m.truth);
  const auto& g = m.truth.controller.region2;
  std::printf("Region-2 K_p = %.6g, K_IT = %.6g\n", g.k_p, g.k_it);
  std::printf("Lipschitz estimate L = %.6g N m s, bound (1 - nu_G) L / J_eq = %.6g\n", chk.lipschitz, chk.min_k_p);
  if (!chk.pass) {
    std::printf("gain check FAILED: K_p must exceed %.6g\n", chk.min_k_p);
    return kInvalid;
  }
  std::printf("configuration valid\n");
  return kOk;
}

int cmd_gen_aero(const std::string& out) {
  plant::save_aero_csv(plant::make_default_surfaces(), out);
  std::printf("aero table written to %s\n", out.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floating wind farm power tracking simulator"};
  app.require_subcommand(1);

  Common common;
  int stride = 20;
  std::string pair_path, aero_out;

  auto add_common = [&](CLI::App* sub, bool controller) {
    sub->add_option("--scenario", common.scenario, "scenario JSON")->check(CLI::ExistingFile);
    if (controller) sub->add_option("--controller", common.controller, "nl-mpc or lpvtd-mpc");
    sub->add_option("--out", common.out, "output path");
    sub->add_option("--seed", common.seed, "inflow and regulation seed");
    sub->add_option("--workers", common.workers, "worker threads");
  };

  auto* run = app.add_subcommand("run", "simulate a scenario and score it");
  add_common(run, true);
  run->add_option("--stride", stride, "samples between rows of series.csv")->check(CLI::PositiveNumber);

  auto* score = app.add_subcommand("score", "score a power pair CSV");
  score->add_option("pair", pair_path, "CSV time_s,p_gen_mw,p_sp_mw")->required();
  score->add_option("--out", common.out, "directory for scorecard.json and intervals.csv");

  auto* build_lpv = app.add_subcommand("build-lpv", "build and save the LPV lattice");
  add_common(build_lpv, false);

  auto* design = app.add_subcommand("design-gains", "synthesize the Region-3 gain schedule");
  add_common(design, false);

  auto* validate = app.add_subcommand("validate", "check a scenario and the Region-2 gain condition");
  add_common(validate, true);

  auto* gen_aero = app.add_subcommand("gen-aero", "write the built-in aero table");
  gen_aero->add_option("--out", aero_out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(common, stride);
    if (*score) return cmd_score(pair_path, common.out);
    if (*build_lpv) return cmd_build_lpv(common);
    if (*design) return cmd_design_gains(common);
    if (*validate) return cmd_validate(common);
    if (*gen_aero) return cmd_gen_aero(aero_out);
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.module().c_str(), e.what());
    return kRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  }
  return kRuntime;
}
