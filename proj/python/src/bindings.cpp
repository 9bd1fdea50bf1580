#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "fowf/control/controller.hpp"
#include "fowf/error.hpp"
#include "fowf/harness/scenario.hpp"
#include "fowf/pjm/score.hpp"
#include "fowf/wake/wake.hpp"

namespace py = pybind11;
using namespace fowf;

namespace {

pjm::PowerPair make_pair(std::vector<double> p_gen, std::vector<double> p_sp, double start, double period) {
  pjm::PowerPair p;
  p.p_gen = std::move(p_gen);
  p.p_sp = std::move(p_sp);
  p.start = start;
  p.period = period;
  return p;
}

py::dict scorecard_dict(const pjm::Scorecard& c) {
  py::list intervals;
  for (const auto& i : c.intervals) {
    py::dict d;
    d["t0"] = i.t0;
    d["delta_star"] = i.delta_star;
    d["s_d"] = i.s_d;
    d["s_c"] = i.s_c;
    d["s_p"] = i.s_p;
    d["s"] = i.s;
    intervals.append(d);
  }
  py::dict d;
  d["intervals"] = intervals;
  d["s_p"] = c.s_p;
  d["composite"] = c.composite;
  d["composite_clamped"] = c.composite_clamped;
  d["pass"] = c.pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fowf, m) {
  m.doc() = "Floating wind farm power tracking simulator";

  py::register_exception<Error>(m, "FowfError", PyExc_RuntimeError);

  m.def("precision_score",
        [](std::vector<double> p_gen, std::vector<double> p_sp) {
          return pjm::precision_score(make_pair(std::move(p_gen), std::move(p_sp), 0.0, 10.0));
        },
        py::arg("p_gen"), py::arg("p_sp"));
  m.def("composite_score",
        [](std::vector<double> p_gen, std::vector<double> p_sp, double start, double period) {
          return scorecard_dict(pjm::composite_score(make_pair(std::move(p_gen), std::move(p_sp), start, period)));
        },
        py::arg("p_gen"), py::arg("p_sp"), py::arg("start") = 0.0, py::arg("period") = 10.0);
  m.def("find_delta_star",
        [](std::vector<double> p_gen, std::vector<double> p_sp, std::size_t first) {
          const auto r = pjm::find_delta_star(make_pair(std::move(p_gen), std::move(p_sp), 0.0, 10.0), first, {});
          return py::make_tuple(r.delta_star, r.s_d, r.s_c);
        },
        py::arg("p_gen"), py::arg("p_sp"), py::arg("first") = 0);
  m.def("normalize_regd_signal",
        [](std::vector<double> raw, double amplitude, double mean) {
          return pjm::normalize_regd_signal(raw, amplitude, mean).values;
        },
        py::arg("raw"), py::arg("amplitude") = 3.0, py::arg("mean") = 30.0);

  m.def("sigmoid_weight",
        [](double u, double k_s, double u_0) {
          control::BlendConfig b;
          b.k_s = k_s;
          b.u_0 = u_0;
          return control::sigmoid_weight(u, b);
        },
        py::arg("u"), py::arg("k_s") = 5.0, py::arg("u_0") = 11.5);

  m.def("initial_deficit", &wake::initial_deficit, py::arg("u"), py::arg("ct"));
  m.def("wake_diameter", &wake::wake_diameter, py::arg("kappa"), py::arg("k_w") = 0.11, py::arg("rotor_radius") = 63.0);

  m.def("default_scenario", [] { return harness::to_json(harness::Scenario{}).dump(); });
  m.def("run_scenario",
        [](const std::string& scenario_json, const std::string& base_dir) {
          const auto s = harness::scenario_from_json(nlohmann::json::parse(scenario_json), base_dir);
          harness::RunOutput r;
          {
            py::gil_scoped_release release;
            r = harness::run_scenario(s);
          }
          py::dict d;
          d["time"] = r.time;
          d["farm_power"] = r.farm_power;
          d["setpoint"] = r.setpoint;
          d["scorecard"] = scorecard_dict(r.scorecard);
          d["solve_wall_time"] = r.solve_wall_time;
          d["region2_fraction"] = r.region2_fraction;
          return d;
        },
        py::arg("scenario_json"), py::arg("base_dir") = ".");
}
