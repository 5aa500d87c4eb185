#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <optional>

#include "phbench/csv_log.hpp"
#include "phbench/errors.hpp"
#include "phbench/scenario.hpp"
#include "phbench/validation.hpp"

namespace py = pybind11;

namespace phbench {
namespace {

// Columns in CSV order and a (rows, columns) array.
py::dict as_table(const CsvLayout& layout, const std::vector<LogSample>& log, const MetricsSeries& metrics) {
  const std::vector<std::string> header = layout.header();
  py::array_t<double> data({static_cast<py::ssize_t>(log.size()), static_cast<py::ssize_t>(header.size())});
  auto d = data.mutable_unchecked<2>();
  for (std::size_t i = 0; i < log.size(); ++i) {
    const LogSample& s = log[i];
    py::ssize_t c = 0;
    d(i, c++) = s.t;
    for (const Eigen::VectorXd* v : {&s.q, &s.qd, &s.tau, &s.x, &s.xd_ref}) {
      for (Eigen::Index j = 0; j < v->size(); ++j) d(i, c++) = (*v)[j];
    }
    if (layout.interaction) {
      for (Eigen::Index j = 0; j < s.f_int.size(); ++j) d(i, c++) = s.f_int[j];
    }
    if (layout.metrics) {
      const MetricsSample& m = metrics[i];
      for (double v : {m.H_q, m.H_Omega, m.P_cmd, m.int_P_cmd, m.gap, m.margin_qs, m.margin_gen, m.P_x,
                       m.P_step_ref, m.e_step}) {
        d(i, c++) = v;
      }
    }
  }
  py::dict out;
  out["columns"] = header;
  out["data"] = data;
  return out;
}

py::dict as_summary(const MetricsSummary& s) {
  py::dict out;
  out["window"] = py::make_tuple(s.window_t0, s.window_t1);
  out["rms_e_step"] = s.rms_e_step;
  out["min_margin_qs"] = s.min_margin_qs;
  out["min_margin_gen"] = s.min_margin_gen;
  out["peak_H_Omega"] = s.peak_H_Omega;
  return out;
}

ScenarioConfig select(const std::optional<std::string>& preset, const std::optional<std::filesystem::path>& config) {
  if (preset.has_value() == config.has_value()) throw ConfigError("give exactly one of preset or config");
  if (config) return load_scenario_config(*config);
  ScenarioConfig cfg;
  cfg.scenario = scenario_preset(*preset);
  return cfg;
}

py::dict run(const std::optional<std::string>& preset, const std::optional<std::filesystem::path>& config,
             std::optional<double> duration, std::optional<std::pair<double, double>> window) {
  ScenarioConfig cfg = select(preset, config);
  if (duration) cfg.scenario.sim.duration = *duration;
  if (window) std::tie(cfg.window_t0, cfg.window_t1) = *window;
  cfg.scenario.validate();
  SimTrajectory tr;
  {
    py::gil_scoped_release release;
    tr = run_scenario(cfg.scenario);
  }
  py::dict out = as_table(CsvLayout::for_models(cfg.scenario.plant, cfg.scenario.controller_model()), tr.log,
                          tr.metrics);
  out["name"] = cfg.scenario.name;
  out["summary"] = as_summary(summarize_metrics(tr.metrics, cfg.window_t0, cfg.window_t1));
  return out;
}

CsvLog load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_csv(in);
}

py::dict metrics(const std::filesystem::path& csv, const std::optional<std::string>& preset,
                 const std::optional<std::filesystem::path>& config) {
  const ScenarioConfig cfg = select(preset, config);
  CsvLog in = load_csv(csv);
  const MetricsSeries m = compute_metrics(in.log, cfg.scenario.metrics_context());
  in.layout.metrics = true;
  return as_table(in.layout, in.log, m);
}

py::dict read_table(const std::filesystem::path& csv) {
  const CsvLog in = load_csv(csv);
  return as_table(in.layout, in.log, in.metrics);
}

}  // namespace
}  // namespace phbench

PYBIND11_MODULE(_phbench, m) {
  using namespace phbench;
  m.doc() = "Port-Hamiltonian impedance-control benchmark";

  auto base = py::register_exception<Error>(m, "PhbenchError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ModelError>(m, "ModelError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<WindowError>(m, "WindowError", base.ptr());
  py::register_exception<NumericalDivergence>(m, "NumericalDivergence", base.ptr());
  py::register_exception<OverdampedUnsupported>(m, "OverdampedUnsupported", base.ptr());

  py::class_<RobotModel>(m, "Model")
      .def_static("builtin", [](const std::string& name) { return builtin_model(name); })
      .def_static("parse", [](const std::string& text) { return parse_model(text); })
      .def_property_readonly("name", [](const RobotModel& r) { return r.name; })
      .def_property_readonly("dof", &RobotModel::dof)
      .def_property_readonly("total_mass", &RobotModel::total_mass)
      .def("serialize", [](const RobotModel& r) { return serialize_model(r); })
      .def("mass_matrix", [](const RobotModel& r, const Eigen::VectorXd& q) { return mass_matrix(r, q); })
      .def("gravity", [](const RobotModel& r, const Eigen::VectorXd& q) { return gravity_vector(r, q); })
      .def("coriolis", [](const RobotModel& r, const Eigen::VectorXd& q,
                          const Eigen::VectorXd& qd) { return coriolis_matrix(r, q, qd); })
      .def("jacobian", [](const RobotModel& r, const Eigen::VectorXd& q) { return geometric_jacobian(r, q); })
      .def("potential_energy", [](const RobotModel& r, const Eigen::VectorXd& q) { return potential_energy(r, q); })
      .def("hamiltonian", [](const RobotModel& r, const Eigen::VectorXd& q,
                             const Eigen::VectorXd& qd) { return robot_hamiltonian(r, q, qd); })
      .def("forward_kinematics",
           [](const RobotModel& r, const Eigen::VectorXd& q) {
             const CartesianState s = forward_kinematics(r, q);
             return py::make_tuple(Eigen::Vector3d(s.position), Eigen::Matrix3d(s.orientation));
           })
      .def("forward_dynamics", [](const RobotModel& r, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                  const Eigen::VectorXd& tau) { return forward_dynamics(r, q, qd, tau, Eigen::VectorXd()); })
      .def("__repr__", [](const RobotModel& r) { return "<Model " + r.name + " dof=" + std::to_string(r.dof()) + ">"; });

  m.def("builtin_model_names", &builtin_model_names);
  m.def("preset_names", &scenario_preset_names);

  m.def("run", &run, py::kw_only(), py::arg("preset") = py::none(), py::arg("config") = py::none(),
        py::arg("duration") = py::none(), py::arg("window") = py::none(),
        "Simulates a preset or config file. Returns {'name', 'columns', 'data', 'summary'}.");
  m.def("metrics", &metrics, py::arg("csv"), py::kw_only(), py::arg("preset") = py::none(),
        py::arg("config") = py::none(), "Recomputes the metric columns of a run CSV.");
  m.def("read_csv", &read_table, py::arg("csv"));

  m.def("damping_ratio", &damping_ratio, py::arg("k"), py::arg("d"), py::arg("m"));
  m.def(
      "step_response",
      [](double k, double d, double mass, double amplitude, double t) {
        const StepResponse r = step_response_closed_form(k, d, mass, amplitude, t);
        return py::make_tuple(r.x, r.xdot);
      },
      py::arg("k"), py::arg("d"), py::arg("m"), py::arg("amplitude"), py::arg("t"));
  m.def("step_power", &step_power_reference, py::arg("k"), py::arg("d"), py::arg("m"), py::arg("amplitude"),
        py::arg("t"));
  m.def("rms_over_window", &rms_over_window, py::arg("t"), py::arg("series"), py::arg("t0"), py::arg("t1"));

  m.def(
      "validate",
      [](bool inject_fault) {
        ValidationOptions o;
        o.inject_mass_asymmetry = inject_fault;
        py::list out;
        for (const CheckResult& c : run_validation_suite(o)) {
          out.append(py::make_tuple(c.name, c.value, c.tolerance, c.passed));
        }
        return out;
      },
      py::arg("inject_fault") = false, "List of (name, value, tolerance, passed).");
}
