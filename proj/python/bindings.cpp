#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evanskit/cli.hpp"
#include "evanskit/errors.hpp"
#include "evanskit/evans.hpp"
#include "evanskit/lopatinski.hpp"
#include "evanskit/systems.hpp"

namespace py = pybind11;
using namespace evanskit;

namespace {

SystemModel model_of(const SystemSpec& s) {
  if (!s.model) throw Error(ErrorKind::invalid_argument, "system '" + s.name + "' has no conservation-law model");
  return *s.model;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Evans-function toolkit for viscous shock profiles";

  static py::exception<Error> error(m, "EvansError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<SystemModel>(m, "SystemModel")
      .def_readonly("name", &SystemModel::name)
      .def_readonly("n", &SystemModel::n)
      .def_readonly("r", &SystemModel::r)
      .def_readonly("d", &SystemModel::d)
      .def_readwrite("s", &SystemModel::s)
      .def("flux", [](const SystemModel& mo, int j, const Vec& u) { return mo.flux(j, u); })
      .def("jacobian", [](const SystemModel& mo, int j, const Vec& u) { return mo.jacobian(j, u); })
      .def("viscosity", [](const SystemModel& mo, int j, int k, const Vec& u) { return mo.viscosity(j, k, u); });

  py::class_<SystemSpec>(m, "SystemSpec")
      .def_readonly("name", &SystemSpec::name)
      .def_property_readonly("model", &model_of)
      .def_readonly("u_minus", &SystemSpec::u_minus)
      .def_readonly("u_plus", &SystemSpec::u_plus)
      .def_readonly("params", &SystemSpec::params);

  m.def("system_names", &system_names);
  m.def("get_system", &get_system, py::arg("name"), py::arg("overrides") = std::map<std::string, double>{});
  m.def("check_rh", &check_rh);
  m.def("check_h1", &check_h1);
  m.def("check_h2", &check_h2, py::arg("model"), py::arg("state"), py::arg("samples") = 16);

  py::class_<ShockProfile>(m, "ShockProfile")
      .def_property_readonly("grid", &ShockProfile::grid)
      .def_property_readonly("values", &ShockProfile::values)
      .def_property_readonly("derivative", &ShockProfile::derivative)
      .def_property_readonly("L", &ShockProfile::L)
      .def_readonly("nu_minus", &ShockProfile::nu_minus)
      .def_readonly("nu_plus", &ShockProfile::nu_plus);

  m.def(
      "solve_profile",
      [](const SystemModel& mo, const Vec& um, const Vec& up, double L, int nodes, double tol) {
        ProfileOptions o;
        o.L = L;
        o.nodes = nodes;
        o.tol = tol;
        return solve_profile(mo, um, up, o);
      },
      py::arg("model"), py::arg("u_minus"), py::arg("u_plus"), py::arg("L") = 0.0, py::arg("nodes") = 1601,
      py::arg("tol") = 1e-9);
  m.def("profile_residual", &profile_residual);

  py::class_<Frequency>(m, "Frequency")
      .def(py::init<cplx, std::vector<double>>(), py::arg("lam"), py::arg("xi") = std::vector<double>{})
      .def_readwrite("lam", &Frequency::lambda)
      .def_readwrite("xi", &Frequency::xi)
      .def("r", &Frequency::r);

  py::class_<EvansSample>(m, "EvansSample")
      .def_readonly("value", &EvansSample::value)
      .def_readonly("log_scale", &EvansSample::log_scale)
      .def_readonly("conditioning", &EvansSample::conditioning)
      .def_property_readonly("D", &EvansSample::D);

  py::class_<ContourResult>(m, "ContourResult")
      .def_readonly("winding", &ContourResult::winding)
      .def_readonly("phase_sum", &ContourResult::phase_sum)
      .def_readonly("refinement_depth", &ContourResult::refinement_depth)
      .def_property_readonly("values", [](const ContourResult& r) {
        std::vector<cplx> v;
        for (const auto& s : r.samples) v.push_back(s.D());
        return v;
      });

  // the engine references model and profile; keep both alive with it
  py::class_<EvansEngine>(m, "EvansEngine")
      .def(py::init([](const SystemModel& mo, const ShockProfile& p, const std::string& variant,
                       const std::string& scale) {
             const Scale sc = scale == "r2" ? Scale::r2 : scale == "unit" ? Scale::unit : Scale::r;
             return new EvansEngine(mo, p, variant_from_string(variant), sc);
           }),
           py::arg("model"), py::arg("profile"), py::arg("variant") = "integrated_1d", py::arg("scale") = "r",
           py::keep_alive<1, 2>(), py::keep_alive<1, 3>())
      .def(
          "evaluate",
          [](const EvansEngine& e, cplx lam, std::vector<double> xi) {
            py::gil_scoped_release release;
            return e.evaluate(Frequency(lam, std::move(xi)));
          },
          py::arg("lam"), py::arg("xi") = std::vector<double>{})
      .def(
          "winding_circle",
          [](const EvansEngine& e, cplx center, double radius, std::vector<double> xi, int samples, int jobs) {
            py::gil_scoped_release release;
            WindingOptions o;
            o.initial_samples = samples;
            o.jobs = jobs;
            return winding(e, circle(center, radius, std::move(xi)), o);
          },
          py::arg("center"), py::arg("radius"), py::arg("xi") = std::vector<double>{}, py::arg("samples") = 64,
          py::arg("jobs") = 1);

  m.def("lopatinski_det", [](const SystemModel& mo, const Vec& um, const Vec& up, cplx lam, std::vector<double> xi) {
    return lopatinski_det(mo, um, up, Frequency(lam, std::move(xi)));
  });

  py::class_<LowFrequencyFit>(m, "LowFrequencyFit")
      .def_readonly("radii", &LowFrequencyFit::radii)
      .def_readonly("delta_values", &LowFrequencyFit::delta_values)
      .def_readonly("gamma_estimates", &LowFrequencyFit::gamma_estimates)
      .def_readonly("spread", &LowFrequencyFit::spread);

  m.def(
      "fit_low_frequency",
      [](const SystemModel& mo, const ShockProfile& p, int angles, double re_min, std::vector<double> radii,
         int jobs) {
        py::gil_scoped_release release;
        return fit_low_frequency(mo, p, sample_angles(mo.d, angles, re_min), radii, jobs);
      },
      py::arg("model"), py::arg("profile"), py::arg("angles") = 8, py::arg("re_min") = 0.3,
      py::arg("radii") = std::vector<double>{1e-2, 3e-3, 1e-3}, py::arg("jobs") = 1);

  m.def("defaults_json", &cli::defaults_json);
  m.def(
      "run_config",
      [](const std::string& text) {
        const cli::RunConfig cfg = cli::parse_config(text);
        py::gil_scoped_release release;
        return cli::run(cfg);
      },
      "Run a JSON config; returns the summary JSON");
}
