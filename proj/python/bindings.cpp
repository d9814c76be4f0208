#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dnlskam/commands.hpp"

namespace py = pybind11;
using namespace dnlskam;

namespace {

py::tuple run_command(const std::string& name, const std::string& config_text, bool files, bool require_gate) {
  RunConfig c = parse_config(config_text);
  c.finalize();
  CommandOutput o;
  {
    py::gil_scoped_release nogil;
    if (name == "admissible") o = cmd_admissible(c);
    else if (name == "assumptions") o = cmd_assumptions(c);
    else if (name == "normal-form") o = cmd_normal_form(c, files);
    else if (name == "kam") o = cmd_kam(c, files, require_gate);
    else if (name == "measure") o = cmd_measure(c, files);
    else if (name == "verify-bounds") o = cmd_verify_bounds(c);
    else throw std::invalid_argument("unknown command " + name);
  }
  py::dict f;
  for (auto& [k, v] : o.files) f[py::str(k)] = py::bytes(v);
  return py::make_tuple(o.exit_code, o.report, o.stream, o.warnings, f);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IndexError>(m, "SiteIndexError", PyExc_ValueError);

  m.def("admissible", [](const std::vector<int>& J) { return to_string(admissible(J)); }, py::arg("J"));
  m.def(
      "lemma32",
      [](const std::vector<int>& k, const std::vector<std::pair<int, int>>& l, const std::vector<int>& J) {
        return to_string(lemma32(k, l, J));
      },
      py::arg("k"), py::arg("l"), py::arg("J"));
  m.def("normalize_config", [](const std::string& text) {
    RunConfig c = parse_config(text);
    c.finalize();
    return dump_config(c);
  });
  m.def("run_command", &run_command, py::arg("name"), py::arg("config_text"), py::arg("files") = false,
        py::arg("require_gate") = false);

  py::class_<KamGlobals>(m, "KamGlobals")
      .def(py::init<>())
      .def_readwrite("n", &KamGlobals::n)
      .def_readwrite("beta", &KamGlobals::beta)
      .def_readwrite("tau", &KamGlobals::tau)
      .def_readwrite("gamma0", &KamGlobals::gamma0)
      .def_readwrite("c", &KamGlobals::c)
      .def_readwrite("s0", &KamGlobals::s0)
      .def_readwrite("alpha0", &KamGlobals::alpha0)
      .def("beta_prime", &KamGlobals::beta_prime)
      .def("kappa", &KamGlobals::kappa);

  // long doubles come back as Python floats; values below 1e-308 flush to 0
  m.def(
      "schedule",
      [](int nu, const KamGlobals& g, double eps, double r) {
        auto w = schedule(nu, g, eps, r);
        py::dict d;
        d["nu"] = w.nu;
        d["s"] = w.s;
        d["sigma"] = w.sigma;
        d["a"] = w.a;
        d["K"] = static_cast<double>(w.K);
        d["Pi"] = static_cast<double>(w.Pi);
        d["B"] = static_cast<double>(w.B);
        d["alpha1"] = w.alpha1;
        d["alpha2"] = static_cast<double>(w.alpha2);
        d["eta"] = static_cast<double>(w.eta);
        d["r_next"] = static_cast<double>(w.r_next);
        d["eps_next"] = static_cast<double>(w.eps_next);
        return d;
      },
      py::arg("nu"), py::arg("globals"), py::arg("eps"), py::arg("r"));
}
