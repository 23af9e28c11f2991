#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "carpetks/io.hpp"
#include "carpetks/version.hpp"

namespace py = pybind11;
using namespace carpetks;

namespace {

std::shared_ptr<CarpetSpec> make_spec(int dim, int base, std::vector<std::vector<int>> digits) {
  return std::make_shared<CarpetSpec>(dim, base, std::move(digits));
}

py::dict validate_dict(const CarpetSpec& spec) {
  auto rep = validate_carpet(spec);
  auto cond = [](const ConditionResult& c) {
    py::dict d;
    d["pass"] = c.pass;
    d["witness"] = c.witness;
    return d;
  };
  py::dict out;
  out["valid"] = rep.valid();
  out["symmetry"] = cond(rep.symmetry);
  out["connectedness"] = cond(rep.connectedness);
  out["non_diagonality"] = cond(rep.non_diagonality);
  out["borders"] = cond(rep.borders);
  return out;
}

py::dict graph_info(std::shared_ptr<CarpetSpec> spec, int level) {
  auto g = build_level_graph(spec, level);
  py::dict out;
  out["n"] = g->level();
  out["vertex_count"] = g->vertex_count();
  out["edge_count"] = g->edge_count();
  out["max_degree"] = g->max_degree();
  out["connected"] = g->connected();
  return out;
}

py::dict capacity_dict(std::shared_ptr<CarpetSpec> spec, int level, double p) {
  SolverConfig cfg;
  cfg.p = p;
  auto cap = p_capacity(std::shared_ptr<const CarpetSpec>(spec), level, cfg);
  py::dict out;
  out["capacity"] = cap.capacity;
  out["residual"] = cap.solve.residual;
  out["iterations"] = cap.solve.iterations;
  out["values"] = cap.solve.minimizer.values;
  return out;
}

py::dict rho_dict(std::shared_ptr<CarpetSpec> spec, double p, int level_lo, int level_hi) {
  SolverConfig cfg;
  cfg.p = p;
  auto est = estimate_rho_beta(spec, p, level_lo, level_hi, cfg);
  py::dict out;
  out["p"] = est.p;
  out["levels"] = est.levels;
  out["capacities"] = est.capacities;
  out["ratios"] = est.ratios;
  out["rho_hat"] = est.rho_hat;
  out["rho_extrap"] = est.rho_extrap;
  out["beta_hat"] = est.beta_hat;
  out["supercritical"] = est.supercritical;
  return out;
}

py::dict functional_dict(std::shared_ptr<CarpetSpec> spec, int n, double p, double beta,
                         int harmonic_level, std::uint64_t samples, std::uint64_t seed) {
  auto consts = GeometryConstants::make(*spec, p, beta);
  SolverConfig scfg;
  scfg.p = p;
  auto cap = p_capacity(std::shared_ptr<const CarpetSpec>(spec), harmonic_level, scfg);
  auto f = EvalFunction::from_cells({cap.graph, cap.solve.minimizer.values},
                                    "harmonic_m" + std::to_string(harmonic_level));
  MCConfig mc;
  mc.seed = seed;
  mc.samples = samples;
  auto est = functional_A(*spec, f, n, consts, mc);
  py::dict out;
  out["value"] = est.value;
  out["std_err"] = est.std_err;
  out["samples"] = est.samples;
  out["acceptance"] = est.acceptance;
  return out;
}

py::dict min_k_dict(double p, int a, double alpha, double beta) {
  auto k = min_k(p, a, alpha, beta);
  py::dict out;
  out["k"] = k.k;
  out["borderline"] = k.borderline;
  out["tail_ratio"] = k.tail_ratio;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "generalized Sierpinski carpet energies and Korevaar-Schoen functionals";
  m.attr("__version__") = kVersion;

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(e.kind() == ErrorKind::config ? PyExc_ValueError : PyExc_RuntimeError,
                      e.what());
    }
  });

  py::class_<CarpetSpec, std::shared_ptr<CarpetSpec>>(m, "CarpetSpec")
      .def(py::init(&make_spec), py::arg("dim"), py::arg("base"), py::arg("digits"))
      .def_property_readonly("dim", &CarpetSpec::dim)
      .def_property_readonly("base", &CarpetSpec::base)
      .def_property_readonly("nstar", &CarpetSpec::nstar)
      .def_property_readonly("alpha", &CarpetSpec::alpha)
      .def_property_readonly("digits", &CarpetSpec::digits)
      .def_static("standard_carpet",
                  [] { return std::make_shared<CarpetSpec>(CarpetSpec::standard_carpet()); })
      .def_static("menger_sponge",
                  [] { return std::make_shared<CarpetSpec>(CarpetSpec::menger_sponge()); });

  m.def("validate", &validate_dict, py::arg("spec"),
        "check the four GSC conditions; returns per-condition results with witnesses");
  m.def("graph_info", &graph_info, py::arg("spec"), py::arg("level"),
        "build the level-n approximation graph and return its summary");
  m.def("p_capacity", &capacity_dict, py::arg("spec"), py::arg("level"), py::arg("p") = 2.0,
        "minimum p-energy with opposite axis-1 faces pinned to 0 and 1");
  m.def("estimate_rho_beta", &rho_dict, py::arg("spec"), py::arg("p"), py::arg("level_lo"),
        py::arg("level_hi"), "capacity-ratio estimate of rho_p and beta_p");
  m.def("functional_A", &functional_dict, py::arg("spec"), py::arg("n"), py::arg("p"),
        py::arg("beta"), py::arg("harmonic_level") = 4, py::arg("samples") = 100000,
        py::arg("seed") = 20240817,
        "grid ball functional A^(n) of a p-harmonic test function (Monte Carlo)");
  m.def("min_k", &min_k_dict, py::arg("p"), py::arg("a"), py::arg("alpha"), py::arg("beta"),
        "smallest k with 2^(p-1) < a^((beta-alpha)k)");
}
