#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "otto/sweep.hpp"
#include "otto/validate.hpp"

namespace py = pybind11;
using namespace otto;

namespace {

py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(dump_json(j, 0));
}

Json from_python(const py::object& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

CycleConfig config_arg(const py::object& o) {
  if (o.is_none()) return {};
  CycleConfig c = config_from_json(from_python(o));
  c.validate();
  return c;
}

SpectralDecomposition basis_of(const ComplexMatrix& h) { return eig_hermitian(h); }

py::dict distribution_dict(const DiscreteDistribution& d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.size())), p(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = d.atoms()[i].value;
    p(static_cast<Eigen::Index>(i)) = d.atoms()[i].probability;
  }
  py::dict out;
  out["value"] = v;
  out["probability"] = p;
  return out;
}

py::list rows_to_python(const SweepSpec& spec, const std::vector<SweepResult>& rows) {
  std::ostringstream s;
  write_json(s, spec, rows);
  return to_python(Json::parse(s.str())).cast<py::list>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum Otto engine with TPM and DBN work statistics";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "OttoError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  m.def("spin_operators", [](int d) {
    auto s = spin_operators(d);
    return py::make_tuple(s.sx, s.sy, s.sz);
  }, py::arg("d"));

  m.def("eig_hermitian", [](const ComplexMatrix& h, double tol) {
    auto dec = eig_hermitian(h, tol);
    return py::make_tuple(dec.eigenvalues, dec.projectors);
  }, py::arg("h"), py::arg("grouping_tol") = kDefaultGroupingTol);

  m.def("dephase", [](const ComplexMatrix& rho, const ComplexMatrix& h) {
    return dephase(DensityMatrix::from_matrix(rho), basis_of(h)).matrix();
  }, py::arg("rho"), py::arg("hamiltonian"), "Dephase rho in the eigenbasis of hamiltonian.");

  m.def("trace_distance", [](const ComplexMatrix& a, const ComplexMatrix& b) {
    return trace_distance(DensityMatrix::from_matrix(a), DensityMatrix::from_matrix(b));
  });

  m.def("rel_entropy_coherence", [](const ComplexMatrix& rho, const ComplexMatrix& h) {
    return rel_entropy_coherence(DensityMatrix::from_matrix(rho), basis_of(h));
  }, py::arg("rho"), py::arg("hamiltonian"));

  m.def("gad_channel", [](const ComplexMatrix& rho, double lam, const ComplexMatrix& sigma, const ComplexMatrix& h) {
    return gad_channel(DensityMatrix::from_matrix(rho), lam, DensityMatrix::from_matrix(sigma), basis_of(h)).matrix();
  }, py::arg("rho"), py::arg("lam"), py::arg("sigma"), py::arg("hamiltonian"));

  m.def("kl_divergence", [](const std::vector<std::pair<double, double>>& p, const std::vector<std::pair<double, double>>& q,
                            double merge_tol) {
    auto build = [&](const std::vector<std::pair<double, double>>& atoms) {
      std::vector<Atom> v;
      for (const auto& [x, w] : atoms) v.push_back({x, w});
      return DiscreteDistribution::from_samples(v, merge_tol);
    };
    return kl_divergence(build(p), build(q));
  }, py::arg("p"), py::arg("q"), py::arg("merge_tol") = kDefaultMergeTol,
     "KL divergence between lists of (value, probability); +inf when P is not supported by Q.");

  m.def("default_config", [] { return to_python(to_json(CycleConfig{})); });

  m.def("simulate", [](const py::object& config) {
    const CycleConfig c = config_arg(config);
    std::optional<CycleAnalysis> result;
    {
      py::gil_scoped_release release;
      result.emplace(analyze_cycle(c));
    }
    const CycleAnalysis& a = *result;
    auto out = to_python(summary_json(a)).cast<py::dict>();
    py::dict dists;
    const std::pair<const char*, const SchemeDistributions*> schemes[] = {{"tpm", &a.tpm_dists}, {"dbn", &a.dbn_dists}};
    for (const auto& [tag, d] : schemes) {
      py::dict s;
      s["work"] = distribution_dict(d->work);
      s["heat_h"] = distribution_dict(d->heat_h);
      s["heat_c"] = distribution_dict(d->heat_c);
      dists[tag] = s;
    }
    out["distributions"] = dists;
    out["rho1"] = a.corners.rho1.matrix();
    return out;
  }, py::arg("config") = py::none(), "Evaluate one cycle; config is a dict of CycleConfig fields.");

  m.def("sweep", [](const py::object& spec_obj, int parallelism, const std::optional<std::string>& cache_dir) {
    const SweepSpec spec = sweep_spec_from_json(from_python(spec_obj));
    std::vector<SweepResult> rows;
    {
      py::gil_scoped_release release;
      SweepOptions o{parallelism, std::nullopt};
      if (cache_dir) o.cache_dir = *cache_dir;
      rows = run_sweep(spec, o);
    }
    return rows_to_python(spec, rows);
  }, py::arg("spec"), py::arg("parallelism") = 1, py::arg("cache_dir") = py::none());

  m.def("figure_names", &figure_names);
  m.def("figure", [](const std::string& name, int lambda_points, int g_points, int parallelism) {
    const SweepSpec spec = figure_spec(name, lambda_points, g_points);
    std::vector<SweepResult> rows;
    {
      py::gil_scoped_release release;
      rows = run_sweep(spec, {parallelism, std::nullopt});
    }
    return rows_to_python(spec, rows);
  }, py::arg("name"), py::arg("lambda_points") = 50, py::arg("g_points") = 51, py::arg("parallelism") = 1);

  m.def("validate", [](unsigned seed, int configs, int parallelism) {
    std::vector<InvariantResult> results;
    {
      py::gil_scoped_release release;
      ValidateOptions o;
      o.seed = seed;
      o.random_configs = configs;
      o.parallelism = parallelism;
      results = run_validation(o);
    }
    py::list out;
    for (const auto& r : results) {
      py::dict d;
      d["name"] = r.name;
      d["passed"] = r.passed;
      d["worst"] = r.worst;
      d["threshold"] = r.threshold;
      d["detail"] = r.detail;
      out.append(d);
    }
    return out;
  }, py::arg("seed") = 1, py::arg("configs") = 24, py::arg("parallelism") = 1);
}
