#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gaplab/harness.hpp"

namespace py = pybind11;
using namespace gaplab;

namespace {

py::dict result_to_dict(const IdentityResult& r) {
  py::dict d;
  d["id"] = to_string(r.id);
  d["lhs"] = r.lhs;
  d["rhs"] = r.rhs;
  d["abs_err"] = r.abs_err;
  d["rel_err"] = r.rel_err;
  d["status"] = to_string(r.status);
  d["detail"] = r.detail;
  return d;
}

std::vector<ReferenceChoice> parse_references(const std::vector<std::string>& names) {
  std::vector<ReferenceChoice> out;
  for (const auto& name : names) {
    if (name == "scenario") out.push_back(ReferenceChoice::Scenario);
    else if (name == "uniform") out.push_back(ReferenceChoice::Uniform);
    else if (name == "counting") out.push_back(ReferenceChoice::Counting);
    else throw InvalidParameter("unknown reference choice: " + name);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact generalization-error identities on finite spaces";

  // translators run newest-first, so the base class goes first
  py::register_exception<Error>(m, "GaplabError");
  py::register_exception<SpaceMismatch>(m, "SpaceMismatchError");
  py::register_exception<NotAbsolutelyContinuous>(m, "NotAbsolutelyContinuousError");

  py::class_<FiniteMeasure>(m, "FiniteMeasure")
      .def_static("from_weights",
                  [](const std::string& space_id, const std::vector<double>& w) {
                    return FiniteMeasure::from_weights(space_id, w);
                  })
      .def_static("uniform", &FiniteMeasure::uniform)
      .def_static("counting", &FiniteMeasure::counting)
      .def_static("point_mass", &FiniteMeasure::point_mass)
      .def_property_readonly("space_id", &FiniteMeasure::space_id)
      .def_property_readonly("space_size", &FiniteMeasure::space_size)
      .def_property_readonly("normalized", &FiniteMeasure::normalized)
      .def("mass", &FiniteMeasure::mass)
      .def("log_mass", &FiniteMeasure::log_mass)
      .def("masses", [](const FiniteMeasure& p) {
        std::vector<double> out(p.space_size(), 0.0);
        for (const auto& [atom, lm] : p.log_masses()) {
          out[atom] = std::exp(lm);
        }
        return out;
      });

  py::class_<Kernel>(m, "Kernel")
      .def(py::init([](const std::string& condition_space_id,
                       std::size_t condition_space_size,
                       const std::map<std::size_t, FiniteMeasure>& rows) {
        return Kernel(condition_space_id, condition_space_size, rows);
      }))
      .def("row", &Kernel::row, py::return_value_policy::copy);

  py::class_<LossTable>(m, "LossTable")
      .def(py::init<std::size_t, std::size_t, std::vector<double>>())
      .def_property_readonly("num_datapoints", &LossTable::num_datapoints)
      .def_property_readonly("num_models", &LossTable::num_models)
      .def("__call__", &LossTable::operator());

  py::class_<DatasetSpace>(m, "DatasetSpace")
      .def(py::init<std::size_t, std::size_t>())
      .def_property_readonly("size", &DatasetSpace::size)
      .def("encode",
           [](const DatasetSpace& s, const std::vector<std::size_t>& tuple) {
             return s.encode(tuple);
           })
      .def("decode", &DatasetSpace::decode);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("n", &Scenario::n)
      .def_readonly("loss", &Scenario::loss)
      .def_readonly("p_z_single", &Scenario::p_z_single)
      .def_readonly("lam", &Scenario::lambda)
      .def_readonly("beta", &Scenario::beta)
      .def("to_json", &scenario_to_json);

  m.def("scenario_from_json", &scenario_from_json);
  m.def("log_sum_exp", [](const std::vector<double>& v) {
    return log_sum_exp(v);
  });
  m.def("relative_entropy", &relative_entropy);
  m.def("mutual_information", &mutual_information);
  m.def("lautum_information", &lautum_information);
  m.def("marginalize", &marginalize);
  m.def("product_measure", &product_measure, py::arg("p"), py::arg("n"),
        py::arg("cap") = kDefaultEnumerationCap);
  m.def("convex_combination", &convex_combination);
  m.def("bayes_invert", [](const Kernel& k, const FiniteMeasure& prior) {
    BayesInversion inv = bayes_invert(k, prior);
    return py::make_tuple(inv.posterior, inv.marginal);
  });

  m.def("gibbs_posterior",
        [](const FiniteMeasure& reference, double lam, const DatasetSpace& space,
           const LossTable& loss, std::size_t z) {
          return gibbs_posterior(GibbsSpec{reference, lam}, space, loss, z);
        });
  m.def("wcdg_measure",
        [](const FiniteMeasure& reference, double beta, const LossTable& loss,
           std::size_t theta) {
          return wcdg_measure(WcdgSpec{reference, beta}, loss, theta);
        });
  m.def("gap_algorithm_direct", &gap_algorithm_direct);
  m.def("gap_from_gibbs",
        [](const DatasetSpace& space, const LossTable& loss, std::size_t z,
           const FiniteMeasure& p, const FiniteMeasure& reference, double lam) {
          return gap_from_gibbs(space, loss, z, p, GibbsSpec{reference, lam});
        });
  m.def("gap_data_direct", &gap_data_direct);
  m.def("gap_from_wcdg",
        [](const LossTable& loss, std::size_t theta, const FiniteMeasure& p,
           const FiniteMeasure& reference, double beta) {
          return gap_from_wcdg(loss, theta, p, WcdgSpec{reference, beta});
        });

  m.def("generate_scenario",
        [](std::uint64_t seed, const std::string& mode) {
          return generate_scenario(seed, DimRanges{}, mode_from_string(mode));
        },
        py::arg("seed"), py::arg("mode") = "full_support");
  m.def("demo_scenario", &demo_scenario);
  m.def("gen_error_direct", [](const Scenario& scenario) {
    return make_context(scenario).oracle;
  });
  m.def("evaluate_catalog",
        [](const Scenario& scenario, const std::vector<double>& lambdas,
           const std::vector<double>& betas,
           const std::vector<std::string>& references) {
          ScenarioContext ctx = make_context(scenario);
          std::vector<double> ls = lambdas.empty()
                                       ? std::vector<double>{scenario.lambda}
                                       : lambdas;
          std::vector<double> bs =
              betas.empty() ? std::vector<double>{scenario.beta} : betas;
          auto results =
              evaluate_catalog(ctx, ls, bs, parse_references(references));
          py::list out;
          for (const auto& r : results) {
            out.append(result_to_dict(r));
          }
          return out;
        },
        py::arg("scenario"), py::arg("lambdas") = std::vector<double>{},
        py::arg("betas") = std::vector<double>{},
        py::arg("references") = std::vector<std::string>{"scenario"});
  m.def("evaluate_identity",
        [](const Scenario& scenario, const std::string& tag) {
          ScenarioContext ctx = make_context(scenario);
          return result_to_dict(
              evaluate_identity(ctx, identity_from_string(tag)));
        });
}
