#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ttsa/commands.hpp"
#include "ttsa/config.hpp"
#include "ttsa/engine.hpp"
#include "ttsa/error.hpp"
#include "ttsa/estimator.hpp"
#include "ttsa/theory.hpp"

namespace py = pybind11;
using namespace ttsa;

namespace {

py::dict checkpoint_dict(const CovarianceCheckpoint& c) {
  py::dict d;
  d["k"] = c.k;
  d["beta"] = c.beta;
  d["gamma"] = c.gamma;
  d["sigma11"] = c.sigma11;
  d["sigma12"] = c.sigma12;
  d["sigma22"] = c.sigma22;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Linear two-time-scale stochastic approximation";

  // Kept alive for the life of the interpreter; the module holds a reference too.
  static PyObject* error_type = py::exception<Error>(m, "TtsaError").inc_ref().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string message = std::string(to_string(e.kind())) + ": " + e.what();
      PyErr_SetString(error_type, message.c_str());
    }
  });

  py::enum_<NoiseDistribution>(m, "NoiseDistribution")
      .value("Gaussian", NoiseDistribution::Gaussian)
      .value("ScaledRademacher", NoiseDistribution::ScaledRademacher);

  py::class_<NoiseSpec>(m, "NoiseSpec")
      .def(py::init([](Matrix g11, Matrix g12, Matrix g22, NoiseDistribution d) {
             return NoiseSpec{std::move(g11), std::move(g12), std::move(g22), d};
           }),
           py::arg("gamma11"), py::arg("gamma12"), py::arg("gamma22"),
           py::arg("distribution") = NoiseDistribution::Gaussian)
      .def_readonly("gamma11", &NoiseSpec::gamma11)
      .def_readonly("gamma12", &NoiseSpec::gamma12)
      .def_readonly("gamma22", &NoiseSpec::gamma22)
      .def_readonly("distribution", &NoiseSpec::distribution)
      .def("joint", &NoiseSpec::joint);

  py::class_<SystemSpec>(m, "SystemSpec")
      .def(py::init<Matrix, Matrix, Matrix, Matrix, Vector, Vector, NoiseSpec>(),
           py::arg("a11"), py::arg("a12"), py::arg("a21"), py::arg("a22"), py::arg("b1"),
           py::arg("b2"), py::arg("noise"))
      .def_property_readonly("n", &SystemSpec::n)
      .def_property_readonly("m", &SystemSpec::m)
      .def_property_readonly("a11", &SystemSpec::a11)
      .def_property_readonly("a12", &SystemSpec::a12)
      .def_property_readonly("a21", &SystemSpec::a21)
      .def_property_readonly("a22", &SystemSpec::a22)
      .def_property_readonly("noise", &SystemSpec::noise)
      .def("block_matrix", &SystemSpec::block_matrix);

  py::class_<StepSchedule>(m, "StepSchedule")
      .def(py::init<double, double, double>(), py::arg("base"), py::arg("tau"),
           py::arg("alpha"))
      .def("__call__", &StepSchedule::value)
      .def_property_readonly("base", &StepSchedule::base)
      .def_property_readonly("tau", &StepSchedule::horizon_scale)
      .def_property_readonly("alpha", &StepSchedule::exponent);

  py::class_<SchedulePair>(m, "SchedulePair")
      .def(py::init<StepSchedule, StepSchedule>(), py::arg("slow"), py::arg("fast"))
      .def_property_readonly("epsilon", &SchedulePair::epsilon)
      .def_property_readonly("beta_bar", &SchedulePair::beta_bar)
      .def("beta", &SchedulePair::beta)
      .def("gamma", &SchedulePair::gamma);

  py::class_<CovariancePrediction>(m, "CovariancePrediction")
      .def_readonly("sigma11", &CovariancePrediction::sigma11)
      .def_readonly("sigma12", &CovariancePrediction::sigma12)
      .def_readonly("sigma22", &CovariancePrediction::sigma22)
      .def_readonly("delta", &CovariancePrediction::delta)
      .def_readonly("q", &CovariancePrediction::q)
      .def_readonly("beta_bar", &CovariancePrediction::beta_bar)
      .def("block", &CovariancePrediction::block);

  py::class_<OptimalGain>(m, "OptimalGain")
      .def_readonly("sigma11", &OptimalGain::sigma11)
      .def_readonly("g1", &OptimalGain::g1)
      .def_readonly("g", &OptimalGain::g);

  py::class_<NormalityReport>(m, "NormalityReport")
      .def_readonly("ks_statistic", &NormalityReport::ks_statistic)
      .def_readonly("skewness", &NormalityReport::skewness)
      .def_readonly("excess_kurtosis", &NormalityReport::excess_kurtosis)
      .def_readonly("sample_count", &NormalityReport::sample_count)
      .def("passes", [](const NormalityReport& r) { return passes(r); });

  m.def("fixed_point", [](const SystemSpec& s) {
    const FixedPoint fp = fixed_point(s);
    return py::make_tuple(fp.theta, fp.r);
  });
  m.def("delta_matrix", &delta_matrix);
  m.def("predict_full", &predict_full, py::arg("spec"), py::arg("beta_bar"));
  m.def("predict_reduced", &predict_reduced, py::arg("spec"), py::arg("beta_bar"));
  m.def("optimal_gain_covariance", &optimal_gain_covariance);
  m.def("gained_reduced_covariance", &gained_reduced_covariance, py::arg("spec"),
        py::arg("g1"), py::arg("beta_bar"));
  m.def("validate", [](const SystemSpec& s, const SchedulePair& pair) {
    ValidationReport r = validate_schedules(pair);
    r.merge(validate_system(s, pair.beta_bar()));
    return py::make_tuple(r.all_passed(), r.to_text());
  });

  m.def(
      "l_norms",
      [](const SystemSpec& s, const SchedulePair& pair, std::uint64_t last) {
        const LSequence seq = l_sequence_auto(s, pair, last);
        return py::make_tuple(seq.k0, seq.norms);
      },
      py::arg("spec"), py::arg("pair"), py::arg("last"));

  m.def(
      "propagate",
      [](const SystemSpec& s, const SchedulePair& pair, std::uint64_t steps,
         std::vector<std::uint64_t> checkpoints) {
        py::list rows;
        for (const auto& c : propagate_covariance(
                 s, pair, Matrix::Zero(s.n() + s.m(), s.n() + s.m()), steps,
                 std::move(checkpoints)))
          rows.append(checkpoint_dict(c));
        return rows;
      },
      py::arg("spec"), py::arg("pair"), py::arg("steps"),
      py::arg("checkpoints") = std::vector<std::uint64_t>{});

  m.def(
      "ensemble_covariance",
      [](const SystemSpec& s, const SchedulePair& pair, std::uint64_t replicas,
         std::uint64_t steps, std::uint64_t seed, unsigned jobs) {
        EnsembleOptions o;
        o.replicas = replicas;
        o.steps = steps;
        o.checkpoints = {steps};
        o.base_seed = seed;
        o.jobs = jobs;
        EnsembleResult res;
        {
          py::gil_scoped_release release;
          res = run_ensemble(s, pair, o);
        }
        const auto est = scaled_covariances(res.theta_hat[0], res.r_hat[0], res.beta[0],
                                            res.gamma[0]);
        py::dict d;
        d["sigma11"] = est.sigma11;
        d["sigma12"] = est.sigma12;
        d["sigma22"] = est.sigma22;
        d["theta_hat"] = res.theta_hat[0];
        d["beta"] = res.beta[0];
        return d;
      },
      py::arg("spec"), py::arg("pair"), py::arg("replicas"), py::arg("steps"),
      py::arg("seed") = 1, py::arg("jobs") = 1);

  m.def("normality_check", &normality_check, py::arg("theta_hat"), py::arg("beta"),
        py::arg("sigma11"));

  m.def("load_config", [](const std::string& path) {
    const RunConfig c = load_config(path);
    return py::make_tuple(c.system(), c.schedules());
  });
}
