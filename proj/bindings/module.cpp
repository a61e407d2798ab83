#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qso/acsa.hpp"
#include "qso/bench.hpp"
#include "qso/line_search.hpp"
#include "qso/nonconvex.hpp"
#include "qso/verify.hpp"

namespace py = pybind11;

namespace {

using namespace qso;

BackendConfig backend_config_from(const std::string& mode, const std::string& noise,
                                  bool failures, double c_qme) {
  BackendConfig cfg;
  if (mode == "contract")
    cfg.mode = BackendMode::contract;
  else if (mode == "sample")
    cfg.mode = BackendMode::sample_based;
  else
    throw config_error("backend mode must be 'contract' or 'sample'");
  if (noise == "honest")
    cfg.noise = NoisePolicy::honest_gaussian_clipped;
  else if (noise == "adversarial")
    cfg.noise = NoisePolicy::adversarial_boundary;
  else
    throw config_error("noise policy must be 'honest' or 'adversarial'");
  cfg.inject_failures = failures;
  cfg.c_qme = c_qme;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Classical testbed for quantum-query stochastic optimization";

  py::register_exception<capability_error>(m, "CapabilityError", PyExc_RuntimeError);
  py::register_exception<contract_violation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("stream") = 0)
      .def("next_u64", &Rng::next_u64)
      .def("next_double", &Rng::next_double)
      .def("next_coin", &Rng::next_coin)
      .def("next_gaussian", &Rng::next_gaussian)
      .def("gaussian_vec", &Rng::gaussian_vec, py::arg("d"))
      .def("unit_vec", &Rng::unit_vec, py::arg("d"))
      .def("child", &Rng::child, py::arg("stream"));

  py::class_<QueryLedger>(m, "QueryLedger")
      .def(py::init<>())
      .def_property_readonly("quantum_queries_charged",
                             &QueryLedger::quantum_queries_charged)
      .def_property_readonly("classical_samples_drawn",
                             &QueryLedger::classical_samples_drawn)
      .def("by_phase", [](const QueryLedger& l) {
        py::dict out;
        for (const auto& [name, c] : l.by_phase())
          out[py::str(name)] = py::make_tuple(c.quantum, c.classical);
        return out;
      });

  m.def(
      "charge_cost",
      [](QueryLedger& ledger, double l_eff, double sigma_hat, double delta, int dim,
         double c_qme) { return charge_cost(ledger, l_eff, sigma_hat, delta, dim, c_qme); },
      py::arg("ledger"), py::arg("l_eff"), py::arg("sigma_hat"), py::arg("delta"),
      py::arg("dim"), py::arg("c_qme") = 1.0);

  py::class_<MeanEstimationBackend>(m, "Backend");
  m.def("backend",
        [](const std::string& mode, const std::string& noise, bool failures,
           double c_qme) {
          return MeanEstimationBackend(backend_config_from(mode, noise, failures, c_qme));
        },
        py::arg("mode") = "contract", py::arg("noise") = "honest",
        py::arg("failures") = false, py::arg("c_qme") = 1.0);

  py::class_<ProblemInstance>(m, "Problem")
      .def_readonly("kind", &ProblemInstance::kind)
      .def_readonly("radius", &ProblemInstance::radius)
      .def_readonly("lipschitz", &ProblemInstance::lipschitz)
      .def_readonly("smoothness", &ProblemInstance::smoothness)
      .def_readonly("variance", &ProblemInstance::variance)
      .def_readonly("gap_bound", &ProblemInstance::gap_bound)
      .def_readonly("optimum_value", &ProblemInstance::optimum_value)
      .def_readonly("minimizer", &ProblemInstance::minimizer)
      .def_property_readonly("dim",
                             [](const ProblemInstance& p) { return p.oracle->dim(); })
      .def("objective",
           [](const ProblemInstance& p, const Vec& x) {
             if (!p.objective) throw capability_error("fixture: no objective");
             return p.objective(x);
           },
           py::arg("x"))
      .def("gradient",
           [](const ProblemInstance& p, const Vec& x) {
             if (!p.gradient) throw capability_error("fixture: no gradient");
             return p.gradient(x);
           },
           py::arg("x"))
      .def("sample",
           [](const ProblemInstance& p, const Vec& x, Rng& rng, QueryLedger& ledger) {
             return p.oracle->sample(x, rng, ledger);
           },
           py::arg("x"), py::arg("rng"), py::arg("ledger"))
      .def("exact_mean",
           [](const ProblemInstance& p, const Vec& x) { return p.oracle->exact_mean(x); },
           py::arg("x"));

  m.def("make_fixture",
        [](const std::string& kind, Eigen::Index d, Rng& rng, double lipschitz,
           double radius, const std::map<std::string, double>& extra) {
          FixtureParams params;
          params.lipschitz = lipschitz;
          params.radius = radius;
          params.extra = extra;
          return make_fixture(kind, d, params, rng);
        },
        py::arg("kind"), py::arg("d"), py::arg("rng"), py::arg("lipschitz") = 1.0,
        py::arg("radius") = 1.0, py::arg("extra") = std::map<std::string, double>{});

  m.def("estimate_mean",
        [](const MeanEstimationBackend& backend, const ProblemInstance& p, const Vec& x,
           double sigma_hat, double delta, Rng& rng, QueryLedger& ledger) {
          return backend.estimate_mean(gradient_source(p.oracle, x), sigma_hat, delta,
                                       rng, ledger);
        },
        py::arg("backend"), py::arg("problem"), py::arg("x"), py::arg("sigma_hat"),
        py::arg("delta"), py::arg("rng"), py::arg("ledger"));

  m.def("mlmc_gradient",
        [](const MeanEstimationBackend& backend, const ProblemInstance& p, const Vec& x,
           double sigma_hat, Rng& rng, QueryLedger& ledger) {
          return mlmc_variance_reduce(backend, gradient_source(p.oracle, x), sigma_hat,
                                      rng, ledger);
        },
        py::arg("backend"), py::arg("problem"), py::arg("x"), py::arg("sigma_hat"),
        py::arg("rng"), py::arg("ledger"));

  py::class_<GradientEstimate>(m, "GradientEstimate")
      .def_readonly("value", &GradientEstimate::value)
      .def_readonly("degraded", &GradientEstimate::degraded);
  m.def("approx_gradient",
        [](const MeanEstimationBackend& backend, const ProblemInstance& p, const Vec& x,
           double delta_err, double xi, Rng& rng, QueryLedger& ledger) {
          return approx_gradient(backend, gradient_source(p.oracle, x), delta_err, xi,
                                 rng, ledger);
        },
        py::arg("backend"), py::arg("problem"), py::arg("x"), py::arg("delta_err"),
        py::arg("xi"), py::arg("rng"), py::arg("ledger"));

  py::class_<AcsaResult>(m, "AcsaResult")
      .def_readonly("x", &AcsaResult::x)
      .def_readonly("iterations", &AcsaResult::iterations)
      .def_readonly("clamped", &AcsaResult::clamped);
  m.def("run_acsa", &run_acsa, py::arg("problem"), py::arg("epsilon"),
        py::arg("backend"), py::arg("rng"), py::arg("ledger"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<QscpResult>(m, "QscpResult")
      .def_readonly("x", &QscpResult::x)
      .def_readonly("candidate_count", &QscpResult::candidate_count)
      .def_readonly("degraded", &QscpResult::degraded);
  m.def("run_qscp", &run_qscp, py::arg("problem"), py::arg("epsilon"),
        py::arg("backend"), py::arg("rng"), py::arg("ledger"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<QsgdResult>(m, "QsgdResult")
      .def_readonly("x", &QsgdResult::x)
      .def_readonly("steps", &QsgdResult::steps);
  m.def("run_qsgd", &run_qsgd, py::arg("problem"), py::arg("epsilon"),
        py::arg("backend"), py::arg("rng"), py::arg("ledger"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<QspiderResult>(m, "QspiderResult")
      .def_readonly("x", &QspiderResult::x)
      .def_readonly("steps", &QspiderResult::steps)
      .def_readonly("early", &QspiderResult::early)
      .def_readonly("max_step_error", &QspiderResult::max_step_error);
  m.def("run_qspider", &run_qspider, py::arg("problem"), py::arg("epsilon"),
        py::arg("backend"), py::arg("rng"), py::arg("ledger"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<SgdResult>(m, "SgdResult")
      .def_readonly("x", &SgdResult::x)
      .def_readonly("steps", &SgdResult::steps);
  m.def("run_sgd_baseline", &run_sgd_baseline, py::arg("problem"), py::arg("epsilon"),
        py::arg("rng"), py::arg("ledger"), py::call_guard<py::gil_scoped_release>());

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("measured", &CheckResult::measured)
      .def_readonly("bound", &CheckResult::bound)
      .def_readonly("at_least", &CheckResult::at_least)
      .def_readonly("ok", &CheckResult::pass)
      .def("margin", &CheckResult::margin);
  py::class_<VerifyReport>(m, "VerifyReport")
      .def_readonly("suite", &VerifyReport::suite)
      .def_readonly("checks", &VerifyReport::checks)
      .def_property_readonly("ok", &VerifyReport::pass);
  m.def("verify_suite_names", [] { return verify_suite_names(); });
  m.def("run_verify_suite", &run_verify_suite, py::arg("suite"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("format_report", &format_report, py::arg("report"));

  // Sweep a parsed config; returns (csv_text, summary_json_text). jobs > 1 is
  // schedule-independent so the pair is reproducible either way.
  m.def("run_sweep_config",
        [](const std::string& text, int jobs) {
          const ExperimentConfig cfg = parse_config(text);
          const SweepResult result = [&] {
            py::gil_scoped_release release;
            return run_sweep(cfg, jobs);
          }();
          return py::make_tuple(csv_document(result.records), summary_json(cfg, result));
        },
        py::arg("text"), py::arg("jobs") = 1);
  m.def("predicted_exponent", &predicted_exponent, py::arg("algorithm"));
  m.attr("CSV_HEADER") = kCsvHeader;
}
