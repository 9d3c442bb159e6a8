#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "previnc/bootstrap.hpp"
#include "previnc/commands.hpp"
#include "previnc/diagnostics.hpp"
#include "previnc/errors.hpp"
#include "previnc/incidence.hpp"
#include "previnc/io.hpp"
#include "previnc/npmle.hpp"
#include "previnc/simulate.hpp"

namespace py = pybind11;
using namespace previnc;

namespace {

std::vector<PrevalentRecord> make_records(const std::vector<double>& bwd,
                                          const std::vector<double>& fwd_obs,
                                          const std::vector<bool>& event,
                                          const std::vector<std::string>& age_cat) {
  if (bwd.size() != fwd_obs.size() || bwd.size() != event.size() ||
      (!age_cat.empty() && age_cat.size() != bwd.size())) {
    throw Error(ErrorKind::ConfigInvalid, "record arrays must have equal length");
  }
  std::vector<PrevalentRecord> records(bwd.size());
  for (std::size_t i = 0; i < bwd.size(); ++i) {
    records[i].bwd = bwd[i];
    records[i].fwd_obs = fwd_obs[i];
    records[i].event = event[i];
    if (!age_cat.empty() && !age_cat[i].empty()) records[i].age_cat = age_cat[i];
  }
  return records;
}

AgeDistribution make_age(const std::vector<std::string>& categories,
                         const std::vector<std::tuple<double, double, std::vector<double>>>& segments) {
  AgeDistribution age;
  age.categories = categories;
  for (const auto& [start, end, probs] : segments) {
    age.segments.push_back(AgeSegment{start, end, probs});
  }
  const auto violations = age.validate();
  if (!violations.empty()) throw Error(ErrorKind::ConfigInvalid, violations.front());
  return age;
}

}  // namespace

PYBIND11_MODULE(previnc, m) {
  m.doc() = "incidence rate estimation from prevalent-cohort follow-up data";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, (std::string(e.name()) + ": " + e.what()).c_str());
    }
  });

  py::class_<SurvivalCurve>(m, "SurvivalCurve")
      .def_readonly("support", &SurvivalCurve::support)
      .def_readonly("mass", &SurvivalCurve::mass)
      .def_readonly("complete_tail", &SurvivalCurve::complete_tail)
      .def("tail_deficit", &SurvivalCurve::tail_deficit)
      .def("__call__", [](const SurvivalCurve& c, double x) { return survival_at(c, x); })
      .def("mean_duration", [](const SurvivalCurve& c) { return mean_duration(c); });

  py::class_<NpmleFit>(m, "NpmleFit")
      .def_readonly("curve", &NpmleFit::curve)
      .def_readonly("mu_hat", &NpmleFit::mu_hat)
      .def_readonly("loglik", &NpmleFit::loglik)
      .def_readonly("iterations", &NpmleFit::iterations)
      .def_readonly("converged", &NpmleFit::converged)
      .def_readonly("tail_atom_added", &NpmleFit::tail_atom_added)
      .def_readonly("tail_deficit", &NpmleFit::tail_deficit)
      .def_property_readonly("support", [](const NpmleFit& f) { return f.lb.support; })
      .def_property_readonly("lb_masses", [](const NpmleFit& f) { return f.lb.q; });

  py::class_<CategoryEstimate>(m, "CategoryEstimate")
      .def_readonly("category", &CategoryEstimate::category)
      .def_readonly("count", &CategoryEstimate::count)
      .def_readonly("mu", &CategoryEstimate::mu)
      .def_readonly("lambda_", &CategoryEstimate::lambda)
      .def_readonly("flags", &CategoryEstimate::flags);

  py::class_<IncidenceEstimate>(m, "IncidenceEstimate")
      .def_readonly("lambda_", &IncidenceEstimate::lambda)
      .def_readonly("prevalence", &IncidenceEstimate::prevalence)
      .def_readonly("mu", &IncidenceEstimate::mu)
      .def_readonly("per_category", &IncidenceEstimate::per_category)
      .def_readonly("flags", &IncidenceEstimate::flags);

  py::class_<BootstrapResult>(m, "BootstrapResult")
      .def_readonly("estimates", &BootstrapResult::estimates)
      .def_readonly("ci_lower", &BootstrapResult::ci_lower)
      .def_readonly("ci_upper", &BootstrapResult::ci_upper)
      .def_readonly("level", &BootstrapResult::level)
      .def_readonly("B", &BootstrapResult::B)
      .def_readonly("seed", &BootstrapResult::seed)
      .def_readonly("degenerate_count", &BootstrapResult::degenerate_count);

  py::class_<DiagnosticResult>(m, "DiagnosticResult")
      .def_readonly("statistic", &DiagnosticResult::statistic)
      .def_readonly("p_value", &DiagnosticResult::p_value)
      .def_readonly("n_pairs", &DiagnosticResult::n_pairs)
      .def_readonly("n_permutations", &DiagnosticResult::n_permutations)
      .def_readonly("seed", &DiagnosticResult::seed);

  m.def(
      "fit_npmle",
      [](const std::vector<double>& bwd, const std::vector<double>& fwd_obs,
         const std::vector<bool>& event, double tol, std::size_t max_iter,
         const std::string& tail_policy) {
        NpmleOptions options;
        options.tol = tol;
        options.max_iter = max_iter;
        options.tail_policy = tail_policy_from_name(tail_policy);
        return npmle_lb_em(make_records(bwd, fwd_obs, event, {}), options);
      },
      py::arg("bwd"), py::arg("fwd_obs"), py::arg("event"), py::arg("tol") = 1e-10,
      py::arg("max_iter") = 100000, py::arg("tail_policy") = "strict",
      "NPMLE of the length-biased duration distribution from followed prevalent cases");

  m.def(
      "wang_product_limit",
      [](const std::vector<double>& bwd, const std::vector<double>& fwd_obs,
         const std::vector<bool>& event) {
        return wang_product_limit(make_records(bwd, fwd_obs, event, {})).curve;
      },
      py::arg("bwd"), py::arg("fwd_obs"), py::arg("event"),
      "left-truncation product-limit comparator (no stationarity assumption)");

  m.def("prevalence_hat", &prevalence_hat, py::arg("n"), py::arg("s"),
        py::arg("override") = std::nullopt);
  m.def("lambda_hat", &lambda_hat, py::arg("p_hat"), py::arg("mu_hat"));
  m.def("lemma1_residual", &lemma1_residual, py::arg("p_hat"), py::arg("mu_hat"), py::arg("p"),
        py::arg("mu"));

  m.def(
      "estimate",
      [](const std::vector<double>& bwd, const std::vector<double>& fwd_obs,
         const std::vector<bool>& event, std::size_t s, std::optional<double> prevalence,
         const std::string& tail_policy) {
        ScreeningFrame frame;
        frame.s = s;
        frame.records = make_records(bwd, fwd_obs, event, {});
        NpmleOptions options;
        options.tail_policy = tail_policy_from_name(tail_policy);
        return estimate_overall(frame, options, prevalence);
      },
      py::arg("bwd"), py::arg("fwd_obs"), py::arg("event"), py::arg("s"),
      py::arg("prevalence") = std::nullopt, py::arg("tail_policy") = "strict");

  m.def(
      "estimate_age",
      [](const std::vector<double>& bwd, const std::vector<double>& fwd_obs,
         const std::vector<bool>& event, const std::vector<std::string>& age_cat, std::size_t s,
         const std::vector<std::string>& categories,
         const std::vector<std::tuple<double, double, std::vector<double>>>& segments,
         std::optional<double> tau_star, const std::string& tail_policy) {
        ScreeningFrame frame;
        frame.s = s;
        frame.records = make_records(bwd, fwd_obs, event, age_cat);
        NpmleOptions options;
        options.tail_policy = tail_policy_from_name(tail_policy);
        return estimate_age(frame, make_age(categories, segments), tau_star, options);
      },
      py::arg("bwd"), py::arg("fwd_obs"), py::arg("event"), py::arg("age_cat"), py::arg("s"),
      py::arg("categories"), py::arg("segments"), py::arg("tau_star") = std::nullopt,
      py::arg("tail_policy") = "strict");

  m.def(
      "bootstrap_lambda",
      [](const std::vector<double>& bwd, const std::vector<double>& fwd_obs,
         const std::vector<bool>& event, std::size_t s, std::size_t B, double level,
         std::uint64_t seed, std::optional<double> prevalence, const std::string& tail_policy,
         unsigned threads) {
        ScreeningFrame frame;
        frame.s = s;
        frame.records = make_records(bwd, fwd_obs, event, {});
        BootstrapConfig config;
        config.B = B;
        config.level = level;
        config.seed = seed;
        config.prevalence_override = prevalence;
        config.npmle.tail_policy = tail_policy_from_name(tail_policy);
        config.threads = threads;
        return bootstrap_lambda(frame, config);
      },
      py::arg("bwd"), py::arg("fwd_obs"), py::arg("event"), py::arg("s"), py::arg("B") = 1000,
      py::arg("level") = 0.95, py::arg("seed") = 0, py::arg("prevalence") = std::nullopt,
      py::arg("tail_policy") = "strict", py::arg("threads") = 0,
      "percentile bootstrap interval for the overall rate");

  m.def(
      "exchangeability_test",
      [](const std::vector<double>& bwd, const std::vector<double>& fwd_obs,
         const std::vector<bool>& event, std::size_t n_permutations, std::uint64_t seed) {
        return exchangeability_test(make_records(bwd, fwd_obs, event, {}), n_permutations, seed);
      },
      py::arg("bwd"), py::arg("fwd_obs"), py::arg("event"), py::arg("n_permutations") = 999,
      py::arg("seed") = 0, "backward/forward exchangeability diagnostic for stationarity");

  m.def(
      "simulate",
      [](std::size_t s, double lambda, const std::string& survival_json,
         const std::string& censor_json, double tau_star, std::uint64_t seed,
         const std::string& mode, double ramp) {
        // survival / censor follow the CLI JSON schema, e.g.
        // {"dist":"exponential","mean":5.0}; censor may be "".
        nlohmann::json cfg;
        cfg["s"] = s;
        cfg["lambda"] = lambda;
        cfg["survival"] = nlohmann::json::parse(survival_json);
        if (!censor_json.empty()) cfg["censor"] = nlohmann::json::parse(censor_json);
        cfg["tau_star"] = tau_star;
        cfg["seed"] = seed;
        cfg["mode"] = mode;
        cfg["ramp"] = ramp;
        const SimRun run = parse_sim_run(cfg.dump());
        const ScreeningFrame frame =
            run.mode == SimMode::window ? sim_window(run.config) : sim_equilibrium(run.config);
        py::dict out;
        std::vector<double> out_bwd, out_fwd;
        std::vector<bool> out_event;
        for (const auto& r : frame.records) {
          out_bwd.push_back(r.bwd);
          out_fwd.push_back(r.fwd_obs);
          out_event.push_back(r.event);
        }
        out["bwd"] = out_bwd;
        out["fwd_obs"] = out_fwd;
        out["event"] = out_event;
        out["s"] = frame.s;
        out["prevalence_true"] = run.config.prevalence_true();
        out["mu_true"] = run.config.mu_true();
        return out;
      },
      py::arg("s"), py::arg("lambda"), py::arg("survival"), py::arg("censor") = "",
      py::arg("tau_star") = 0.0, py::arg("seed") = 0, py::arg("mode") = "equilibrium",
      py::arg("ramp") = 0.0, "generate a synthetic prevalent cohort");
}
