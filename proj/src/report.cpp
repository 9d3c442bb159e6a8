#include "previnc/report.hpp"

#include "previnc/errors.hpp"

namespace previnc {

namespace {

using nlohmann::ordered_json;

ordered_json estimates_to_json(const IncidenceEstimate& est) {
  ordered_json j;
  j["prevalence"] = est.prevalence;
  j["mu_years"] = est.mu;
  j["lambda_per_person_year"] = est.lambda;
  j["display_scale"] = kDisplayScale;
  j["lambda_display"] = est.lambda * kDisplayScale;
  ordered_json cats = ordered_json::array();
  for (const auto& cat : est.per_category) {
    ordered_json jc;
    jc["category"] = cat.category;
    jc["count"] = cat.count;
    if (cat.mu) {
      jc["mu_years"] = *cat.mu;
    } else {
      jc["mu_years"] = nullptr;
    }
    jc["lambda_per_person_year"] = cat.lambda;
    jc["lambda_display"] = cat.lambda * kDisplayScale;
    jc["flags"] = cat.flags;
    cats.push_back(std::move(jc));
  }
  j["per_category"] = std::move(cats);
  j["flags"] = est.flags;
  return j;
}

IncidenceEstimate estimates_from_json(const ordered_json& j) {
  IncidenceEstimate est;
  est.prevalence = j.at("prevalence").get<double>();
  est.mu = j.at("mu_years").get<double>();
  est.lambda = j.at("lambda_per_person_year").get<double>();
  for (const auto& jc : j.at("per_category")) {
    CategoryEstimate cat;
    cat.category = jc.at("category").get<std::string>();
    cat.count = jc.at("count").get<std::size_t>();
    if (!jc.at("mu_years").is_null()) cat.mu = jc.at("mu_years").get<double>();
    cat.lambda = jc.at("lambda_per_person_year").get<double>();
    cat.flags = jc.at("flags").get<std::vector<std::string>>();
    est.per_category.push_back(std::move(cat));
  }
  est.flags = j.at("flags").get<std::vector<std::string>>();
  return est;
}

ordered_json bootstrap_to_json(const BootstrapResult& b) {
  ordered_json j;
  j["B"] = b.B;
  j["level"] = b.level;
  j["seed"] = b.seed;
  j["ci_lower"] = b.ci_lower;
  j["ci_upper"] = b.ci_upper;
  j["ci_lower_display"] = b.ci_lower * kDisplayScale;
  j["ci_upper_display"] = b.ci_upper * kDisplayScale;
  j["degenerate_count"] = b.degenerate_count;
  j["estimates"] = b.estimates;
  return j;
}

BootstrapResult bootstrap_from_json(const ordered_json& j) {
  BootstrapResult b;
  b.B = j.at("B").get<std::size_t>();
  b.level = j.at("level").get<double>();
  b.seed = j.at("seed").get<std::uint64_t>();
  b.ci_lower = j.at("ci_lower").get<double>();
  b.ci_upper = j.at("ci_upper").get<double>();
  b.degenerate_count = j.at("degenerate_count").get<std::size_t>();
  b.estimates = j.at("estimates").get<std::vector<double>>();
  return b;
}

}  // namespace

nlohmann::ordered_json report_to_json(const RunReport& report) {
  ordered_json j;
  j["schema_version"] = report.schema_version;
  j["command"] = report.command;
  j["inputs_digest"] = report.inputs_digest;
  j["estimates"] = report.estimates ? estimates_to_json(*report.estimates) : ordered_json(nullptr);
  j["bootstrap"] = report.bootstrap ? bootstrap_to_json(*report.bootstrap) : ordered_json(nullptr);
  if (report.category_bootstrap) {
    ordered_json arr = ordered_json::array();
    for (const auto& b : *report.category_bootstrap) arr.push_back(bootstrap_to_json(b));
    j["category_bootstrap"] = std::move(arr);
  } else {
    j["category_bootstrap"] = nullptr;
  }
  if (report.diagnostics) {
    ordered_json jd;
    jd["statistic"] = report.diagnostics->statistic;
    jd["p_value"] = report.diagnostics->p_value;
    jd["n_pairs"] = report.diagnostics->n_pairs;
    jd["n_permutations"] = report.diagnostics->n_permutations;
    jd["seed"] = report.diagnostics->seed;
    j["diagnostics"] = std::move(jd);
  } else {
    j["diagnostics"] = nullptr;
  }
  if (report.npmle) {
    ordered_json jn;
    jn["support_size"] = report.npmle->support_size;
    jn["iterations"] = report.npmle->iterations;
    jn["converged"] = report.npmle->converged;
    jn["tail_policy"] = report.npmle->tail_policy;
    jn["tail_atom_added"] = report.npmle->tail_atom_added;
    jn["tail_deficit"] = report.npmle->tail_deficit;
    j["npmle"] = std::move(jn);
  } else {
    j["npmle"] = nullptr;
  }
  if (report.simulation) {
    ordered_json js;
    js["mode"] = report.simulation->mode;
    js["s"] = report.simulation->s;
    js["realized_n"] = report.simulation->realized_n;
    js["realized_events"] = report.simulation->realized_events;
    js["prevalence_true"] = report.simulation->prevalence_true;
    js["mu_true"] = report.simulation->mu_true;
    j["simulation"] = std::move(js);
  } else {
    j["simulation"] = nullptr;
  }
  j["timing_seconds"] = report.timing_seconds;
  return j;
}

RunReport report_from_json(const nlohmann::ordered_json& j) {
  RunReport report;
  report.schema_version = j.at("schema_version").get<int>();
  report.command = j.at("command").get<std::string>();
  report.inputs_digest = j.at("inputs_digest").get<std::string>();
  if (!j.at("estimates").is_null()) report.estimates = estimates_from_json(j.at("estimates"));
  if (!j.at("bootstrap").is_null()) report.bootstrap = bootstrap_from_json(j.at("bootstrap"));
  if (!j.at("category_bootstrap").is_null()) {
    std::vector<BootstrapResult> list;
    for (const auto& jb : j.at("category_bootstrap")) list.push_back(bootstrap_from_json(jb));
    report.category_bootstrap = std::move(list);
  }
  if (!j.at("diagnostics").is_null()) {
    const auto& jd = j.at("diagnostics");
    DiagnosticResult d;
    d.statistic = jd.at("statistic").get<double>();
    d.p_value = jd.at("p_value").get<double>();
    d.n_pairs = jd.at("n_pairs").get<std::size_t>();
    d.n_permutations = jd.at("n_permutations").get<std::size_t>();
    d.seed = jd.at("seed").get<std::uint64_t>();
    report.diagnostics = d;
  }
  if (!j.at("npmle").is_null()) {
    const auto& jn = j.at("npmle");
    NpmleSummary s;
    s.support_size = jn.at("support_size").get<std::size_t>();
    s.iterations = jn.at("iterations").get<std::size_t>();
    s.converged = jn.at("converged").get<bool>();
    s.tail_policy = jn.at("tail_policy").get<std::string>();
    s.tail_atom_added = jn.at("tail_atom_added").get<bool>();
    s.tail_deficit = jn.at("tail_deficit").get<double>();
    report.npmle = s;
  }
  if (!j.at("simulation").is_null()) {
    const auto& js = j.at("simulation");
    SimSummary s;
    s.mode = js.at("mode").get<std::string>();
    s.s = js.at("s").get<std::size_t>();
    s.realized_n = js.at("realized_n").get<std::size_t>();
    s.realized_events = js.at("realized_events").get<std::size_t>();
    s.prevalence_true = js.at("prevalence_true").get<double>();
    s.mu_true = js.at("mu_true").get<double>();
    report.simulation = s;
  }
  report.timing_seconds = j.at("timing_seconds").get<double>();
  return report;
}

nlohmann::ordered_json error_to_json(const Error& error) {
  ordered_json j;
  j["error"]["name"] = error.name();
  j["error"]["exit_code"] = error.code();
  j["error"]["message"] = error.what();
  return j;
}

}  // namespace previnc
