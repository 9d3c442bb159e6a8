#include "previnc/commands.hpp"

#include <chrono>
#include <fstream>

#include "previnc/errors.hpp"
#include "previnc/io.hpp"

namespace previnc {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

NpmleSummary summarize(const NpmleFit& fit, TailPolicy policy) {
  NpmleSummary s;
  s.support_size = fit.lb.support.size();
  s.iterations = fit.iterations;
  s.converged = fit.converged;
  s.tail_policy = tail_policy_name(policy);
  s.tail_atom_added = fit.tail_atom_added;
  s.tail_deficit = fit.tail_deficit;
  return s;
}

ScreeningFrame load_frame(const std::string& csv_path, std::size_t s) {
  ScreeningFrame frame;
  frame.s = s;
  frame.records = read_records_csv(csv_path);
  const auto violations = validate_frame(frame);
  if (!violations.empty()) throw Error(ErrorKind::FrameInvalid, violations.front());
  return frame;
}

BootstrapConfig bootstrap_config(const BootstrapOpts& opts, TailPolicy policy,
                                 std::optional<double> prevalence_override = {}) {
  BootstrapConfig config;
  config.B = opts.B;
  config.level = opts.level;
  config.seed = opts.seed;
  config.threads = opts.threads;
  config.npmle.tail_policy = policy;
  config.prevalence_override = prevalence_override;
  return config;
}

}  // namespace

RunReport cmd_estimate(const EstimateArgs& args) {
  Stopwatch timer;
  RunReport report;
  report.command = "estimate";

  if (!args.csv_path) {
    // summary mode: the rate is reproducible from (P, mu) alone
    if (!args.prevalence_override || !args.mu_summary) {
      throw Error(ErrorKind::ConfigInvalid,
                  "summary mode needs both --prevalence and --mu when no data CSV is given");
    }
    IncidenceEstimate est;
    est.prevalence = *args.prevalence_override;
    est.mu = *args.mu_summary;
    est.lambda = lambda_hat(est.prevalence, est.mu);
    report.estimates = est;
    report.inputs_digest = files_digest({});
    report.timing_seconds = timer.seconds();
    return report;
  }

  if (args.mu_summary) {
    throw Error(ErrorKind::ConfigInvalid, "--mu only applies in summary mode (without a data CSV)");
  }
  const ScreeningFrame frame = load_frame(*args.csv_path, args.s);
  NpmleOptions options;
  options.tail_policy = args.tail_policy;

  report.inputs_digest = files_digest({*args.csv_path});
  NpmleFit fit;
  report.estimates = estimate_overall(frame, options, args.prevalence_override, &fit);
  report.npmle = summarize(fit, args.tail_policy);
  if (args.bootstrap.B > 0) {
    report.bootstrap = bootstrap_lambda(
        frame, bootstrap_config(args.bootstrap, args.tail_policy, args.prevalence_override));
  }
  report.timing_seconds = timer.seconds();
  return report;
}

RunReport cmd_estimate_age(const EstimateAgeArgs& args) {
  Stopwatch timer;
  RunReport report;
  report.command = "estimate-age";

  const ScreeningFrame frame = load_frame(args.csv_path, args.s);
  const AgeDistribution age = read_age_csv(args.age_csv_path);
  if (!age.single_segment() && args.tau_star && !age.covers(*args.tau_star)) {
    throw Error(ErrorKind::CoverageGap, "age segments do not cover [0, tau_star]");
  }
  NpmleOptions options;
  options.tail_policy = args.tail_policy;

  report.inputs_digest = files_digest({args.csv_path, args.age_csv_path});
  NpmleFit pooled;
  report.estimates = estimate_age(frame, age, args.tau_star, options, {}, &pooled);
  report.npmle = summarize(pooled, args.tail_policy);
  if (args.bootstrap.B > 0) {
    report.category_bootstrap = bootstrap_lambda_age(
        frame, age, args.tau_star, bootstrap_config(args.bootstrap, args.tail_policy));
  }
  report.timing_seconds = timer.seconds();
  return report;
}

RunReport cmd_simulate(const std::string& config_path, const std::string& out_csv,
                       const std::optional<std::string>& meta_path) {
  Stopwatch timer;
  const SimRun run = read_sim_config(config_path);
  const ScreeningFrame frame =
      run.mode == SimMode::window ? sim_window(run.config) : sim_equilibrium(run.config);
  write_records_csv(out_csv, frame.records);

  SimSummary summary;
  summary.mode = sim_mode_name(run.mode);
  summary.s = frame.s;
  summary.realized_n = frame.n();
  for (const auto& r : frame.records) summary.realized_events += r.event ? 1 : 0;
  summary.prevalence_true = run.config.prevalence_true();
  summary.mu_true = run.config.mu_true();

  nlohmann::ordered_json meta;
  meta["schema_version"] = 1;
  meta["mode"] = summary.mode;
  meta["s"] = run.config.s;
  meta["seed"] = run.config.seed;
  meta["tau_star"] = run.config.tau_star;
  meta["ramp"] = run.config.ramp;
  if (run.config.age) {
    meta["rates"] = run.config.age->rates;
    meta["categories"] = run.config.age->age.categories;
  } else {
    meta["lambda_true"] = run.config.lambda_true;
  }
  meta["mu_true"] = summary.mu_true;
  meta["prevalence_true"] = summary.prevalence_true;
  meta["lambda_overall_true"] = summary.mu_true > 0.0
                                    ? summary.prevalence_true / summary.mu_true
                                    : 0.0;
  meta["realized_n"] = summary.realized_n;
  meta["realized_events"] = summary.realized_events;
  const std::string sidecar = meta_path ? *meta_path : out_csv + ".meta.json";
  std::ofstream meta_file(sidecar, std::ios::binary);
  if (!meta_file) throw Error(ErrorKind::ConfigInvalid, "cannot write " + sidecar);
  meta_file << meta.dump(2) << '\n';

  RunReport report;
  report.command = "simulate";
  report.inputs_digest = files_digest({config_path});
  report.simulation = summary;
  report.timing_seconds = timer.seconds();
  return report;
}

RunReport cmd_diagnose(const std::string& csv_path, std::size_t permutations, std::uint64_t seed,
                       unsigned threads) {
  Stopwatch timer;
  const auto records = read_records_csv(csv_path);
  RunReport report;
  report.command = "diagnose";
  report.inputs_digest = files_digest({csv_path});
  report.diagnostics = exchangeability_test(records, permutations, seed, threads);
  report.timing_seconds = timer.seconds();
  return report;
}

}  // namespace previnc
