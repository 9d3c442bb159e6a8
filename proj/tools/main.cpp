#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "previnc/commands.hpp"
#include "previnc/errors.hpp"

namespace {

using previnc::RunReport;

void emit_report(const RunReport& report, const std::optional<std::string>& out_path) {
  const std::string text = previnc::report_to_json(report).dump(2) + "\n";
  if (out_path) {
    std::ofstream out(*out_path, std::ios::binary);
    if (!out) {
      throw previnc::Error(previnc::ErrorKind::ConfigInvalid, "cannot write " + *out_path);
    }
    out << text;
  } else {
    std::cout << text;
  }
}

struct CommonOpts {
  std::optional<std::string> out_path;
  std::string tail_policy = "strict";
  previnc::BootstrapOpts bootstrap;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_bootstrap) {
  cmd->add_option("--out", opts.out_path, "write the JSON report here instead of stdout");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores); never changes results");
  if (with_bootstrap) {
    cmd->add_option("--tail-policy", opts.tail_policy, "strict | tail-at-max-censored")
        ->check(CLI::IsMember({"strict", "tail-at-max-censored"}));
    cmd->add_option("--bootstrap", opts.bootstrap.B, "number of bootstrap replicates (0 = off)");
    cmd->add_option("--level", opts.bootstrap.level, "bootstrap confidence level")
        ->default_val(0.95);
    cmd->add_option("--seed", opts.bootstrap.seed, "bootstrap seed")->default_val(0);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"incidence estimation from prevalent-cohort follow-up data"};
  app.require_subcommand(1);

  // estimate
  auto* estimate = app.add_subcommand("estimate", "overall incidence rate");
  std::string est_csv;
  std::size_t est_s = 0;
  double est_prevalence = -1.0;
  double est_mu = -1.0;
  CommonOpts est_opts;
  estimate->add_option("--data", est_csv, "record CSV (bwd,fwd_obs,event,age_cat)");
  estimate->add_option("--s", est_s, "number of subjects screened");
  estimate->add_option("--prevalence", est_prevalence,
                       "prevalence override (standardized estimates); with --mu and no --data, "
                       "summary mode");
  estimate->add_option("--mu", est_mu, "mean duration in years (summary mode)");
  add_common(estimate, est_opts, true);

  // estimate-age
  auto* estimate_age = app.add_subcommand("estimate-age", "age-specific incidence rates");
  std::string age_csv;
  std::string age_dist_csv;
  std::size_t age_s = 0;
  double tau_star = -1.0;
  CommonOpts age_opts;
  estimate_age->add_option("--data", age_csv, "record CSV with age_cat set")->required();
  estimate_age->add_option("--s", age_s, "number of subjects screened")->required();
  estimate_age->add_option("--age", age_dist_csv, "age-distribution CSV")->required();
  estimate_age->add_option("--tau-star", tau_star,
                           "recruitment time (required for multi-segment age files)");
  add_common(estimate_age, age_opts, true);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic cohort");
  std::string sim_config;
  std::string sim_out;
  std::optional<std::string> sim_meta;
  CommonOpts sim_opts;
  simulate->add_option("--config", sim_config, "JSON simulation configuration")->required();
  simulate->add_option("--out-csv", sim_out, "output record CSV")->required();
  simulate->add_option("--meta", sim_meta, "sidecar path (default <out-csv>.meta.json)");
  add_common(simulate, sim_opts, false);

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "stationarity diagnostic");
  std::string diag_csv;
  std::size_t permutations = 999;
  std::uint64_t diag_seed = 0;
  CommonOpts diag_opts;
  diagnose->add_option("--data", diag_csv, "record CSV")->required();
  diagnose->add_option("--permutations", permutations, "number of sign-flip permutations")
      ->default_val(999);
  diagnose->add_option("--seed", diag_seed, "permutation seed")->default_val(0);
  add_common(diagnose, diag_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "{\"error\":{\"name\":\"UsageError\",\"exit_code\":6,\"message\":"
              << nlohmann::json(std::string(e.what())).dump() << "}}\n";
    return 6;
  }

  try {
    if (estimate->parsed()) {
      previnc::EstimateArgs args;
      if (!est_csv.empty()) args.csv_path = est_csv;
      args.s = est_s;
      if (est_prevalence >= 0.0) args.prevalence_override = est_prevalence;
      if (est_mu >= 0.0) args.mu_summary = est_mu;
      args.tail_policy = previnc::tail_policy_from_name(est_opts.tail_policy);
      args.bootstrap = est_opts.bootstrap;
      args.bootstrap.threads = est_opts.threads;
      emit_report(previnc::cmd_estimate(args), est_opts.out_path);
    } else if (estimate_age->parsed()) {
      previnc::EstimateAgeArgs args;
      args.csv_path = age_csv;
      args.s = age_s;
      args.age_csv_path = age_dist_csv;
      if (tau_star >= 0.0) args.tau_star = tau_star;
      args.tail_policy = previnc::tail_policy_from_name(age_opts.tail_policy);
      args.bootstrap = age_opts.bootstrap;
      args.bootstrap.threads = age_opts.threads;
      emit_report(previnc::cmd_estimate_age(args), age_opts.out_path);
    } else if (simulate->parsed()) {
      emit_report(previnc::cmd_simulate(sim_config, sim_out, sim_meta), sim_opts.out_path);
    } else if (diagnose->parsed()) {
      emit_report(previnc::cmd_diagnose(diag_csv, permutations, diag_seed, diag_opts.threads),
                  diag_opts.out_path);
    }
  } catch (const previnc::Error& e) {
    std::cerr << previnc::error_to_json(e).dump() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":{\"name\":\"InternalError\",\"exit_code\":1,\"message\":"
              << nlohmann::json(std::string(e.what())).dump() << "}}\n";
    return 1;
  }
  return 0;
}
