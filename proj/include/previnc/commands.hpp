#ifndef PREVINC_COMMANDS_HPP
#define PREVINC_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "previnc/npmle.hpp"
#include "previnc/report.hpp"

namespace previnc {

struct BootstrapOpts {
  std::size_t B = 0;  // 0 = no bootstrap
  double level = 0.95;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct EstimateArgs {
  std::optional<std::string> csv_path;  // absent in summary mode
  std::size_t s = 0;
  std::optional<double> prevalence_override;
  std::optional<double> mu_summary;  // with prevalence_override: summary mode
  TailPolicy tail_policy = TailPolicy::strict;
  BootstrapOpts bootstrap;
};

/// Overall incidence from a record CSV (NPMLE of the duration
/// distribution, prevalence n/s or the override, rate by division,
/// optional bootstrap interval), or from summary statistics alone when
/// `mu_summary` and `prevalence_override` are given without data.
RunReport cmd_estimate(const EstimateArgs& args);

struct EstimateAgeArgs {
  std::string csv_path;
  std::size_t s = 0;
  std::string age_csv_path;
  std::optional<double> tau_star;  // required for multi-segment age files
  TailPolicy tail_policy = TailPolicy::strict;
  BootstrapOpts bootstrap;
};

/// Age-specific incidence: one NPMLE fit per onset-age category plus
/// the population age distribution from the age CSV.
RunReport cmd_estimate_age(const EstimateAgeArgs& args);

/// Generates a synthetic cohort from a JSON configuration, writing the
/// record CSV and a `<out>.meta.json` sidecar with the generating
/// parameters for oracle comparisons.
RunReport cmd_simulate(const std::string& config_path, const std::string& out_csv,
                       const std::optional<std::string>& meta_path = {});

/// Stationarity diagnostic on a record CSV.
RunReport cmd_diagnose(const std::string& csv_path, std::size_t permutations, std::uint64_t seed,
                       unsigned threads = 0);

}  // namespace previnc

#endif  // PREVINC_COMMANDS_HPP
