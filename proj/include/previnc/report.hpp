#ifndef PREVINC_REPORT_HPP
#define PREVINC_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "previnc/bootstrap.hpp"
#include "previnc/diagnostics.hpp"
#include "previnc/errors.hpp"
#include "previnc/incidence.hpp"

namespace previnc {

/// Rates are stored per person-year; reports also carry the value
/// multiplied by this display scale (per 1,000 person-years, the
/// conventional epidemiologic unit).
constexpr double kDisplayScale = 1000.0;

struct NpmleSummary {
  std::size_t support_size = 0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string tail_policy;
  bool tail_atom_added = false;
  double tail_deficit = 0.0;
};

struct SimSummary {
  std::string mode;
  std::size_t s = 0;
  std::size_t realized_n = 0;
  std::size_t realized_events = 0;
  double prevalence_true = 0.0;
  double mu_true = 0.0;
};

/// Machine-readable result of one CLI command. Serialization has a
/// fixed field order and round-trips losslessly; `timing_seconds` is
/// the only field outside the determinism contract.
struct RunReport {
  int schema_version = 1;
  std::string command;
  std::string inputs_digest;
  std::optional<IncidenceEstimate> estimates;
  std::optional<BootstrapResult> bootstrap;
  std::optional<std::vector<BootstrapResult>> category_bootstrap;
  std::optional<DiagnosticResult> diagnostics;
  std::optional<NpmleSummary> npmle;
  std::optional<SimSummary> simulation;
  double timing_seconds = 0.0;
};

nlohmann::ordered_json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::ordered_json& j);

/// Serialized error object printed on stderr by the CLI.
nlohmann::ordered_json error_to_json(const Error& error);

}  // namespace previnc

#endif  // PREVINC_REPORT_HPP
