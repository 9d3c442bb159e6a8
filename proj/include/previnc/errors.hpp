#ifndef PREVINC_ERRORS_HPP
#define PREVINC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace previnc {

/// Error kinds raised by the library, each mapped to a stable CLI exit code.
enum class ErrorKind {
  ParseError,             // malformed input file
  InvalidCounts,          // count preconditions violated (n > s, s = 0, ...)
  SupportMismatch,        // uncensored total absent from a supplied support
  ZeroDuration,           // mu <= 0 where a positive duration is required
  ZeroAgeProbability,     // age category with cases but zero population share
  ZeroDenominator,        // degenerate age-specific denominator integral
  CoverageGap,            // age segments do not cover [0, tau*]
  MissingAgeCategory,     // record category absent from the age distribution
  FrameInvalid,           // ScreeningFrame invariants violated
  UndefinedTail,          // survivor mass beyond the largest censored time
  NoEvents,               // no uncensored records to anchor the fit
  TooFewEvents,           // diagnostic needs more uncensored pairs
  TooFewValidReplicates,  // too many degenerate bootstrap replicates
  ConfigInvalid,          // simulation/run configuration rejected
  PrevalenceOutOfRange,   // implied prevalence not in (0,1)
};

/// Process exit code for an error kind (0 = success is never an error).
constexpr int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
      return 2;
    case ErrorKind::InvalidCounts:
    case ErrorKind::SupportMismatch:
    case ErrorKind::ZeroDuration:
    case ErrorKind::ZeroAgeProbability:
    case ErrorKind::ZeroDenominator:
    case ErrorKind::CoverageGap:
    case ErrorKind::MissingAgeCategory:
    case ErrorKind::FrameInvalid:
      return 3;
    case ErrorKind::UndefinedTail:
      return 4;
    case ErrorKind::NoEvents:
    case ErrorKind::TooFewEvents:
    case ErrorKind::TooFewValidReplicates:
      return 5;
    case ErrorKind::ConfigInvalid:
    case ErrorKind::PrevalenceOutOfRange:
      return 6;
  }
  return 1;
}

const char* error_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int code() const { return exit_code(kind_); }
  const char* name() const { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace previnc

#endif  // PREVINC_ERRORS_HPP
