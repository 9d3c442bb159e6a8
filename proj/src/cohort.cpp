#include "previnc/cohort.hpp"

#include <cmath>

#include "previnc/errors.hpp"

namespace previnc {

const char* error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidCounts: return "InvalidCounts";
    case ErrorKind::SupportMismatch: return "SupportMismatch";
    case ErrorKind::ZeroDuration: return "ZeroDuration";
    case ErrorKind::ZeroAgeProbability: return "ZeroAgeProbability";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::CoverageGap: return "CoverageGap";
    case ErrorKind::MissingAgeCategory: return "MissingAgeCategory";
    case ErrorKind::FrameInvalid: return "FrameInvalid";
    case ErrorKind::UndefinedTail: return "UndefinedTail";
    case ErrorKind::NoEvents: return "NoEvents";
    case ErrorKind::TooFewEvents: return "TooFewEvents";
    case ErrorKind::TooFewValidReplicates: return "TooFewValidReplicates";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::PrevalenceOutOfRange: return "PrevalenceOutOfRange";
  }
  return "Error";
}

std::vector<std::string> validate_frame(const ScreeningFrame& frame) {
  std::vector<std::string> violations;
  if (frame.n() > frame.s) {
    violations.push_back("frame: n <= s violated (n=" + std::to_string(frame.n()) +
                         ", s=" + std::to_string(frame.s) + ")");
  }
  for (std::size_t i = 0; i < frame.records.size(); ++i) {
    const auto& r = frame.records[i];
    const std::string where = "record " + std::to_string(i) + ": ";
    if (!std::isfinite(r.bwd) || !std::isfinite(r.fwd_obs)) {
      violations.push_back(where + "durations must be finite");
      continue;
    }
    if (r.bwd < 0.0) violations.push_back(where + "bwd >= 0 violated");
    if (r.fwd_obs < 0.0) violations.push_back(where + "fwd_obs >= 0 violated");
    if (r.bwd >= 0.0 && r.fwd_obs >= 0.0 && r.bwd + r.fwd_obs <= 0.0) {
      violations.push_back(where + "bwd+fwd_obs > 0 violated");
    }
  }
  return violations;
}

SurvivalCurve lb_to_curve(const LBMasses& lb) {
  SurvivalCurve curve;
  curve.support = lb.support;
  curve.mass.resize(lb.q.size());
  double denom = 0.0;
  for (std::size_t j = lb.q.size(); j-- > 0;) denom += lb.q[j] / lb.support[j];
  for (std::size_t j = 0; j < lb.q.size(); ++j) {
    curve.mass[j] = (lb.q[j] / lb.support[j]) / denom;
  }
  curve.complete_tail = true;
  return curve;
}

double lb_mean_duration(const LBMasses& lb) {
  double denom = 0.0;
  for (std::size_t j = lb.q.size(); j-- > 0;) denom += lb.q[j] / lb.support[j];
  return 1.0 / denom;
}

std::optional<std::size_t> AgeDistribution::category_index(const std::string& name) const {
  for (std::size_t z = 0; z < categories.size(); ++z) {
    if (categories[z] == name) return z;
  }
  return std::nullopt;
}

double AgeDistribution::prob_at(std::size_t z, double t) const {
  for (const auto& seg : segments) {
    if (t >= seg.start && t < seg.end) return seg.probs[z];
  }
  // the right endpoint of the last segment belongs to it (recruitment
  // instant itself)
  if (!segments.empty() && t == segments.back().end) return segments.back().probs[z];
  throw Error(ErrorKind::CoverageGap,
              "age distribution has no segment covering t=" + std::to_string(t));
}

std::vector<std::string> AgeDistribution::validate() const {
  std::vector<std::string> violations;
  if (categories.empty()) violations.push_back("age: no categories");
  if (segments.empty()) violations.push_back("age: no segments");
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& seg = segments[k];
    const std::string where = "age segment " + std::to_string(k) + ": ";
    if (seg.probs.size() != categories.size()) {
      violations.push_back(where + "probability vector length != category count");
      continue;
    }
    if (!(seg.start >= 0.0) || !(seg.end > seg.start)) {
      violations.push_back(where + "interval must satisfy 0 <= start < end");
    }
    double total = 0.0;
    for (double p : seg.probs) {
      if (p < 0.0 || p > 1.0) violations.push_back(where + "probability outside [0,1]");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      violations.push_back(where + "probabilities must sum to 1 (got " + std::to_string(total) + ")");
    }
    if (k > 0 && segments[k - 1].end > seg.start + 1e-12) {
      violations.push_back(where + "overlaps previous segment");
    }
  }
  return violations;
}

bool AgeDistribution::covers(double tau_star) const {
  if (segments.empty()) return false;
  double reached = 0.0;
  for (const auto& seg : segments) {
    if (seg.start > reached + 1e-12) return false;
    if (seg.end > reached) reached = seg.end;
  }
  return reached >= tau_star - 1e-12;
}

}  // namespace previnc
