#include "previnc/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "previnc/errors.hpp"

namespace previnc {

double prevalence_hat(std::size_t n, std::size_t s, std::optional<double> override_p) {
  if (s < 1) throw Error(ErrorKind::InvalidCounts, "s must be >= 1");
  if (n > s) {
    throw Error(ErrorKind::InvalidCounts,
                "n <= s violated (n=" + std::to_string(n) + ", s=" + std::to_string(s) + ")");
  }
  if (override_p) {
    if (!(*override_p > 0.0 && *override_p < 1.0)) {
      throw Error(ErrorKind::InvalidCounts, "prevalence override must lie in (0,1)");
    }
    return *override_p;
  }
  return static_cast<double>(n) / static_cast<double>(s);
}

double lambda_hat(double p_hat, double mu_hat) {
  if (!(mu_hat > 0.0)) throw Error(ErrorKind::ZeroDuration, "mean duration must be positive");
  return p_hat / mu_hat;
}

double lemma1_residual(double p_hat, double mu_hat, double p, double mu) {
  const double direct = p_hat / mu_hat - p / mu;
  const double decomposed = (mu * (p_hat - p) - p * (mu_hat - mu)) / (mu_hat * mu);
  return direct - decomposed;
}

std::vector<double> lambda_age_const(const std::vector<std::size_t>& counts, std::size_t s,
                                     const std::vector<double>& mu_z, const AgeDistribution& age) {
  if (!age.single_segment()) {
    throw Error(ErrorKind::ConfigInvalid, "constant-age formula needs a single-segment age distribution");
  }
  const auto& pi = age.segments.front().probs;
  if (counts.size() != pi.size() || mu_z.size() != pi.size()) {
    throw Error(ErrorKind::ConfigInvalid, "counts, durations and age shares must align");
  }
  std::size_t total = 0;
  for (std::size_t n_z : counts) total += n_z;
  if (total > s) throw Error(ErrorKind::InvalidCounts, "sum of category counts exceeds s");

  std::vector<double> rates(counts.size(), 0.0);
  for (std::size_t z = 0; z < counts.size(); ++z) {
    if (counts[z] == 0) continue;
    if (pi[z] <= 0.0) {
      throw Error(ErrorKind::ZeroAgeProbability,
                  "category " + age.categories[z] + " has cases but zero population share");
    }
    if (!(mu_z[z] > 0.0)) {
      throw Error(ErrorKind::ZeroDuration, "category " + age.categories[z] + " has nonpositive duration");
    }
    const double p_joint = static_cast<double>(counts[z]) / static_cast<double>(s);
    rates[z] = p_joint / (mu_z[z] * pi[z]);
  }
  return rates;
}

double denom_integral(const SurvivalCurve& curve_z, const AgeDistribution& age, double tau_star,
                      std::size_t z) {
  if (!curve_z.complete_tail) {
    throw Error(ErrorKind::UndefinedTail, "denominator integral needs a fully attributed survivor curve");
  }
  if (!(tau_star > 0.0)) throw Error(ErrorKind::ConfigInvalid, "tau_star must be positive");
  if (!age.covers(tau_star)) {
    throw Error(ErrorKind::CoverageGap, "age segments do not cover [0, tau_star]");
  }

  // common refinement: segment bounds plus the curve's jump locations
  // mapped through t = tau* - x
  std::set<double> cuts{0.0, tau_star};
  for (const auto& seg : age.segments) {
    if (seg.start > 0.0 && seg.start < tau_star) cuts.insert(seg.start);
    if (seg.end > 0.0 && seg.end < tau_star) cuts.insert(seg.end);
  }
  for (double t_j : curve_z.support) {
    const double t = tau_star - t_j;
    if (t > 0.0 && t < tau_star) cuts.insert(t);
  }

  double integral = 0.0;
  double lo = 0.0;
  for (auto it = std::next(cuts.begin()); it != cuts.end(); ++it) {
    const double hi = *it;
    const double mid = 0.5 * (lo + hi);
    integral += (hi - lo) * survival_at(curve_z, tau_star - mid) * age.prob_at(z, mid);
    lo = hi;
  }
  return integral;
}

double lambda_age_tv(double p_joint_z, double denom) {
  if (!(denom > 0.0)) throw Error(ErrorKind::ZeroDenominator, "age-specific denominator is zero");
  return p_joint_z / denom;
}

IncidenceEstimate estimate_overall(const ScreeningFrame& frame, const NpmleOptions& options,
                                   std::optional<double> prevalence_override, NpmleFit* fit_out) {
  const auto violations = validate_frame(frame);
  if (!violations.empty()) throw Error(ErrorKind::FrameInvalid, violations.front());

  const NpmleFit fit = npmle_lb_em(frame.records, options);
  if (fit_out) *fit_out = fit;
  IncidenceEstimate est;
  est.prevalence = prevalence_hat(frame.n(), frame.s, prevalence_override);
  est.mu = fit.mu_hat;
  est.lambda = lambda_hat(est.prevalence, est.mu);
  if (fit.tail_atom_added) est.flags.push_back("biased-tail");
  if (!fit.converged) est.flags.push_back("non-convergence");
  return est;
}

IncidenceEstimate estimate_age(const ScreeningFrame& frame, const AgeDistribution& age,
                               std::optional<double> tau_star, const NpmleOptions& options,
                               const std::optional<std::vector<double>>& p_joint_override,
                               NpmleFit* pooled_fit_out) {
  const auto frame_violations = validate_frame(frame);
  if (!frame_violations.empty()) throw Error(ErrorKind::FrameInvalid, frame_violations.front());
  const auto age_violations = age.validate();
  if (!age_violations.empty()) throw Error(ErrorKind::ConfigInvalid, age_violations.front());
  if (!age.single_segment() && !tau_star) {
    throw Error(ErrorKind::ConfigInvalid,
                "a multi-segment age distribution requires tau_star for the denominator integral");
  }
  if (p_joint_override && p_joint_override->size() != age.categories.size()) {
    throw Error(ErrorKind::ConfigInvalid, "p_joint override must have one entry per category");
  }

  std::vector<std::vector<PrevalentRecord>> by_cat(age.categories.size());
  for (std::size_t i = 0; i < frame.records.size(); ++i) {
    const auto& r = frame.records[i];
    if (!r.age_cat) {
      throw Error(ErrorKind::MissingAgeCategory,
                  "record " + std::to_string(i) + " has no onset-age category");
    }
    const auto z = age.category_index(*r.age_cat);
    if (!z) {
      throw Error(ErrorKind::MissingAgeCategory,
                  "record " + std::to_string(i) + " category '" + *r.age_cat +
                      "' is absent from the age distribution");
    }
    by_cat[*z].push_back(r);
  }

  IncidenceEstimate est;
  for (std::size_t z = 0; z < age.categories.size(); ++z) {
    CategoryEstimate cat;
    cat.category = age.categories[z];
    cat.count = by_cat[z].size();
    if (cat.count == 0) {
      cat.lambda = 0.0;
      cat.flags.push_back("no-cases");
      est.per_category.push_back(std::move(cat));
      continue;
    }
    const NpmleFit fit_z = npmle_lb_em(by_cat[z], options);
    cat.mu = fit_z.mu_hat;
    if (fit_z.tail_atom_added) cat.flags.push_back("biased-tail");
    if (!fit_z.converged) cat.flags.push_back("non-convergence");
    const double p_joint = p_joint_override
                               ? (*p_joint_override)[z]
                               : static_cast<double>(cat.count) / static_cast<double>(frame.s);
    if (age.single_segment()) {
      const double pi_z = age.segments.front().probs[z];
      if (pi_z <= 0.0) {
        throw Error(ErrorKind::ZeroAgeProbability,
                    "category " + cat.category + " has cases but zero population share");
      }
      cat.lambda = p_joint / (fit_z.mu_hat * pi_z);
    } else {
      cat.lambda = lambda_age_tv(p_joint, denom_integral(fit_z.curve, age, *tau_star, z));
    }
    est.per_category.push_back(std::move(cat));
  }

  // pooled summary alongside the per-category rates
  const NpmleFit pooled = npmle_lb_em(frame.records, options);
  if (pooled_fit_out) *pooled_fit_out = pooled;
  est.prevalence = prevalence_hat(frame.n(), frame.s);
  est.mu = pooled.mu_hat;
  est.lambda = lambda_hat(est.prevalence, est.mu);
  if (pooled.tail_atom_added) est.flags.push_back("biased-tail");
  for (const auto& cat : est.per_category) {
    if (!cat.flags.empty() &&
        std::find(est.flags.begin(), est.flags.end(), "category-warnings") == est.flags.end()) {
      est.flags.push_back("category-warnings");
    }
  }
  return est;
}

}  // namespace previnc
