#ifndef PREVINC_INCIDENCE_HPP
#define PREVINC_INCIDENCE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "previnc/cohort.hpp"
#include "previnc/npmle.hpp"

namespace previnc {

struct CategoryEstimate {
  std::string category;
  std::size_t count = 0;              // cases with onset in this category
  std::optional<double> mu = {};      // mean duration within the category
  double lambda = 0.0;                // incidence rate, per person-year
  std::vector<std::string> flags;
};

/// Point estimates from one analysis. `lambda` is always exactly
/// prevalence / mu, in events per person-year; display scaling (per
/// 1,000 person-years) is a reporting concern.
struct IncidenceEstimate {
  double lambda = 0.0;
  double prevalence = 0.0;
  double mu = 0.0;
  std::vector<CategoryEstimate> per_category;
  std::vector<std::string> flags;
};

/// Point prevalence: n/s, or the supplied override (externally
/// standardized prevalence estimates are common when the screened
/// sample is not simple-random).
double prevalence_hat(std::size_t n, std::size_t s, std::optional<double> override_p = {});

/// lambda = P / mu, the rate form of prevalence = incidence x duration.
double lambda_hat(double p_hat, double mu_hat);

/// Residual of the exact identity
///   (p^/mu^ - p/mu) = [mu (p^ - p) - p (mu^ - mu)] / (mu^ mu),
/// which transfers the sampling behaviour of (p^, mu^) to the rate
/// estimate. Always ~0 at machine precision; exposed for verification.
double lemma1_residual(double p_hat, double mu_hat, double p, double mu);

/// Age-specific rates under a calendar-constant age distribution:
///   lambda_z = (n_z/s) / (mu_z * pi_z).
/// `age` must have a single segment. Throws ZeroAgeProbability when a
/// category with cases has zero population share.
std::vector<double> lambda_age_const(const std::vector<std::size_t>& counts, std::size_t s,
                                     const std::vector<double>& mu_z, const AgeDistribution& age);

/// Denominator of the time-varying age-specific rate:
///   integral_0^{tau*} S_z(tau* - t) P(A_t = z) dt.
/// Both factors are step functions, so the integral is the exact finite
/// sum over the common refinement of their breakpoints.
double denom_integral(const SurvivalCurve& curve_z, const AgeDistribution& age, double tau_star,
                      std::size_t z);

/// lambda_z = P(diseased & onset-age z) / denominator.
double lambda_age_tv(double p_joint_z, double denom);

/// Full overall pipeline: validate, fit the NPMLE, form P and lambda.
/// `fit_out`, when given, receives the underlying fit.
IncidenceEstimate estimate_overall(const ScreeningFrame& frame, const NpmleOptions& options = {},
                                   std::optional<double> prevalence_override = {},
                                   NpmleFit* fit_out = nullptr);

/// Full age-specific pipeline: one NPMLE fit per category (restricted to
/// the cases with onset at that age), then the constant-age or
/// time-varying rate formula. `tau_star` is required when `age` has more
/// than one segment. `p_joint_override`, when given, replaces n_z/s per
/// category (standardized analyses). Categories without cases yield
/// lambda_z = 0 with a warning flag.
IncidenceEstimate estimate_age(const ScreeningFrame& frame, const AgeDistribution& age,
                               std::optional<double> tau_star, const NpmleOptions& options = {},
                               const std::optional<std::vector<double>>& p_joint_override = {},
                               NpmleFit* pooled_fit_out = nullptr);

}  // namespace previnc

#endif  // PREVINC_INCIDENCE_HPP
