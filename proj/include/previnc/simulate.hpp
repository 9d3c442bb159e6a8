#ifndef PREVINC_SIMULATE_HPP
#define PREVINC_SIMULATE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "previnc/cohort.hpp"
#include "previnc/rng.hpp"

namespace previnc {

/// Lifetime / censoring distribution specification.
struct DistSpec {
  enum class Kind { exponential, weibull, gamma, discrete };

  Kind kind = Kind::exponential;
  double mean_param = 1.0;    // exponential
  double shape = 1.0;         // weibull / gamma
  double scale = 1.0;         // weibull / gamma
  std::vector<double> points; // discrete
  std::vector<double> probs;  // discrete

  static DistSpec exponential(double mean);
  static DistSpec weibull(double shape, double scale);
  static DistSpec gamma(double shape, double scale);
  static DistSpec discrete(std::vector<double> points, std::vector<double> probs);

  double mean() const;
  double second_moment() const;
  /// P(X > x)
  double survival(double x) const;
  double draw(Rng& rng) const;

  /// Throws ConfigInvalid for nonsensical parameters.
  void validate() const;
};

/// Sample from the size-biased density x f(x) / mean. Exponential gives
/// Gamma(2, mean); Weibull and gamma reduce to gamma draws through the
/// size-biased shape shift; discrete reweights masses by their support
/// points.
double length_biased_draw(const DistSpec& spec, Rng& rng);

/// Per-category generating process under a (constant) population age
/// distribution: category z has incidence rate rates[z] among persons of
/// that age and its own lifetime distribution.
struct AgeSimConfig {
  AgeDistribution age;
  std::vector<double> rates;
  std::vector<DistSpec> survival;
};

/// Configuration for the two prevalent-cohort generators. Streams are
/// derived per subject / per onset from `seed`, so output is identical
/// for any execution order.
struct SimConfig {
  std::size_t s = 0;              // subjects screened
  double lambda_true = 0.0;       // onsets per person-year (ignored with `age`)
  DistSpec survival;              // lifetime from onset (ignored with `age`)
  std::optional<DistSpec> censor; // residual censoring from recruitment
  double tau_star = 0.0;          // recruitment calendar time (window length)
  std::uint64_t seed = 0;
  double ramp = 0.0;              // 0 = stationary; 1 = intensity rising
                                  // linearly from 0 at the window start
                                  // (window generator only; mean preserved)
  std::optional<AgeSimConfig> age;

  /// `for_window` additionally checks that tau_star is beyond the
  /// 99.99% point of every lifetime distribution, so the window
  /// generator reaches its equilibrium.
  void validate(bool for_window) const;

  /// Population prevalence implied by the configuration (sum of
  /// lambda_z * mu_z * pi_z in the age case).
  double prevalence_true() const;
  double mu_true() const;
};

/// Mechanistic construction: Poisson onsets over the calendar window
/// (0, tau*], lifetimes from onset, retention iff alive at tau*,
/// residual censoring applied after recruitment.
ScreeningFrame sim_window(const SimConfig& config);

/// Equilibrium construction: each subject is prevalent with probability
/// lambda * mean, a prevalent total is length-biased, and onset is
/// uniform over the total. The two constructions agree in distribution
/// under a stationary process.
ScreeningFrame sim_equilibrium(const SimConfig& config);

/// Draws exactly k prevalent cases (equilibrium construction,
/// conditional on being prevalent). Test harness helper.
std::vector<PrevalentRecord> sim_cases(std::size_t k, const DistSpec& survival,
                                       const std::optional<DistSpec>& censor, Rng& rng);

}  // namespace previnc

#endif  // PREVINC_SIMULATE_HPP
