#ifndef PREVINC_BOOTSTRAP_HPP
#define PREVINC_BOOTSTRAP_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "previnc/cohort.hpp"
#include "previnc/incidence.hpp"
#include "previnc/npmle.hpp"
#include "previnc/rng.hpp"

namespace previnc {

/// Percentile-bootstrap interval for one rate. `estimates` is in
/// replicate order; the interval endpoints are the order statistics at
/// ranks ceil(B*alpha/2) and ceil(B*(1-alpha/2)).
struct BootstrapResult {
  std::vector<double> estimates;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double level = 0.0;
  std::size_t B = 0;
  std::uint64_t seed = 0;
  std::size_t degenerate_count = 0;
};

struct BootstrapConfig {
  std::size_t B = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  NpmleOptions npmle;
  std::optional<double> prevalence_override;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// One resample of the screened cohort: the diseased count is redrawn
/// as Binomial(s, n/s) -- equivalent to resampling all s screened
/// subjects with replacement -- and that many records are drawn with
/// replacement. s is unchanged.
ScreeningFrame resample_frame(const ScreeningFrame& frame, Rng& rng);

/// B resample-and-refit replicates of the overall rate. Replicates are
/// a pure function of (frame, B, level, seed): each replicate runs on
/// its own derived RNG stream and results are assembled in replicate
/// order, so serial and parallel execution agree bit for bit.
///
/// Degenerate replicates (resample with no cases, no events, or an
/// undefined survivor tail) are retained -- dropping them would bias the
/// percentiles -- with the rate 0 for case-free or event-free resamples
/// and the tail fallback otherwise. Throws TooFewValidReplicates when
/// more than 20% of replicates are degenerate.
BootstrapResult bootstrap_lambda(const ScreeningFrame& frame, const BootstrapConfig& config);

/// Per-category variant: one BootstrapResult per category of `age`, in
/// category order, sharing replicate streams so the category intervals
/// come from the same resamples.
std::vector<BootstrapResult> bootstrap_lambda_age(const ScreeningFrame& frame,
                                                  const AgeDistribution& age,
                                                  std::optional<double> tau_star,
                                                  const BootstrapConfig& config);

}  // namespace previnc

#endif  // PREVINC_BOOTSTRAP_HPP
