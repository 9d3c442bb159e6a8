#ifndef PREVINC_COHORT_HPP
#define PREVINC_COHORT_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace previnc {

/// One followed prevalent case. `bwd` is the time from disease onset to
/// recruitment (backward recurrence time); `fwd_obs` is the observed
/// residual time from recruitment to failure or censoring; `event` says
/// whether failure was observed. Durations are in years. All types in
/// this header are immutable value objects once built and are safe to
/// share across threads.
struct PrevalentRecord {
  double bwd = 0.0;
  double fwd_obs = 0.0;
  bool event = false;
  std::optional<std::string> age_cat;
};

/// Full onset-to-endpoint duration: the length-biased lifetime when the
/// record is an event, the total (informative) censoring time otherwise.
inline double total_time(const PrevalentRecord& r) { return r.bwd + r.fwd_obs; }

/// The two-stage sample: `s` subjects screened, of which the listed
/// records were found diseased and followed.
struct ScreeningFrame {
  std::size_t s = 0;
  std::vector<PrevalentRecord> records;

  std::size_t n() const { return records.size(); }
};

/// Checks every frame invariant and returns one message per violation
/// (empty means valid). Never throws; callers decide severity.
std::vector<std::string> validate_frame(const ScreeningFrame& frame);

/// Discrete survivor function: probability mass `mass[j]` at time
/// `support[j]`, support strictly increasing and positive.
/// S(x) = sum of mass at support points > x, right-continuous.
///
/// When `complete_tail` is false the masses sum to less than one and the
/// deficit is mass known to lie beyond the largest observed time but not
/// attributable to any point (the product-limit estimator with a censored
/// maximum produces such curves). Evaluation treats the deficit as mass
/// at +infinity, so S stays monotone and S(x) is a lower-bound-exact
/// value for x past the support.
struct SurvivalCurve {
  std::vector<double> support;
  std::vector<double> mass;
  bool complete_tail = true;

  double tail_deficit() const {
    double total = 0.0;
    for (double m : mass) total += m;
    return complete_tail ? 0.0 : 1.0 - total;
  }
};

/// Discrete length-biased distribution: probability q[j] that an
/// observed (length-biased) lifetime equals support[j].
struct LBMasses {
  std::vector<double> support;
  std::vector<double> q;
};

/// Unbiased survivor curve implied by length-biased masses:
/// p_j proportional to q_j / t_j.
SurvivalCurve lb_to_curve(const LBMasses& lb);

/// Mean lifetime implied by length-biased masses: 1 / sum(q_j / t_j).
double lb_mean_duration(const LBMasses& lb);

/// One piece of a piecewise-constant population age distribution:
/// on calendar times [start, end) -- with recruitment at tau* and 0 the
/// start of the window -- category z has probability probs[z].
struct AgeSegment {
  double start = 0.0;
  double end = 0.0;
  std::vector<double> probs;
};

/// Piecewise-constant category shares P(A_t = z) over the recruitment
/// window. A single segment encodes the constant case P(A = z).
struct AgeDistribution {
  std::vector<std::string> categories;
  std::vector<AgeSegment> segments;

  bool single_segment() const { return segments.size() == 1; }

  /// Index of a category name; nullopt when absent.
  std::optional<std::size_t> category_index(const std::string& name) const;

  /// P(A_t = z) at calendar time t. Throws CoverageGap when t is not
  /// covered by any segment.
  double prob_at(std::size_t z, double t) const;

  /// Validation messages (empty when the distribution is well formed:
  /// each probability vector sums to 1, segments are disjoint and
  /// ordered).
  std::vector<std::string> validate() const;

  /// True when the segments cover [0, tau_star] without gaps.
  bool covers(double tau_star) const;
};

}  // namespace previnc

#endif  // PREVINC_COHORT_HPP
