#ifndef PREVINC_NPMLE_HPP
#define PREVINC_NPMLE_HPP

#include <cstddef>
#include <vector>

#include "previnc/cohort.hpp"

namespace previnc {

/// What to do when the largest observed total is a censored time, which
/// leaves the survivor tail undefined.
///   strict               -- refuse to fit (UndefinedTail).
///   tail_at_max_censored -- place the unattributable mass on an atom at
///                           the largest censored total and mark the fit
///                           biased. Known ad hoc fix; estimates carry a
///                           bias warning downstream.
enum class TailPolicy { strict, tail_at_max_censored };

const char* tail_policy_name(TailPolicy policy);
TailPolicy tail_policy_from_name(const std::string& name);

struct NpmleOptions {
  double tol = 1e-10;             // max mass change per iteration
  std::size_t max_iter = 100000;  // EM is cheap per iteration
  TailPolicy tail_policy = TailPolicy::strict;
};

/// Result of the nonparametric ML fit of the length-biased lifetime
/// distribution from followed prevalent cases.
struct NpmleFit {
  LBMasses lb;                       // length-biased masses q on the support
  SurvivalCurve curve;               // unbiased survivor estimate, p_j ~ q_j/t_j
  double mu_hat = 0.0;               // mean lifetime, 1 / sum(q_j/t_j)
  double loglik = 0.0;               // objective at the returned masses
  std::size_t iterations = 0;
  bool converged = false;
  bool tail_atom_added = false;      // fallback tail policy was applied
  double tail_deficit = 0.0;         // mass on the appended atom (0 otherwise)
  std::vector<double> loglik_trace;  // objective after each iteration
};

/// Maximizes, over probability vectors q supported on the distinct
/// uncensored totals, the duration factor of the two-stage likelihood:
///
///   sum_{events}   log(q_{j(i)} / t_{j(i)})
/// + sum_{censored} log( sum_{t_j >= v_i} q_j / t_j )
///
/// where t_j are the support points, j(i) locates an event's total and
/// v_i is a censored record's total. The maximizer is found by EM:
/// censored records spread posterior weight (q_j/t_j over the feasible
/// tail) across the support, and masses are refreshed from event counts
/// plus redistributed weight. The objective is concave, so the fixed
/// point is the global maximum.
///
/// Throws NoEvents when no record is an event, UndefinedTail under the
/// strict policy when the largest total is censored.
NpmleFit npmle_lb_em(const std::vector<PrevalentRecord>& records, const NpmleOptions& options = {});

/// The objective maximized by npmle_lb_em for an arbitrary mass vector.
/// Returns -inf when a censored total exceeds every support point with
/// mass. Throws SupportMismatch when an event total is missing from
/// q.support.
double loglik_lb(const LBMasses& q, const std::vector<PrevalentRecord>& records);

/// S(x): mass strictly above x, plus the unattributed tail for
/// incomplete curves (see SurvivalCurve).
double survival_at(const SurvivalCurve& curve, double x);

/// sum(mass_j * t_j) = integral of S. Throws UndefinedTail for
/// incomplete curves.
double mean_duration(const SurvivalCurve& curve);

struct WangFit {
  SurvivalCurve curve;
  bool empty_risk_set = false;  // a factor with d(u) = R(u) before the
                                // last event time was skipped
};

/// Product-limit estimator for left-truncated right-censored data, with
/// truncation time bwd_i and endpoint total_i:
///   S(t) = prod_{event times u <= t} (1 - d(u)/R(u)),
///   R(u) = #{j : bwd_j <= u <= total_j}.
/// The conditional comparator to the unconditional NPMLE; it does not
/// use stationarity.
WangFit wang_product_limit(const std::vector<PrevalentRecord>& records);

}  // namespace previnc

#endif  // PREVINC_NPMLE_HPP
