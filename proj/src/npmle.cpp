#include "previnc/npmle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "previnc/errors.hpp"

namespace previnc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Prepared {
  std::vector<double> support;     // distinct event totals (+ optional atom), ascending
  std::vector<double> d;           // event multiplicities per support point
  std::vector<std::size_t> censor_lb;  // first support index >= each censored total
  std::size_t n_events = 0;
  std::size_t n_censored = 0;
  bool tail_atom_added = false;
};

Prepared prepare(const std::vector<PrevalentRecord>& records, TailPolicy policy) {
  Prepared prep;
  std::vector<double> event_totals;
  std::vector<double> censored_totals;
  for (const auto& r : records) {
    (r.event ? event_totals : censored_totals).push_back(total_time(r));
  }
  if (event_totals.empty()) {
    throw Error(ErrorKind::NoEvents, "all records are censored; the fit has no support");
  }
  std::sort(event_totals.begin(), event_totals.end());

  for (double u : event_totals) {
    if (!prep.support.empty() && prep.support.back() == u) {
      prep.d.back() += 1.0;
    } else {
      prep.support.push_back(u);
      prep.d.push_back(1.0);
    }
  }
  prep.n_events = event_totals.size();
  prep.n_censored = censored_totals.size();

  const double max_event = prep.support.back();
  double max_censored = kNegInf;
  for (double v : censored_totals) max_censored = std::max(max_censored, v);
  if (!censored_totals.empty() && max_censored > max_event) {
    if (policy == TailPolicy::strict) {
      throw Error(ErrorKind::UndefinedTail,
                  "largest observed total " + std::to_string(max_censored) +
                      " is censored; survivor mass beyond it is undefined under the "
                      "strict tail policy");
    }
    prep.support.push_back(max_censored);
    prep.d.push_back(0.0);
    prep.tail_atom_added = true;
  }

  prep.censor_lb.reserve(censored_totals.size());
  for (double v : censored_totals) {
    const auto it = std::lower_bound(prep.support.begin(), prep.support.end(), v);
    prep.censor_lb.push_back(static_cast<std::size_t>(it - prep.support.begin()));
  }
  return prep;
}

}  // namespace

const char* tail_policy_name(TailPolicy policy) {
  return policy == TailPolicy::strict ? "strict" : "tail-at-max-censored";
}

TailPolicy tail_policy_from_name(const std::string& name) {
  if (name == "strict") return TailPolicy::strict;
  if (name == "tail-at-max-censored") return TailPolicy::tail_at_max_censored;
  throw Error(ErrorKind::ConfigInvalid, "unknown tail policy '" + name + "'");
}

NpmleFit npmle_lb_em(const std::vector<PrevalentRecord>& records, const NpmleOptions& options) {
  if (!(options.tol > 0.0) || options.max_iter < 1) {
    throw Error(ErrorKind::ConfigInvalid, "npmle: tol must be > 0 and max_iter >= 1");
  }
  Prepared prep = prepare(records, options.tail_policy);
  const std::size_t J = prep.support.size();
  const double n = static_cast<double>(records.size());

  // censored records grouped by their lower support index; every index
  // is < J because strict throws and the fallback appends the atom
  std::vector<double> censored_at(J, 0.0);
  for (std::size_t a : prep.censor_lb) censored_at[a] += 1.0;

  // Initial masses: empirical distribution of event totals. When the
  // fallback atom exists it must start with positive mass or censored
  // records pointing only at it would have an empty posterior; seed it
  // with the count of censored totals past the last event.
  std::vector<double> q(J, 0.0);
  if (prep.tail_atom_added) {
    double beyond = 0.0;
    for (std::size_t a : prep.censor_lb) {
      if (a + 1 == J) beyond += 1.0;
    }
    const double total = static_cast<double>(prep.n_events) + beyond;
    for (std::size_t j = 0; j + 1 < J; ++j) q[j] = prep.d[j] / total;
    q[J - 1] = beyond / total;
  } else {
    for (std::size_t j = 0; j < J; ++j) q[j] = prep.d[j] / static_cast<double>(prep.n_events);
  }

  std::vector<double> ratio(J), suffix(J), q_next(J);
  NpmleFit fit;
  fit.loglik_trace.reserve(64);

  auto pass = [&](bool update) -> double {
    // ratio r_j = q_j / t_j; suffix sums from the largest support point
    // downward for reproducible round-off
    for (std::size_t j = 0; j < J; ++j) ratio[j] = q[j] / prep.support[j];
    double acc = 0.0;
    for (std::size_t j = J; j-- > 0;) {
      acc += ratio[j];
      suffix[j] = acc;
    }
    double ll = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      if (prep.d[j] > 0.0) ll += prep.d[j] * std::log(ratio[j]);
    }
    for (std::size_t j = 0; j < J; ++j) {
      if (censored_at[j] > 0.0) ll += censored_at[j] * std::log(suffix[j]);
    }
    if (update) {
      // prefix of m_a / A_a gives each support point the total posterior
      // weight it receives from censored records below it
      double redistribute = 0.0;
      for (std::size_t j = 0; j < J; ++j) {
        if (censored_at[j] > 0.0) redistribute += censored_at[j] / suffix[j];
        q_next[j] = (prep.d[j] + ratio[j] * redistribute) / n;
      }
    }
    return ll;
  };

  std::size_t iter = 0;
  bool converged = false;
  while (iter < options.max_iter) {
    pass(true);
    ++iter;
    double delta = 0.0;
    for (std::size_t j = 0; j < J; ++j) delta = std::max(delta, std::abs(q_next[j] - q[j]));
    q.swap(q_next);
    fit.loglik_trace.push_back(pass(false));
    if (delta < options.tol) {
      converged = true;
      break;
    }
  }

  fit.lb.support = prep.support;
  fit.lb.q = q;
  fit.curve = lb_to_curve(fit.lb);
  fit.mu_hat = lb_mean_duration(fit.lb);
  fit.loglik = fit.loglik_trace.back();
  fit.iterations = iter;
  fit.converged = converged;
  fit.tail_atom_added = prep.tail_atom_added;
  fit.tail_deficit = prep.tail_atom_added ? q.back() : 0.0;
  return fit;
}

double loglik_lb(const LBMasses& q, const std::vector<PrevalentRecord>& records) {
  const std::size_t J = q.support.size();
  std::vector<double> suffix(J + 1, 0.0);
  for (std::size_t j = J; j-- > 0;) suffix[j] = suffix[j + 1] + q.q[j] / q.support[j];

  double ll = 0.0;
  for (const auto& r : records) {
    const double total = total_time(r);
    if (r.event) {
      const auto it = std::lower_bound(q.support.begin(), q.support.end(), total);
      if (it == q.support.end() || *it != total) {
        throw Error(ErrorKind::SupportMismatch,
                    "event total " + std::to_string(total) + " is not a support point");
      }
      const std::size_t j = static_cast<std::size_t>(it - q.support.begin());
      if (q.q[j] <= 0.0) return kNegInf;
      ll += std::log(q.q[j] / q.support[j]);
    } else {
      const auto it = std::lower_bound(q.support.begin(), q.support.end(), total);
      const double tail = suffix[static_cast<std::size_t>(it - q.support.begin())];
      if (tail <= 0.0) return kNegInf;
      ll += std::log(tail);
    }
  }
  return ll;
}

double survival_at(const SurvivalCurve& curve, double x) {
  double s = curve.tail_deficit();
  for (std::size_t j = curve.support.size(); j-- > 0;) {
    if (curve.support[j] > x) {
      s += curve.mass[j];
    } else {
      break;
    }
  }
  return s;
}

double mean_duration(const SurvivalCurve& curve) {
  if (!curve.complete_tail) {
    throw Error(ErrorKind::UndefinedTail,
                "mean duration is undefined: survivor mass beyond the largest "
                "censored time is unattributed");
  }
  double mu = 0.0;
  for (std::size_t j = 0; j < curve.support.size(); ++j) mu += curve.mass[j] * curve.support[j];
  return mu;
}

WangFit wang_product_limit(const std::vector<PrevalentRecord>& records) {
  std::vector<double> event_times;
  for (const auto& r : records) {
    if (r.event) event_times.push_back(total_time(r));
  }
  if (event_times.empty()) {
    throw Error(ErrorKind::NoEvents, "all records are censored; no product-limit factors");
  }
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());

  WangFit fit;
  double s_prev = 1.0;
  for (std::size_t k = 0; k < event_times.size(); ++k) {
    const double u = event_times[k];
    double deaths = 0.0;
    double at_risk = 0.0;
    for (const auto& r : records) {
      const double total = total_time(r);
      if (r.event && total == u) deaths += 1.0;
      if (r.bwd <= u && u <= total) at_risk += 1.0;
    }
    if (deaths == at_risk && k + 1 < event_times.size()) {
      fit.empty_risk_set = true;  // factor would zero the curve early; skip it
      continue;
    }
    const double s_next = s_prev * (1.0 - deaths / at_risk);
    if (s_prev - s_next > 0.0) {
      fit.curve.support.push_back(u);
      fit.curve.mass.push_back(s_prev - s_next);
    }
    s_prev = s_next;
  }
  fit.curve.complete_tail = (s_prev <= 0.0);
  return fit;
}

}  // namespace previnc
