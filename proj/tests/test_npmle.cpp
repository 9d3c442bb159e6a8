#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "previnc/errors.hpp"
#include "previnc/npmle.hpp"
#include "previnc/rng.hpp"
#include "previnc/simulate.hpp"
#include "support/oracles.hpp"

using namespace previnc;
namespace oracle = previnc::testing;

namespace {

PrevalentRecord event_rec(double bwd, double fwd) { return {bwd, fwd, true, {}}; }
PrevalentRecord cens_rec(double bwd, double fwd) { return {bwd, fwd, false, {}}; }

std::vector<PrevalentRecord> random_small_instance(Rng& rng, std::size_t* out_support = nullptr) {
  // two or three distinct event totals plus censored totals inside the
  // support range, the shape the grid oracle can confirm
  const std::size_t J = 2 + rng.uniform_index(2);
  std::vector<double> support;
  while (support.size() < J) {
    const double t = 0.5 + 0.25 * static_cast<double>(rng.uniform_index(30));
    if (std::find(support.begin(), support.end(), t) == support.end()) support.push_back(t);
  }
  std::sort(support.begin(), support.end());

  std::vector<PrevalentRecord> records;
  for (double t : support) {
    const std::size_t copies = 1 + rng.uniform_index(3);
    for (std::size_t c = 0; c < copies; ++c) records.push_back(event_rec(t / 2, t / 2));
  }
  const std::size_t n_censored = 1 + rng.uniform_index(3);
  for (std::size_t c = 0; c < n_censored; ++c) {
    const double v = rng.uniform(support.front() * 0.5, support.back() * 0.999);
    records.push_back(cens_rec(v / 2, v / 2));
  }
  if (out_support) *out_support = J;
  return records;
}

}  // namespace

TEST_CASE("single uncensored record gives a point mass") {
  const auto fit = npmle_lb_em({event_rec(1.0, 1.0)});
  REQUIRE(fit.lb.support == std::vector<double>{2.0});
  CHECK(fit.lb.q[0] == 1.0);
  CHECK(fit.curve.mass[0] == 1.0);
  CHECK(fit.mu_hat == 2.0);
  CHECK(fit.converged);
}

TEST_CASE("two uncensored totals follow the closed form p_j ~ 1/t_j") {
  const auto fit = npmle_lb_em({event_rec(0.5, 0.5), event_rec(1.5, 1.5)});
  REQUIRE(fit.curve.support == std::vector<double>{1.0, 3.0});
  CHECK(fit.curve.mass[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(fit.curve.mass[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(fit.mu_hat == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("EM matches the grid-search maximizer on the spec instance") {
  const std::vector<PrevalentRecord> records = {event_rec(0.5, 0.5), event_rec(1.5, 1.5),
                                                cens_rec(1.0, 1.0)};
  const auto fit = npmle_lb_em(records);
  const auto grid = oracle::grid_search_max(fit.lb.support, records);
  REQUIRE(grid.q.size() == fit.lb.q.size());
  for (std::size_t j = 0; j < grid.q.size(); ++j) {
    CHECK(std::abs(fit.lb.q[j] - grid.q[j]) < 1e-3);
  }
  CHECK(std::abs(fit.loglik - grid.loglik) < 1e-6);
}

TEST_CASE("simulated exponential cohort recovers the true mean duration") {
  DistSpec survival = DistSpec::exponential(1.0);
  DistSpec censor = DistSpec::exponential(7.0 / 3.0);  // ~30% censored
  NpmleOptions options;
  options.tail_policy = TailPolicy::tail_at_max_censored;  // censored maxima happen
  std::vector<double> mu_hats;
  for (std::uint64_t rep = 0; rep < 40; ++rep) {
    Rng rng(500 + rep);
    const auto records = sim_cases(200, survival, censor, rng);
    mu_hats.push_back(npmle_lb_em(records, options).mu_hat);
  }
  const double se = oracle::sd_of(mu_hats);
  CHECK(std::abs(mu_hats[0] - 1.0) < 3.0 * se);
  CHECK(std::abs(oracle::mean_of(mu_hats) - 1.0) < 3.0 * se / std::sqrt(40.0));
}

TEST_CASE("loglik_lb single-term examples") {
  LBMasses q;
  q.support = {2.0};
  q.q = {1.0};
  CHECK(loglik_lb(q, {event_rec(1.0, 1.0)}) == doctest::Approx(std::log(0.5)).epsilon(1e-15));

  LBMasses q2;
  q2.support = {1.0, 3.0};
  q2.q = {0.5, 0.5};
  CHECK(loglik_lb(q2, {cens_rec(1.0, 1.0)}) ==
        doctest::Approx(std::log(0.5 / 3.0)).epsilon(1e-15));
}

TEST_CASE("loglik_lb error and sentinel paths") {
  LBMasses q;
  q.support = {1.0, 3.0};
  q.q = {0.5, 0.5};
  CHECK_THROWS_AS(loglik_lb(q, {event_rec(1.0, 1.0)}), Error);  // total 2 not in support
  CHECK(loglik_lb(q, {cens_rec(2.0, 2.0)}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("fixed point is a local maximum along simplex directions") {
  Rng rng(77);
  const auto records = random_small_instance(rng);
  const auto fit = npmle_lb_em(records);
  const double at_fit = loglik_lb(fit.lb, records);
  const double h = 1e-4;
  for (std::size_t j = 0; j < fit.lb.q.size(); ++j) {
    for (std::size_t k = 0; k < fit.lb.q.size(); ++k) {
      if (j == k) continue;
      LBMasses moved = fit.lb;
      if (moved.q[k] < h) continue;
      moved.q[j] += h;
      moved.q[k] -= h;
      CHECK(loglik_lb(moved, records) <= at_fit + 1e-9);
    }
  }
}

TEST_CASE("survival_at right-continuity and partial sums") {
  SurvivalCurve point;
  point.support = {2.0};
  point.mass = {1.0};
  CHECK(survival_at(point, 1.9) == 1.0);
  CHECK(survival_at(point, 2.0) == 0.0);

  SurvivalCurve two;
  two.support = {1.0, 3.0};
  two.mass = {0.75, 0.25};
  CHECK(survival_at(two, 2.0) == 0.25);
}

TEST_CASE("mean_duration on discrete curves") {
  SurvivalCurve point;
  point.support = {4.75};
  point.mass = {1.0};
  CHECK(mean_duration(point) == 4.75);

  SurvivalCurve two;
  two.support = {1.0, 3.0};
  two.mass = {0.75, 0.25};
  CHECK(mean_duration(two) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("mean_duration refuses an incomplete tail") {
  SurvivalCurve curve;
  curve.support = {1.0};
  curve.mass = {0.6};
  curve.complete_tail = false;
  CHECK_THROWS_AS(mean_duration(curve), Error);
  CHECK(curve.tail_deficit() == doctest::Approx(0.4));
  CHECK(survival_at(curve, 5.0) == doctest::Approx(0.4));  // deficit survives past support
}

TEST_CASE("fitted curves satisfy the mean identity") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto records = random_small_instance(rng);
    const auto fit = npmle_lb_em(records);
    CHECK(mean_duration(fit.curve) == doctest::Approx(fit.mu_hat).epsilon(1e-12));
    double q_total = 0.0;
    for (double qj : fit.lb.q) q_total += qj;
    CHECK(q_total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("EM loglik trace is monotone and self-consistent at the fixed point") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto records = random_small_instance(rng);
    const auto fit = npmle_lb_em(records);
    REQUIRE(fit.converged);
    for (std::size_t k = 1; k < fit.loglik_trace.size(); ++k) {
      CHECK(fit.loglik_trace[k] >= fit.loglik_trace[k - 1] - 1e-9 * std::abs(fit.loglik_trace[k - 1]));
    }

    // self-consistency: q = (d + redistributed censored weight)/n
    const auto& t = fit.lb.support;
    const auto& q = fit.lb.q;
    std::vector<double> d(t.size(), 0.0);
    std::vector<double> c(t.size(), 0.0);
    for (const auto& r : records) {
      const double total = total_time(r);
      if (r.event) {
        for (std::size_t j = 0; j < t.size(); ++j) {
          if (t[j] == total) d[j] += 1.0;
        }
      } else {
        double tail = 0.0;
        for (std::size_t j = 0; j < t.size(); ++j) {
          if (t[j] >= total) tail += q[j] / t[j];
        }
        for (std::size_t j = 0; j < t.size(); ++j) {
          if (t[j] >= total) c[j] += (q[j] / t[j]) / tail;
        }
      }
    }
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double expected = (d[j] + c[j]) / static_cast<double>(records.size());
      CHECK(q[j] == doctest::Approx(expected).epsilon(1e-6));
    }
  }
}

TEST_CASE("no censoring reduces to the empirical distribution and harmonic mean") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PrevalentRecord> records;
    const std::size_t n = 3 + rng.uniform_index(40);
    double inv_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform(0.2, 8.0);
      records.push_back(event_rec(u / 3, 2 * u / 3));
      inv_sum += 1.0 / u;
    }
    const auto fit = npmle_lb_em(records);
    CHECK(fit.iterations == 1);
    CHECK(fit.mu_hat == doctest::Approx(static_cast<double>(n) / inv_sum).epsilon(1e-12));
  }
}

TEST_CASE("scale equivariance: durations scaled by c scale mu_hat, masses unchanged") {
  Rng rng(51);
  const auto records = random_small_instance(rng);
  const auto fit = npmle_lb_em(records);
  for (double c : {0.1, 3.0}) {
    std::vector<PrevalentRecord> scaled = records;
    for (auto& r : scaled) {
      r.bwd *= c;
      r.fwd_obs *= c;
    }
    const auto fit_c = npmle_lb_em(scaled);
    CHECK(fit_c.mu_hat == doctest::Approx(c * fit.mu_hat).epsilon(1e-12));
    REQUIRE(fit_c.lb.q.size() == fit.lb.q.size());
    for (std::size_t j = 0; j < fit.lb.q.size(); ++j) {
      CHECK(fit_c.lb.q[j] == doctest::Approx(fit.lb.q[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("tie aggregation: duplicate totals collapse to one support point") {
  const auto fit = npmle_lb_em({event_rec(1.0, 1.0), event_rec(0.5, 1.5), event_rec(1.0, 3.0)});
  REQUIRE(fit.lb.support == std::vector<double>{2.0, 4.0});
  CHECK(fit.lb.q[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("strict policy refuses a censored maximum") {
  const std::vector<PrevalentRecord> records = {event_rec(1.0, 1.0), cens_rec(2.0, 1.0)};
  CHECK_THROWS_AS(npmle_lb_em(records), Error);
  try {
    npmle_lb_em(records);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UndefinedTail);
    CHECK(e.code() == 4);
    CHECK(std::string(e.what()).find("3.0") != std::string::npos);  // the censored total
  }
}

TEST_CASE("fallback policy appends a flagged atom at the largest censored total") {
  NpmleOptions options;
  options.tail_policy = TailPolicy::tail_at_max_censored;
  const auto fit =
      npmle_lb_em({event_rec(1.0, 1.0), cens_rec(2.0, 1.0), cens_rec(1.0, 0.5)}, options);
  CHECK(fit.tail_atom_added);
  REQUIRE(fit.lb.support == std::vector<double>{2.0, 3.0});
  CHECK(fit.tail_deficit == doctest::Approx(fit.lb.q[1]));
  CHECK(fit.tail_deficit > 0.0);
  double total = 0.0;
  for (double qj : fit.lb.q) total += qj;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.curve.complete_tail);

  // the atom maximizes the same objective on the extended support
  const auto grid = oracle::grid_search_max(fit.lb.support,
                                            {event_rec(1.0, 1.0), cens_rec(2.0, 1.0),
                                             cens_rec(1.0, 0.5)});
  for (std::size_t j = 0; j < grid.q.size(); ++j) {
    CHECK(std::abs(fit.lb.q[j] - grid.q[j]) < 1e-3);
  }
}

TEST_CASE("all-censored input raises NoEvents") {
  CHECK_THROWS_AS(npmle_lb_em({cens_rec(1.0, 1.0)}), Error);
  try {
    npmle_lb_em({cens_rec(1.0, 1.0)});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoEvents);
    CHECK(e.code() == 5);
  }
}

TEST_CASE("wang product-limit hand example") {
  const auto fit = wang_product_limit({{1.0, 1.0, true, {}}, {0.5, 2.5, true, {}}});
  CHECK(!fit.empty_risk_set);
  REQUIRE(fit.curve.support == std::vector<double>{2.0, 3.0});
  CHECK(fit.curve.mass[0] == doctest::Approx(0.5));
  CHECK(fit.curve.mass[1] == doctest::Approx(0.5));
  CHECK(fit.curve.complete_tail);
  CHECK(survival_at(fit.curve, 1.0) == 1.0);
  CHECK(survival_at(fit.curve, 2.0) == 0.5);
  CHECK(survival_at(fit.curve, 3.0) == 0.0);
}

TEST_CASE("wang product-limit single event is a point mass") {
  const auto fit = wang_product_limit({{0.0, 5.0, true, {}}});
  REQUIRE(fit.curve.support == std::vector<double>{5.0});
  CHECK(fit.curve.mass[0] == 1.0);
}

TEST_CASE("wang product-limit flags an early empty risk set") {
  // both subjects at risk at time 1 die there; the later event would be
  // unreachable if the zero factor were kept
  const auto fit = wang_product_limit(
      {{0.0, 1.0, true, {}}, {0.5, 0.5, true, {}}, {1.5, 0.5, true, {}}});
  CHECK(fit.empty_risk_set);
  REQUIRE(fit.curve.support == std::vector<double>{2.0});
  CHECK(fit.curve.mass[0] == 1.0);
}

TEST_CASE("wang product-limit leaves a deficit when the maximum is censored") {
  const auto fit = wang_product_limit({{0.0, 1.0, true, {}}, {0.0, 2.0, false, {}}});
  CHECK(!fit.curve.complete_tail);
  CHECK(fit.curve.tail_deficit() == doctest::Approx(0.5));
}

TEST_CASE("wang and npmle agree on stationary simulated data") {
  SimConfig config;
  config.s = 40000;
  config.lambda_true = 0.01;
  config.survival = DistSpec::exponential(5.0);
  config.censor = DistSpec::exponential(35.0 / 3.0);
  config.seed = 99;
  const ScreeningFrame frame = sim_equilibrium(config);
  REQUIRE(frame.n() > 1500);

  NpmleOptions options;
  options.tail_policy = TailPolicy::tail_at_max_censored;
  const auto wang = wang_product_limit(frame.records);
  const auto npmle = npmle_lb_em(frame.records, options);
  CHECK(oracle::survival_sup_distance(wang.curve, npmle.curve) < 0.05);
}
