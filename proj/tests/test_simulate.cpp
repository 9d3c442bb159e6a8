#include <doctest.h>

#include <cmath>

#include "previnc/errors.hpp"
#include "previnc/rng.hpp"
#include "previnc/simulate.hpp"
#include "support/oracles.hpp"

using namespace previnc;
namespace oracle = previnc::testing;

namespace {

SimConfig base_config() {
  SimConfig config;
  config.s = 20000;
  config.lambda_true = 0.01;
  config.survival = DistSpec::exponential(5.0);
  config.tau_star = 60.0;
  config.seed = 1;
  return config;
}

std::vector<double> totals_of(const ScreeningFrame& frame) {
  std::vector<double> totals;
  for (const auto& r : frame.records) totals.push_back(total_time(r));
  return totals;
}

}  // namespace

TEST_CASE("distribution specs report exact moments and survival") {
  const auto exp1 = DistSpec::exponential(2.0);
  CHECK(exp1.mean() == 2.0);
  CHECK(exp1.second_moment() == 8.0);
  CHECK(exp1.survival(2.0) == doctest::Approx(std::exp(-1.0)));

  const auto wei = DistSpec::weibull(2.0, 3.0);
  CHECK(wei.mean() == doctest::Approx(3.0 * std::sqrt(3.14159265358979) / 2.0).epsilon(1e-9));
  CHECK(wei.survival(3.0) == doctest::Approx(std::exp(-1.0)));

  const auto gam = DistSpec::gamma(3.0, 2.0);
  CHECK(gam.mean() == 6.0);
  CHECK(gam.second_moment() == 48.0);
  CHECK(gam.survival(0.0) == 1.0);
  // regularized upper incomplete gamma at shape 3: S(x) = e^-x (1 + x + x^2/2)
  const double x = 4.0;
  CHECK(gam.survival(2.0 * x) == doctest::Approx(std::exp(-x) * (1 + x + x * x / 2)).epsilon(1e-10));

  const auto disc = DistSpec::discrete({1.0, 3.0}, {0.5, 0.5});
  CHECK(disc.mean() == 2.0);
  CHECK(disc.second_moment() == 5.0);
  CHECK(disc.survival(1.0) == 0.5);
  CHECK(disc.survival(3.0) == 0.0);
}

TEST_CASE("invalid distribution specs are rejected") {
  CHECK_THROWS_AS(DistSpec::exponential(-1.0).validate(), Error);
  CHECK_THROWS_AS(DistSpec::weibull(0.0, 1.0).validate(), Error);
  CHECK_THROWS_AS(DistSpec::discrete({1.0, 1.0}, {0.5, 0.5}).validate(), Error);
  CHECK_THROWS_AS(DistSpec::discrete({1.0, 2.0}, {0.5, 0.4}).validate(), Error);
}

TEST_CASE("length-biased draws: point mass stays put") {
  Rng rng(2);
  const auto spec = DistSpec::discrete({4.0}, {1.0});
  for (int i = 0; i < 10; ++i) CHECK(length_biased_draw(spec, rng) == 4.0);
}

TEST_CASE("length-biased exponential has mean 2x the base mean") {
  Rng rng(3);
  const auto spec = DistSpec::exponential(1.0);
  std::vector<double> draws;
  for (int i = 0; i < 10000; ++i) draws.push_back(length_biased_draw(spec, rng));
  // Gamma(2,1): mean 2, variance 2
  const double se = std::sqrt(2.0 / 10000.0);
  CHECK(std::abs(oracle::mean_of(draws) - 2.0) < 3.0 * se);
}

TEST_CASE("length-biased discrete reweights by the support point") {
  Rng rng(4);
  const auto spec = DistSpec::discrete({1.0, 3.0}, {0.5, 0.5});
  int at_three = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    if (length_biased_draw(spec, rng) == 3.0) ++at_three;
  }
  // size-biased: P(3) = 1.5/2 = 0.75
  const double se = std::sqrt(0.75 * 0.25 / n);
  CHECK(std::abs(static_cast<double>(at_three) / n - 0.75) < 3.0 * se);
}

TEST_CASE("length-biased weibull and gamma match the analytic mean E[X^2]/E[X]") {
  Rng rng(5);
  for (const auto& spec : {DistSpec::weibull(1.7, 2.0), DistSpec::gamma(2.5, 1.3)}) {
    std::vector<double> draws;
    for (int i = 0; i < 20000; ++i) draws.push_back(length_biased_draw(spec, rng));
    const double lb_mean = spec.second_moment() / spec.mean();
    const double se = oracle::sd_of(draws) / std::sqrt(20000.0);
    CHECK(std::abs(oracle::mean_of(draws) - lb_mean) < 3.0 * se);
  }
}

TEST_CASE("window generator with zero incidence yields an empty frame") {
  SimConfig config = base_config();
  config.lambda_true = 0.0;
  const auto frame = sim_window(config);
  CHECK(frame.n() == 0);
  CHECK(frame.s == config.s);
}

TEST_CASE("window generator point-mass retention count matches s*lambda*d") {
  SimConfig config;
  config.s = 20000;
  config.lambda_true = 0.004;
  config.survival = DistSpec::discrete({5.0}, {1.0});
  config.tau_star = 40.0;
  config.seed = 6;
  const auto frame = sim_window(config);
  const double expected = 20000 * 0.004 * 5.0;  // s * lambda * d = s * P
  CHECK(std::abs(static_cast<double>(frame.n()) - expected) < 4.0 * std::sqrt(expected));
}

TEST_CASE("window generator totals have the length-biased first moment") {
  SimConfig config;
  config.s = 100000;
  config.lambda_true = 0.002;
  config.survival = DistSpec::exponential(1.0);
  config.tau_star = 12.0;
  config.seed = 7;
  const auto frame = sim_window(config);
  const auto totals = totals_of(frame);
  REQUIRE(totals.size() > 100);
  const double se = oracle::sd_of(totals) / std::sqrt(static_cast<double>(totals.size()));
  CHECK(std::abs(oracle::mean_of(totals) - 2.0) < 3.0 * se);  // E[X^2]/E[X] = 2 for exp(1)
}

TEST_CASE("window retention probability at a given onset time equals S(tau* - t)") {
  // discrete lifetimes make the survival values exact per onset bucket
  SimConfig config;
  config.s = 60000;
  config.lambda_true = 0.004;
  config.survival = DistSpec::discrete({2.0, 6.0}, {0.5, 0.5});
  config.tau_star = 10.0;
  config.seed = 8;
  const auto frame = sim_window(config);

  // onsets with bwd in (2, 6): only the 6-year lifetime survives, S = 0.5
  // onsets with bwd < 2: both survive, S = 1 -> ratio of densities is 2
  std::size_t recent = 0;
  std::size_t mid = 0;
  for (const auto& r : frame.records) {
    if (r.bwd < 2.0) ++recent;
    else if (r.bwd < 6.0) ++mid;
  }
  // expected counts: m_rate * 2 years * 1.0 and m_rate * 4 years * 0.5
  const double rate = 60000 * 0.004;  // onsets per year
  CHECK(std::abs(static_cast<double>(recent) - rate * 2.0) < 4.0 * std::sqrt(rate * 2.0));
  CHECK(std::abs(static_cast<double>(mid) - rate * 2.0) < 4.0 * std::sqrt(rate * 2.0));
}

TEST_CASE("equilibrium generator: point-mass lifetimes give uniform onset ages") {
  SimConfig config;
  config.s = 30000;
  config.lambda_true = 0.02;
  config.survival = DistSpec::discrete({5.0}, {1.0});
  config.seed = 9;
  const auto frame = sim_equilibrium(config);
  REQUIRE(frame.n() > 2000);
  std::vector<double> scaled;
  for (const auto& r : frame.records) {
    CHECK(total_time(r) == 5.0);
    scaled.push_back(r.bwd / 5.0);
  }
  // bwd/Y ~ U(0,1)
  std::vector<double> uniform_ref;
  Rng ref(10);
  for (std::size_t i = 0; i < scaled.size(); ++i) uniform_ref.push_back(ref.uniform01());
  CHECK(oracle::ks_distance(scaled, uniform_ref) < 0.03);
}

TEST_CASE("equilibrium generator: backward and forward times are exchangeable") {
  SimConfig config;
  config.s = 200000;
  config.lambda_true = 0.01;
  config.survival = DistSpec::exponential(5.0);
  config.seed = 11;
  const auto frame = sim_equilibrium(config);
  REQUIRE(frame.n() > 8000);
  std::vector<double> bwd;
  std::vector<double> fwd;
  for (const auto& r : frame.records) {
    bwd.push_back(r.bwd);
    fwd.push_back(r.fwd_obs);
  }
  CHECK(oracle::ks_distance(bwd, fwd) < 0.03);
}

TEST_CASE("window and equilibrium generators agree in distribution") {
  SimConfig config = base_config();
  config.s = 100000;
  config.seed = 12;
  const auto window = sim_window(config);
  config.seed = 13;
  const auto equilibrium = sim_equilibrium(config);
  REQUIRE(window.n() > 4000);
  REQUIRE(equilibrium.n() > 4000);
  CHECK(oracle::ks_distance(totals_of(window), totals_of(equilibrium)) < 0.03);
}

TEST_CASE("generators are deterministic given the seed") {
  SimConfig config = base_config();
  config.s = 5000;
  const auto a = sim_window(config);
  const auto b = sim_window(config);
  REQUIRE(a.n() == b.n());
  for (std::size_t i = 0; i < a.n(); ++i) {
    CHECK(a.records[i].bwd == b.records[i].bwd);
    CHECK(a.records[i].fwd_obs == b.records[i].fwd_obs);
    CHECK(a.records[i].event == b.records[i].event);
  }
  const auto c = sim_equilibrium(config);
  const auto d = sim_equilibrium(config);
  REQUIRE(c.n() == d.n());
  for (std::size_t i = 0; i < c.n(); ++i) {
    CHECK(c.records[i].bwd == d.records[i].bwd);
  }
}

TEST_CASE("censoring marks events correctly and stays nonnegative") {
  SimConfig config = base_config();
  config.s = 30000;
  config.censor = DistSpec::exponential(5.0);
  config.seed = 14;
  const auto frame = sim_equilibrium(config);
  std::size_t events = 0;
  for (const auto& r : frame.records) {
    CHECK(r.bwd >= 0.0);
    CHECK(r.fwd_obs >= 0.0);
    events += r.event ? 1 : 0;
  }
  // fwd ~ exp(5) by memorylessness, C ~ exp(5) -> censoring share 1/2
  const double share = static_cast<double>(events) / static_cast<double>(frame.n());
  CHECK(std::abs(share - 0.5) < 4.0 / std::sqrt(static_cast<double>(frame.n())));
}

TEST_CASE("config validation rejects inconsistent setups") {
  SimConfig config = base_config();

  SUBCASE("prevalence out of range") {
    config.lambda_true = 0.5;  // 0.5 * 5 years = 2.5
    CHECK_THROWS_AS(config.validate(false), Error);
    try {
      config.validate(false);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PrevalenceOutOfRange);
    }
  }
  SUBCASE("window needs tau_star beyond the survival quantile") {
    config.tau_star = 10.0;  // exp(5): S(10) = e^-2 >> 1e-4
    CHECK_THROWS_AS(config.validate(true), Error);
    config.tau_star = 60.0;
    config.validate(true);
  }
  SUBCASE("ramp outside the window generator") {
    config.ramp = 0.5;
    CHECK_THROWS_AS(config.validate(false), Error);
    config.validate(true);
  }
  SUBCASE("bad distribution parameters") {
    config.survival = DistSpec::exponential(-2.0);
    CHECK_THROWS_AS(config.validate(false), Error);
  }
}

TEST_CASE("ramp intensity shifts onsets toward recruitment") {
  SimConfig config;
  config.s = 30000;
  config.lambda_true = 0.01;
  config.survival = DistSpec::discrete({5.0}, {1.0});
  config.tau_star = 5.5;
  config.seed = 15;

  const auto stationary = sim_window(config);
  config.ramp = 1.0;
  const auto ramped = sim_window(config);

  // under the ramp recent onsets dominate, so backward times shrink
  std::vector<double> bwd_stat;
  std::vector<double> bwd_ramp;
  for (const auto& r : stationary.records) bwd_stat.push_back(r.bwd);
  for (const auto& r : ramped.records) bwd_ramp.push_back(r.bwd);
  CHECK(oracle::mean_of(bwd_ramp) < oracle::mean_of(bwd_stat) - 0.3);
}

TEST_CASE("age-specific equilibrium generator hits per-category prevalence") {
  AgeSimConfig age;
  age.age.categories = {"a", "b"};
  age.age.segments.push_back({0.0, 60.0, {0.6, 0.4}});
  age.rates = {0.005, 0.02};
  age.survival = {DistSpec::exponential(4.0), DistSpec::exponential(2.0)};

  SimConfig config;
  config.s = 100000;
  config.tau_star = 60.0;
  config.seed = 16;
  config.age = age;

  const auto frame = sim_equilibrium(config);
  std::size_t count_a = 0;
  std::size_t count_b = 0;
  for (const auto& r : frame.records) {
    REQUIRE(r.age_cat.has_value());
    (*r.age_cat == "a" ? count_a : count_b) += 1;
  }
  const double expect_a = 100000 * 0.005 * 4.0 * 0.6;  // 1200
  const double expect_b = 100000 * 0.02 * 2.0 * 0.4;   // 1600
  CHECK(std::abs(static_cast<double>(count_a) - expect_a) < 4.0 * std::sqrt(expect_a));
  CHECK(std::abs(static_cast<double>(count_b) - expect_b) < 4.0 * std::sqrt(expect_b));
}

TEST_CASE("sim_cases draws exactly k cases") {
  Rng rng(17);
  const auto records = sim_cases(250, DistSpec::exponential(2.0), {}, rng);
  CHECK(records.size() == 250);
  for (const auto& r : records) CHECK(r.event);
}
