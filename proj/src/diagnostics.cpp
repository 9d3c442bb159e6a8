#include "previnc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "previnc/errors.hpp"
#include "previnc/parallel.hpp"
#include "previnc/rng.hpp"

namespace previnc {

namespace {

// mean and the sign-flip t statistic; sum_sq is invariant under flips
double flip_statistic(double mean, double sum_sq, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double var = (sum_sq - nn * mean * mean) / (nn - 1.0);
  if (var <= 0.0) {
    return mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::abs(mean) / std::sqrt(var / nn);
}

}  // namespace

DiagnosticResult exchangeability_test(const std::vector<PrevalentRecord>& records,
                                      std::size_t n_permutations, std::uint64_t seed,
                                      unsigned threads) {
  if (n_permutations < 1) {
    throw Error(ErrorKind::ConfigInvalid, "diagnostic needs at least one permutation");
  }

  std::vector<std::pair<double, double>> pairs;
  for (const auto& r : records) {
    if (r.event) pairs.emplace_back(r.bwd, r.fwd_obs);
  }
  if (pairs.size() < 10) {
    throw Error(ErrorKind::TooFewEvents, "diagnostic needs at least 10 uncensored records (got " +
                                             std::to_string(pairs.size()) + ")");
  }
  // canonical order makes the p-value independent of record labelling
  std::sort(pairs.begin(), pairs.end());

  const std::size_t n = pairs.size();
  std::vector<double> diffs(n);
  double mean = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diffs[i] = pairs[i].first - pairs[i].second;
    mean += diffs[i];
    sum_sq += diffs[i] * diffs[i];
  }
  mean /= static_cast<double>(n);

  const double observed = flip_statistic(mean, sum_sq, n);

  std::vector<std::uint8_t> exceeds(n_permutations, 0);
  parallel_for(n_permutations, threads, [&](std::size_t p) {
    Rng rng(seed, StreamTag::permutation, p);
    double flipped_sum = 0.0;
    for (double d : diffs) {
      flipped_sum += (rng.next_u64() >> 63) ? d : -d;
    }
    const double stat = flip_statistic(flipped_sum / static_cast<double>(n), sum_sq, n);
    exceeds[p] = stat >= observed ? 1 : 0;
  });

  std::size_t count = 0;
  for (std::uint8_t e : exceeds) count += e;

  DiagnosticResult result;
  result.statistic = observed;
  result.p_value = static_cast<double>(1 + count) / static_cast<double>(1 + n_permutations);
  result.n_pairs = n;
  result.n_permutations = n_permutations;
  result.seed = seed;
  return result;
}

}  // namespace previnc
