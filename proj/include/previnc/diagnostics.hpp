#ifndef PREVINC_DIAGNOSTICS_HPP
#define PREVINC_DIAGNOSTICS_HPP

#include <cstdint>
#include <vector>

#include "previnc/cohort.hpp"

namespace previnc {

struct DiagnosticResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_pairs = 0;
  std::size_t n_permutations = 0;
  std::uint64_t seed = 0;
};

/// Permutation check of the stationarity assumption. Under a stationary
/// onset process the backward and forward times of an uncensored case
/// are exchangeable, so d_i = bwd_i - fwd_i is symmetric about zero.
/// The statistic is the paired one-sample t form
///   |mean(d)| / (sd(d) / sqrt(n))
/// and its null distribution is generated by flipping the sign of each
/// pair independently with probability 1/2. The p-value is
/// (1 + #{permuted >= observed}) / (1 + n_permutations).
///
/// Censored records are excluded (their forward time is not fully
/// observed); that loses power but keeps the null exact. Pairs are
/// sorted internally, so the result is invariant under record order.
/// Throws TooFewEvents with fewer than 10 uncensored records.
DiagnosticResult exchangeability_test(const std::vector<PrevalentRecord>& records,
                                      std::size_t n_permutations, std::uint64_t seed,
                                      unsigned threads = 1);

}  // namespace previnc

#endif  // PREVINC_DIAGNOSTICS_HPP
