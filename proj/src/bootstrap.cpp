#include "previnc/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "previnc/errors.hpp"
#include "previnc/parallel.hpp"

namespace previnc {

namespace {

void check_config(const BootstrapConfig& config) {
  if (config.B < 100) throw Error(ErrorKind::ConfigInvalid, "bootstrap needs B >= 100");
  if (!(config.level > 0.0 && config.level < 1.0)) {
    throw Error(ErrorKind::ConfigInvalid, "confidence level must lie in (0,1)");
  }
}

void percentile_ci(BootstrapResult& result) {
  std::vector<double> sorted = result.estimates;
  std::sort(sorted.begin(), sorted.end());
  const double alpha = 1.0 - result.level;
  const auto rank = [&](double p) {
    const auto k = static_cast<std::size_t>(
        std::ceil(p * static_cast<double>(result.B)));
    return std::clamp<std::size_t>(k, 1, result.B) - 1;
  };
  result.ci_lower = sorted[rank(alpha / 2.0)];
  result.ci_upper = sorted[rank(1.0 - alpha / 2.0)];
}

void check_degenerate_share(std::size_t degenerate, std::size_t B) {
  if (static_cast<double>(degenerate) > 0.2 * static_cast<double>(B)) {
    throw Error(ErrorKind::TooFewValidReplicates,
                std::to_string(degenerate) + " of " + std::to_string(B) +
                    " bootstrap replicates were degenerate");
  }
}

/// Fits with the configured policy, falling back to the tail atom when
/// the strict policy refuses. Returns nullopt when the resample has no
/// events at all.
std::optional<NpmleFit> fit_replicate(const std::vector<PrevalentRecord>& records,
                                      const NpmleOptions& options, bool& degenerate) {
  try {
    NpmleFit fit = npmle_lb_em(records, options);
    if (fit.tail_atom_added) degenerate = true;
    return fit;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::UndefinedTail) {
      NpmleOptions fallback = options;
      fallback.tail_policy = TailPolicy::tail_at_max_censored;
      degenerate = true;
      return npmle_lb_em(records, fallback);
    }
    if (e.kind() == ErrorKind::NoEvents) {
      degenerate = true;
      return std::nullopt;
    }
    throw;
  }
}

}  // namespace

ScreeningFrame resample_frame(const ScreeningFrame& frame, Rng& rng) {
  ScreeningFrame out;
  out.s = frame.s;
  if (frame.records.empty()) return out;
  const double p = static_cast<double>(frame.n()) / static_cast<double>(frame.s);
  const std::uint64_t n_star = rng.binomial(frame.s, p);
  out.records.reserve(n_star);
  for (std::uint64_t i = 0; i < n_star; ++i) {
    out.records.push_back(frame.records[rng.uniform_index(frame.records.size())]);
  }
  return out;
}

BootstrapResult bootstrap_lambda(const ScreeningFrame& frame, const BootstrapConfig& config) {
  check_config(config);
  BootstrapResult result;
  result.level = config.level;
  result.B = config.B;
  result.seed = config.seed;
  result.estimates.assign(config.B, 0.0);
  std::vector<std::uint8_t> degenerate(config.B, 0);

  parallel_for(config.B, config.threads, [&](std::size_t r) {
    Rng rng(config.seed, StreamTag::replicate, r);
    const ScreeningFrame resample = resample_frame(frame, rng);
    if (resample.records.empty()) {
      degenerate[r] = 1;
      result.estimates[r] = 0.0;
      return;
    }
    bool flagged = false;
    const auto fit = fit_replicate(resample.records, config.npmle, flagged);
    if (!fit) {
      result.estimates[r] = 0.0;
    } else {
      const double p_hat = config.prevalence_override
                               ? *config.prevalence_override
                               : static_cast<double>(resample.n()) / static_cast<double>(resample.s);
      result.estimates[r] = p_hat / fit->mu_hat;
    }
    degenerate[r] = flagged ? 1 : 0;
  });

  for (std::uint8_t flag : degenerate) result.degenerate_count += flag;
  check_degenerate_share(result.degenerate_count, result.B);
  percentile_ci(result);
  return result;
}

std::vector<BootstrapResult> bootstrap_lambda_age(const ScreeningFrame& frame,
                                                  const AgeDistribution& age,
                                                  std::optional<double> tau_star,
                                                  const BootstrapConfig& config) {
  check_config(config);
  const std::size_t l = age.categories.size();
  std::vector<std::vector<double>> estimates(l, std::vector<double>(config.B, 0.0));
  std::vector<std::uint8_t> degenerate(config.B, 0);

  parallel_for(config.B, config.threads, [&](std::size_t r) {
    Rng rng(config.seed, StreamTag::replicate, r);
    const ScreeningFrame resample = resample_frame(frame, rng);
    bool flagged = resample.records.empty();

    std::vector<std::vector<PrevalentRecord>> by_cat(l);
    for (const auto& rec : resample.records) {
      if (!rec.age_cat) continue;
      const auto z = age.category_index(*rec.age_cat);
      if (z) by_cat[*z].push_back(rec);
    }
    for (std::size_t z = 0; z < l; ++z) {
      if (by_cat[z].empty()) {
        estimates[z][r] = 0.0;
        continue;
      }
      const auto fit = fit_replicate(by_cat[z], config.npmle, flagged);
      if (!fit) {
        estimates[z][r] = 0.0;
        continue;
      }
      const double p_joint =
          static_cast<double>(by_cat[z].size()) / static_cast<double>(resample.s);
      if (age.single_segment()) {
        const double pi_z = age.segments.front().probs[z];
        estimates[z][r] = pi_z > 0.0 ? p_joint / (fit->mu_hat * pi_z) : 0.0;
      } else {
        estimates[z][r] = lambda_age_tv(p_joint, denom_integral(fit->curve, age, *tau_star, z));
      }
    }
    degenerate[r] = flagged ? 1 : 0;
  });

  std::size_t degenerate_count = 0;
  for (std::uint8_t flag : degenerate) degenerate_count += flag;
  check_degenerate_share(degenerate_count, config.B);

  std::vector<BootstrapResult> results(l);
  for (std::size_t z = 0; z < l; ++z) {
    results[z].estimates = std::move(estimates[z]);
    results[z].level = config.level;
    results[z].B = config.B;
    results[z].seed = config.seed;
    results[z].degenerate_count = degenerate_count;
    percentile_ci(results[z]);
  }
  return results;
}

}  // namespace previnc
