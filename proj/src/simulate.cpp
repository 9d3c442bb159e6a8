#include "previnc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "previnc/errors.hpp"

namespace previnc {

namespace {

// Regularized incomplete gamma functions (series for x < a+1, Lentz
// continued fraction otherwise), used only for gamma-lifetime survival.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_survival(double shape, double x) {
  if (x <= 0.0) return 1.0;
  if (x < shape + 1.0) return 1.0 - gamma_p_series(shape, x);
  return gamma_q_contfrac(shape, x);
}

// Inverse CDF of the tilted onset density 1 + ramp*(2t/tau - 1) on
// [0, tau].
double ramp_position(double tau_star, double ramp, Rng& rng) {
  const double u = rng.uniform01();
  if (ramp <= 0.0) return tau_star * u;
  const double a = ramp;
  const double b = 1.0 - ramp;
  const double x = (-b + std::sqrt(b * b + 4.0 * a * u)) / (2.0 * a);
  return tau_star * x;
}

void apply_censoring(PrevalentRecord& rec, double fwd, const std::optional<DistSpec>& censor,
                     Rng& rng) {
  if (censor) {
    const double c = censor->draw(rng);
    rec.event = fwd <= c;
    rec.fwd_obs = rec.event ? fwd : c;
  } else {
    rec.event = true;
    rec.fwd_obs = fwd;
  }
}

}  // namespace

DistSpec DistSpec::exponential(double mean) {
  DistSpec spec;
  spec.kind = Kind::exponential;
  spec.mean_param = mean;
  return spec;
}

DistSpec DistSpec::weibull(double shape, double scale) {
  DistSpec spec;
  spec.kind = Kind::weibull;
  spec.shape = shape;
  spec.scale = scale;
  return spec;
}

DistSpec DistSpec::gamma(double shape, double scale) {
  DistSpec spec;
  spec.kind = Kind::gamma;
  spec.shape = shape;
  spec.scale = scale;
  return spec;
}

DistSpec DistSpec::discrete(std::vector<double> points, std::vector<double> probs) {
  DistSpec spec;
  spec.kind = Kind::discrete;
  spec.points = std::move(points);
  spec.probs = std::move(probs);
  return spec;
}

void DistSpec::validate() const {
  switch (kind) {
    case Kind::exponential:
      if (!(mean_param > 0.0)) throw Error(ErrorKind::ConfigInvalid, "exponential mean must be > 0");
      return;
    case Kind::weibull:
    case Kind::gamma:
      if (!(shape > 0.0) || !(scale > 0.0)) {
        throw Error(ErrorKind::ConfigInvalid, "shape and scale must be > 0");
      }
      return;
    case Kind::discrete: {
      if (points.empty() || points.size() != probs.size()) {
        throw Error(ErrorKind::ConfigInvalid, "discrete spec needs matching points and probs");
      }
      double total = 0.0;
      for (std::size_t j = 0; j < points.size(); ++j) {
        if (!(points[j] > 0.0)) throw Error(ErrorKind::ConfigInvalid, "discrete points must be > 0");
        if (j > 0 && points[j] <= points[j - 1]) {
          throw Error(ErrorKind::ConfigInvalid, "discrete points must be strictly increasing");
        }
        if (probs[j] < 0.0) throw Error(ErrorKind::ConfigInvalid, "discrete probs must be >= 0");
        total += probs[j];
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorKind::ConfigInvalid, "discrete probs must sum to 1");
      }
      return;
    }
  }
}

double DistSpec::mean() const {
  switch (kind) {
    case Kind::exponential: return mean_param;
    case Kind::weibull: return scale * std::tgamma(1.0 + 1.0 / shape);
    case Kind::gamma: return shape * scale;
    case Kind::discrete: {
      double m = 0.0;
      for (std::size_t j = 0; j < points.size(); ++j) m += probs[j] * points[j];
      return m;
    }
  }
  return 0.0;
}

double DistSpec::second_moment() const {
  switch (kind) {
    case Kind::exponential: return 2.0 * mean_param * mean_param;
    case Kind::weibull: return scale * scale * std::tgamma(1.0 + 2.0 / shape);
    case Kind::gamma: return shape * (shape + 1.0) * scale * scale;
    case Kind::discrete: {
      double m2 = 0.0;
      for (std::size_t j = 0; j < points.size(); ++j) m2 += probs[j] * points[j] * points[j];
      return m2;
    }
  }
  return 0.0;
}

double DistSpec::survival(double x) const {
  if (x < 0.0) return 1.0;
  switch (kind) {
    case Kind::exponential: return std::exp(-x / mean_param);
    case Kind::weibull: return std::exp(-std::pow(x / scale, shape));
    case Kind::gamma: return gamma_survival(shape, x / scale);
    case Kind::discrete: {
      double s = 0.0;
      for (std::size_t j = points.size(); j-- > 0;) {
        if (points[j] > x) s += probs[j];
        else break;
      }
      return s;
    }
  }
  return 0.0;
}

double DistSpec::draw(Rng& rng) const {
  switch (kind) {
    case Kind::exponential: return rng.exponential(mean_param);
    case Kind::weibull: return rng.weibull(shape, scale);
    case Kind::gamma: return rng.gamma(shape, scale);
    case Kind::discrete: return points[rng.categorical(probs)];
  }
  return 0.0;
}

double length_biased_draw(const DistSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case DistSpec::Kind::exponential:
      return rng.exponential(spec.mean_param) + rng.exponential(spec.mean_param);
    case DistSpec::Kind::weibull:
      // with y = (x/scale)^shape the size-biased density is Gamma(1 + 1/shape)
      return spec.scale * std::pow(rng.gamma(1.0 + 1.0 / spec.shape, 1.0), 1.0 / spec.shape);
    case DistSpec::Kind::gamma:
      return rng.gamma(spec.shape + 1.0, spec.scale);
    case DistSpec::Kind::discrete: {
      std::vector<double> weights(spec.probs.size());
      for (std::size_t j = 0; j < weights.size(); ++j) weights[j] = spec.probs[j] * spec.points[j];
      return spec.points[rng.categorical(weights)];
    }
  }
  return 0.0;
}

void SimConfig::validate(bool for_window) const {
  if (s < 1) throw Error(ErrorKind::ConfigInvalid, "s must be >= 1");
  if (censor) censor->validate();
  if (ramp < 0.0 || ramp > 1.0) throw Error(ErrorKind::ConfigInvalid, "ramp must lie in [0,1]");
  if (!for_window && ramp != 0.0) {
    throw Error(ErrorKind::ConfigInvalid, "ramp intensity applies to the window generator only");
  }

  std::vector<const DistSpec*> lifetimes;
  if (age) {
    const auto age_violations = age->age.validate();
    if (!age_violations.empty()) throw Error(ErrorKind::ConfigInvalid, age_violations.front());
    const std::size_t l = age->age.categories.size();
    if (age->rates.size() != l || age->survival.size() != l) {
      throw Error(ErrorKind::ConfigInvalid, "age config needs one rate and one lifetime per category");
    }
    if (ramp != 0.0) {
      throw Error(ErrorKind::ConfigInvalid, "ramp and age-specific simulation cannot be combined");
    }
    for (double r : age->rates) {
      if (r < 0.0) throw Error(ErrorKind::ConfigInvalid, "category rates must be >= 0");
    }
    for (const auto& spec : age->survival) {
      spec.validate();
      lifetimes.push_back(&spec);
    }
  } else {
    if (lambda_true < 0.0) throw Error(ErrorKind::ConfigInvalid, "lambda must be >= 0");
    survival.validate();
    lifetimes.push_back(&survival);
  }

  const double p = prevalence_true();
  if (!(p >= 0.0 && p < 1.0)) {
    throw Error(ErrorKind::PrevalenceOutOfRange,
                "implied prevalence " + std::to_string(p) + " must lie in [0,1)");
  }

  if (for_window) {
    if (!(tau_star > 0.0)) throw Error(ErrorKind::ConfigInvalid, "window generator needs tau_star > 0");
    for (const DistSpec* spec : lifetimes) {
      if (spec->survival(tau_star) > 1e-4) {
        throw Error(ErrorKind::ConfigInvalid,
                    "tau_star must exceed the 99.99% point of the lifetime distribution, or the "
                    "window generator cannot reach equilibrium");
      }
    }
  }
}

double SimConfig::prevalence_true() const {
  if (age) {
    // constant age distribution: P = sum_z lambda_z mu_z pi_z
    const auto& pi = age->age.segments.front().probs;
    double p = 0.0;
    for (std::size_t z = 0; z < age->rates.size(); ++z) {
      p += age->rates[z] * age->survival[z].mean() * pi[z];
    }
    return p;
  }
  return lambda_true * survival.mean();
}

double SimConfig::mu_true() const {
  if (age) {
    // onset-weighted mean duration across categories
    const auto& pi = age->age.segments.front().probs;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t z = 0; z < age->rates.size(); ++z) {
      num += age->rates[z] * pi[z] * age->survival[z].mean();
      den += age->rates[z] * pi[z];
    }
    return den > 0.0 ? num / den : 0.0;
  }
  return survival.mean();
}

ScreeningFrame sim_window(const SimConfig& config) {
  config.validate(true);
  ScreeningFrame frame;
  frame.s = config.s;

  struct Source {
    double rate = 0.0;          // population onset intensity within the segment
    double start = 0.0;
    double end = 0.0;
    const DistSpec* lifetime = nullptr;
    const std::string* category = nullptr;
    bool ramped = false;
  };
  std::vector<Source> sources;
  if (config.age) {
    // piecewise-constant onset intensity s * lambda_z * P(A_t = z)
    for (std::size_t z = 0; z < config.age->age.categories.size(); ++z) {
      for (const auto& seg : config.age->age.segments) {
        Source src;
        src.rate = config.age->rates[z] * seg.probs[z];
        src.start = seg.start;
        src.end = std::min(seg.end, config.tau_star);
        src.lifetime = &config.age->survival[z];
        src.category = &config.age->age.categories[z];
        if (src.end > src.start && src.rate > 0.0) sources.push_back(src);
      }
    }
  } else {
    Source src;
    src.rate = config.lambda_true;
    src.start = 0.0;
    src.end = config.tau_star;
    src.lifetime = &config.survival;
    src.ramped = config.ramp > 0.0;
    sources.push_back(src);
  }

  std::uint64_t onset_index = 0;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    const Source& src = sources[k];
    Rng count_rng(config.seed, StreamTag::counts, k);
    const double window = src.end - src.start;
    const std::uint64_t m =
        count_rng.poisson(static_cast<double>(config.s) * src.rate * window);
    for (std::uint64_t i = 0; i < m; ++i, ++onset_index) {
      Rng rng(config.seed, StreamTag::onset, onset_index);
      const double tau = src.ramped ? ramp_position(config.tau_star, config.ramp, rng)
                                    : rng.uniform(src.start, src.end);
      const double lifetime = src.lifetime->draw(rng);
      const double bwd = config.tau_star - tau;
      if (lifetime < bwd) continue;  // failed before recruitment
      PrevalentRecord rec;
      rec.bwd = bwd;
      if (src.category) rec.age_cat = *src.category;
      apply_censoring(rec, lifetime - bwd, config.censor, rng);
      frame.records.push_back(std::move(rec));
    }
  }
  return frame;
}

ScreeningFrame sim_equilibrium(const SimConfig& config) {
  config.validate(false);
  if (config.age && !config.age->age.single_segment()) {
    throw Error(ErrorKind::ConfigInvalid,
                "the equilibrium generator requires a constant (single-segment) age distribution");
  }

  ScreeningFrame frame;
  frame.s = config.s;

  std::vector<double> p_z;  // P(diseased & category z)
  if (config.age) {
    const auto& pi = config.age->age.segments.front().probs;
    p_z.resize(config.age->rates.size());
    for (std::size_t z = 0; z < p_z.size(); ++z) {
      p_z[z] = config.age->rates[z] * config.age->survival[z].mean() * pi[z];
    }
  }
  const double p_total = config.prevalence_true();

  for (std::size_t i = 0; i < config.s; ++i) {
    Rng rng(config.seed, StreamTag::subject, i);
    const double u = rng.uniform01();
    if (u >= p_total) continue;

    const DistSpec* lifetime = &config.survival;
    PrevalentRecord rec;
    if (config.age) {
      double acc = 0.0;
      std::size_t z = p_z.size() - 1;
      for (std::size_t c = 0; c < p_z.size(); ++c) {
        acc += p_z[c];
        if (u < acc) {
          z = c;
          break;
        }
      }
      lifetime = &config.age->survival[z];
      rec.age_cat = config.age->age.categories[z];
    }

    const double total = length_biased_draw(*lifetime, rng);
    rec.bwd = rng.uniform01() * total;
    apply_censoring(rec, total - rec.bwd, config.censor, rng);
    frame.records.push_back(std::move(rec));
  }
  return frame;
}

std::vector<PrevalentRecord> sim_cases(std::size_t k, const DistSpec& survival,
                                       const std::optional<DistSpec>& censor, Rng& rng) {
  survival.validate();
  std::vector<PrevalentRecord> records;
  records.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    PrevalentRecord rec;
    const double total = length_biased_draw(survival, rng);
    rec.bwd = rng.uniform01() * total;
    apply_censoring(rec, total - rec.bwd, censor, rng);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace previnc
