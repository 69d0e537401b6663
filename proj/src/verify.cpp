#include "gwi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "gwi/error.hpp"

namespace gwi {

namespace {

constexpr std::size_t kChunk = std::size_t{1} << 14;

template <class Cf>
EcfDistance ecf_distance_impl(std::span<const double> samples, Cf&& cf,
                              std::span<const double> thetas, Exec exec) {
  require(!thetas.empty(), "ecf_distance: theta grid must not be empty");
  require(!samples.empty(), "ecf_distance: sample must not be empty");
  for (double t : thetas) require(std::isfinite(t), "ecf_distance: theta values must be finite");
  const auto gaps = map_indexed(thetas.size(), exec, [&](std::size_t i) {
    return std::abs(empirical_cf(samples, thetas[i]) - cf(thetas[i]));
  });
  EcfDistance out;
  out.distance = -1.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] > out.distance) {
      out.distance = gaps[i];
      out.theta_at_max = thetas[i];
    }
  }
  return out;
}

// sup |F_N - F| over sorted values with their model CDF values
double ks_from_sorted(std::span<const double> cdf_values) {
  const double count = static_cast<double>(cdf_values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < cdf_values.size(); ++i) {
    const double f = cdf_values[i];
    d = std::max(d, static_cast<double>(i + 1) / count - f);
    d = std::max(d, f - static_cast<double>(i) / count);
  }
  return d;
}

double clipped(State v, double centre, double a_n, double x) {
  return std::min(std::abs(static_cast<double>(v) - centre) / a_n, x);
}

double anti_clustering_centre(const GwiModel& model, AntiClusteringVariant variant) {
  if (variant == AntiClusteringVariant::plain) return 0.0;
  require(model.alpha() > 1.0, "centred anti-clustering statistic needs alpha > 1");
  return stationary_mean(model);
}

void require_anti_clustering_spec(const AntiClusteringSpec& spec) {
  require(spec.n >= 1, "anti-clustering: n must be >= 1");
  require(spec.m_n >= 1, "anti-clustering: m_n must be >= 1");
  require(spec.x > 0.0, "anti-clustering: x must be positive");
  require(spec.reps >= 10'000, "anti-clustering needs at least 10^4 replications");
}

// sum_{j=d+1}^{m} f(X_j) f(X_0) along one path
double lag_sum(const PathSample& path, std::uint64_t d, double centre, double a_n, double x) {
  const double f0 = clipped(path.values[0], centre, a_n, x);
  double sum = 0.0;
  for (std::size_t j = d + 1; j < path.values.size(); ++j) {
    sum += clipped(path.values[j], centre, a_n, x);
  }
  return f0 * sum;
}

Estimate scaled(const Moments& m, double factor) {
  return {factor * m.mean, factor * m.std_error()};
}

std::vector<double> sum_sample(const GwiModel& model, std::uint64_t length, double a_n,
                               std::size_t reps, std::uint64_t seed, Stream purpose,
                               Exec exec) {
  return map_indexed(reps, exec, [&](std::size_t i) {
    const PathSample path = simulate_path(model, length, StreamId{seed, i, purpose});
    unsigned __int128 sum = 0;
    for (std::size_t k = 1; k < path.values.size(); ++k) sum += path.values[k];
    return static_cast<double>(static_cast<long double>(sum) / a_n);
  });
}

double type7_quantile(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

// Distances -------------------------------------------------------------------

std::vector<double> theta_grid(double lo, double hi, std::size_t points) {
  require(points >= 1, "theta_grid needs at least one point");
  require(lo <= hi, "theta_grid: lo must not exceed hi");
  if (points == 1) return {lo};
  std::vector<double> out(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::complex<double> empirical_cf(std::span<const double> samples, double theta) {
  require(!samples.empty(), "empirical_cf: sample must not be empty");
  double re = 0.0;
  double im = 0.0;
  for (double x : samples) {
    const double arg = theta * x;
    re += std::cos(arg);
    im += std::sin(arg);
  }
  const double count = static_cast<double>(samples.size());
  return {re / count, im / count};
}

EcfDistance ecf_distance(std::span<const double> samples, const StableParams& law,
                         std::span<const double> thetas, Exec exec) {
  law.validate();
  return ecf_distance_impl(samples, [&](double t) { return stable_cf(law, t); }, thetas, exec);
}

EcfDistance ecf_distance(std::span<const double> samples, const GeneralStableCF& law,
                         std::span<const double> thetas, Exec exec) {
  law.validate();
  return ecf_distance_impl(samples, [&](double t) { return stable_cf(law, t); }, thetas, exec);
}

double ks_distance(std::span<const double> samples, const StableParams& law, Exec exec) {
  require(!samples.empty(), "ks_distance: sample must not be empty");
  require(law.alpha != 1.0, "ks_distance: alpha = 1 is not supported");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto cdf = map_indexed(sorted.size(), exec,
                               [&](std::size_t i) { return stable_cdf(law, sorted[i]); });
  return ks_from_sorted(cdf);
}

double ks_uniform(std::span<const double> values) {
  require(!values.empty(), "ks_uniform: sample must not be empty");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  for (double& v : sorted) v = std::clamp(v, 0.0, 1.0);
  return ks_from_sorted(sorted);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: samples must not be empty");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_band(double level, std::size_t n_a, std::size_t n_b) {
  require(level > 0.0 && level < 1.0, "ks_band: level must lie in (0,1)");
  require(n_a >= 1, "ks_band: sample size must be positive");
  const double c = std::sqrt(-0.5 * std::log(level / 2.0));
  double n_eff = static_cast<double>(n_a);
  if (n_b > 0) {
    const double nb = static_cast<double>(n_b);
    n_eff = n_eff * nb / (n_eff + nb);
  }
  return c / std::sqrt(n_eff);
}

// Anti-clustering -------------------------------------------------------------

AntiClusteringEstimate anti_clustering_stat(const GwiModel& model, const AntiClusteringSpec& spec,
                                            std::uint64_t d, std::uint64_t seed, Exec exec) {
  require_anti_clustering_spec(spec);
  require(d < spec.m_n, "anti_clustering_stat: d must be below m_n");
  const double centre = anti_clustering_centre(model, spec.variant);
  const double a_n = norming_sequence(model, spec.n);
  const auto values = map_indexed(spec.reps, exec, [&](std::size_t i) {
    const PathSample path =
        simulate_path(model, spec.m_n, StreamId{seed, i, Stream::anti_clustering});
    return lag_sum(path, d, centre, a_n, spec.x);
  });
  return {scaled(moments_of(values), static_cast<double>(spec.n)), d, a_n};
}

AntiClusteringTrend anti_clustering_decrease(const GwiModel& model,
                                             const AntiClusteringSpec& spec,
                                             std::uint64_t d_small, std::uint64_t d_large,
                                             std::uint64_t seed, Exec exec) {
  require_anti_clustering_spec(spec);
  require(d_small < d_large, "anti_clustering_decrease: need d_small < d_large");
  require(d_large < spec.m_n, "anti_clustering_decrease: d must be below m_n");
  const double centre = anti_clustering_centre(model, spec.variant);
  const double a_n = norming_sequence(model, spec.n);
  const auto pairs = map_indexed(spec.reps, exec, [&](std::size_t i) {
    const PathSample path =
        simulate_path(model, spec.m_n, StreamId{seed, i, Stream::anti_clustering});
    return std::pair{lag_sum(path, d_small, centre, a_n, spec.x),
                     lag_sum(path, d_large, centre, a_n, spec.x)};
  });
  Moments small;
  Moments large;
  Moments diff;
  for (const auto& [s, l] : pairs) {
    small.add(s);
    large.add(l);
    diff.add(s - l);
  }
  const auto n = static_cast<double>(spec.n);
  AntiClusteringTrend out;
  out.small_lag = {scaled(small, n), d_small, a_n};
  out.large_lag = {scaled(large, n), d_large, a_n};
  out.difference = scaled(diff, n);
  return out;
}

std::vector<LagTerm> anti_clustering_lag_terms(const GwiModel& model,
                                               const AntiClusteringSpec& spec,
                                               std::uint64_t max_lag, std::uint64_t seed,
                                               Exec exec) {
  require_anti_clustering_spec(spec);
  require(max_lag >= 1, "anti_clustering_lag_terms: max_lag must be >= 1");
  const double centre = anti_clustering_centre(model, spec.variant);
  const double a_n = norming_sequence(model, spec.n);
  const auto paths = map_indexed(spec.reps, exec, [&](std::size_t i) {
    const PathSample path =
        simulate_path(model, max_lag, StreamId{seed, i, Stream::anti_clustering});
    std::vector<double> f(path.values.size());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = clipped(path.values[j], centre, a_n, spec.x);
    return f;
  });
  Moments f0;
  for (const auto& f : paths) f0.add(f[0]);
  std::vector<LagTerm> out;
  for (std::uint64_t j = 1; j <= max_lag; ++j) {
    Moments paired;
    Moments fj;
    for (const auto& f : paths) {
      paired.add(f[j] * f[0]);
      fj.add(f[j]);
    }
    LagTerm term;
    term.lag = j;
    term.paired = {paired.mean, paired.std_error()};
    term.product.value = fj.mean * f0.mean;
    term.product.std_error = std::hypot(fj.mean * f0.std_error(), f0.mean * fj.std_error());
    out.push_back(term);
  }
  return out;
}

// Mixing ------------------------------------------------------------------------

MixingResidual mixing_residual(const GwiModel& model, std::uint64_t n, double t, double theta,
                               std::size_t reps, std::uint64_t seed, Exec exec) {
  return mixing_residual(model, default_block_sequence(n, model.alpha()), t, theta, reps, seed,
                         exec);
}

MixingResidual mixing_residual(const GwiModel& model, const BlockSequence& blocks, double t,
                               double theta, std::size_t reps, std::uint64_t seed, Exec exec) {
  require(reps >= 10'000, "mixing_residual needs at least 10^4 replications per CF");
  require(t > 0.0, "mixing_residual: t must be positive");
  MixingResidual out;
  out.m_n = blocks.m_n;
  out.steps = static_cast<std::uint64_t>(std::floor(static_cast<double>(blocks.n) * t));
  require(out.m_n >= 1 && out.steps >= out.m_n, "mixing_residual: need 1 <= m_n <= [nt]");
  out.blocks = out.steps / out.m_n;
  const double a_n = norming_sequence(model, blocks.n);

  const auto full = sum_sample(model, out.steps, a_n, reps, seed, Stream::mixing_full, exec);
  // k times as many block replications (at most 100): the same step budget as the full sums
  const std::size_t block_reps = reps * static_cast<std::size_t>(std::min<std::uint64_t>(out.blocks, 100));
  const auto block = sum_sample(model, out.m_n, a_n, block_reps, seed, Stream::mixing_block, exec);
  out.phi_full = empirical_cf(full, theta);
  out.phi_block = empirical_cf(block, theta);
  const auto k = static_cast<double>(out.blocks);
  std::complex<double> power = 1.0;
  for (std::uint64_t b = 0; b < out.blocks; ++b) power *= out.phi_block;
  out.residual = std::abs(out.phi_full - power);

  const double r = static_cast<double>(reps);
  const double var_full = (1.0 - std::norm(out.phi_full)) / r;
  const double slope = k * std::pow(std::abs(out.phi_block), k - 1.0);
  const double var_block =
      slope * slope * (1.0 - std::norm(out.phi_block)) / static_cast<double>(block_reps);
  out.std_error = std::sqrt(std::max(0.0, var_full + var_block));
  return out;
}

// Tail process ------------------------------------------------------------------

TailPairs simulate_tail_pairs(const GwiModel& model, std::uint64_t lag, std::size_t reps,
                              std::uint64_t seed, Exec exec) {
  const auto pairs = map_indexed(reps, exec, [&](std::size_t i) {
    Rng rng = make_rng(seed, Stream::tail_process, i);
    const State x0 = sample_stationary(model, rng).state;
    State x = x0;
    for (std::uint64_t k = 0; k < lag; ++k) x = step(model, x, rng);
    return std::pair{x0, x};
  });
  TailPairs out;
  out.lag = lag;
  out.x0.reserve(reps);
  out.xk.reserve(reps);
  for (const auto& [a, b] : pairs) {
    out.x0.push_back(a);
    out.xk.push_back(b);
  }
  return out;
}

double tail_quantile(const TailPairs& pairs, double q) {
  require(!pairs.x0.empty(), "tail_quantile: no pairs");
  require(q > 0.0 && q < 1.0, "tail_quantile: q must lie in (0,1)");
  std::vector<State> copy = pairs.x0;
  const auto size = static_cast<double>(copy.size());
  auto index = static_cast<std::size_t>(std::ceil(q * size));
  index = index == 0 ? 0 : std::min(index - 1, copy.size() - 1);
  std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(index), copy.end());
  return static_cast<double>(copy[index]);
}

TailProcessResult tail_process_check(const TailPairs& pairs, double threshold,
                                     double offspring_mean) {
  std::vector<double> ratios;
  for (std::size_t i = 0; i < pairs.x0.size(); ++i) {
    const double x0 = static_cast<double>(pairs.x0[i]);
    if (x0 > threshold) ratios.push_back(static_cast<double>(pairs.xk[i]) / x0);
  }
  if (ratios.size() < 200) {
    fail(ErrorKind::threshold_too_high,
         "tail_process_check: only " + std::to_string(ratios.size()) + " of " +
             std::to_string(pairs.x0.size()) + " draws exceed the threshold (need >= 200)");
  }
  std::sort(ratios.begin(), ratios.end());
  TailProcessResult out;
  out.median = type7_quantile(ratios, 0.5);
  out.q25 = type7_quantile(ratios, 0.25);
  out.q75 = type7_quantile(ratios, 0.75);
  out.iqr = out.q75 - out.q25;
  out.hits = ratios.size();
  out.reps = pairs.x0.size();
  out.threshold = threshold;
  out.target = spectral_tail(offspring_mean, pairs.lag);
  return out;
}

TailProcessResult tail_process_check(const GwiModel& model, double threshold, std::uint64_t lag,
                                     std::size_t reps, std::uint64_t seed, Exec exec) {
  return tail_process_check(simulate_tail_pairs(model, lag, reps, seed, exec), threshold,
                            model.offspring_mean());
}

// b+ ----------------------------------------------------------------------------

BPlusEstimate b_plus_mc(const GwiModel& model, std::uint64_t d, std::uint64_t n,
                        std::size_t reps, std::uint64_t seed, Exec exec) {
  require(d >= 1, "b_plus_mc: d must be >= 1");
  require(n >= 1 && reps >= 1, "b_plus_mc: n and reps must be positive");
  BPlusEstimate out;
  out.reps = reps;
  out.a_n = norming_sequence(model, n);
  out.target = b_plus_sequence(model.offspring_mean(), model.alpha(), d).terms.back().b_plus;
  const double expected_hits = static_cast<double>(reps) * out.target / static_cast<double>(n);
  if (expected_hits < 100.0) {
    fail(ErrorKind::threshold_too_high,
         "b_plus_mc: " + std::to_string(reps) + " replications give about " +
             std::to_string(expected_hits) + " expected exceedances (need >= 100)");
  }
  struct Counts {
    std::size_t plus = 0;
    std::size_t minus = 0;
  };
  const auto parts = map_chunks(reps, kChunk, exec, [&](std::size_t, std::size_t begin,
                                                        std::size_t end) {
    Counts c;
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = make_rng(seed, Stream::b_plus, i);
      State x = sample_stationary(model, rng).state;
      unsigned __int128 sum = x;
      for (std::uint64_t k = 1; k < d; ++k) {
        x = step(model, x, rng);
        sum += x;
      }
      const auto s = static_cast<double>(sum);
      c.plus += s > out.a_n ? 1 : 0;
      c.minus += s <= -out.a_n ? 1 : 0;
    }
    return c;
  });
  std::size_t minus = 0;
  for (const auto& c : parts) {
    out.hits += c.plus;
    minus += c.minus;
  }
  const double r = static_cast<double>(reps);
  const double p = static_cast<double>(out.hits) / r;
  const double scale = static_cast<double>(n);
  out.b_plus = {scale * p, scale * std::sqrt(p * (1.0 - p) / r)};
  out.b_minus = scale * static_cast<double>(minus) / r;
  return out;
}

// Centering limits ----------------------------------------------------------------

CenteringLimit centering_limit_check(const GwiModel& model, std::uint64_t n, double t,
                                     std::size_t reps, std::uint64_t seed, Exec exec) {
  model.require_limit_theorem_range();
  require(t > 0.0, "centering_limit_check: t must be positive");
  const double alpha = model.alpha();
  CenteringLimit out;
  out.a_n = norming_sequence(model, n);
  out.steps = static_cast<std::uint64_t>(std::floor(static_cast<double>(n) * t));
  const Estimate lower = truncated_mean(model, out.a_n, reps, seed, exec);
  const double factor = static_cast<double>(out.steps) / out.a_n;
  if (alpha < 1.0) {
    out.estimate = {factor * lower.value, factor * lower.std_error};
    out.target = alpha / (1.0 - alpha) * t;
  } else {
    const double upper = stationary_mean(model) - lower.value;
    out.estimate = {factor * upper, factor * lower.std_error};
    out.target = alpha / (alpha - 1.0) * t;
  }
  return out;
}

// Reports ---------------------------------------------------------------------------

ReportEntry make_entry(std::string check_id, std::string statistic, double estimate,
                       double std_error, double target, double tolerance) {
  ReportEntry e;
  e.check_id = std::move(check_id);
  e.statistic = std::move(statistic);
  e.estimate = estimate;
  e.std_error = std_error;
  e.target = target;
  e.tolerance = tolerance;
  e.pass = std::abs(estimate - target) <= tolerance;
  return e;
}

bool VerificationReport::all_passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const ReportEntry& e) { return e.pass; });
}

}  // namespace gwi
