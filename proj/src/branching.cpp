#include "gwi/branching.hpp"

#include <cmath>
#include <string>

#include "gwi/error.hpp"

namespace gwi {

GwiModel::GwiModel(OffspringLaw offspring, ImmigrationLaw immigration,
                   double stationarity_tolerance)
    : offspring_(offspring),
      immigration_(immigration),
      tolerance_(stationarity_tolerance),
      burn_in_(0) {
  require(offspring_.mean() >= 0.0 && offspring_.mean() < 1.0,
          "offspring mean must lie in [0,1) (subcritical)");
  require(stationarity_tolerance > 0.0 && stationarity_tolerance < 1.0,
          "stationarity tolerance must lie in (0,1)");
  require(!(immigration_.alpha() > 1.0) || std::isfinite(offspring_.second_moment()),
          "alpha > 1 requires a finite offspring second moment");
  burn_in_ = burn_in_length(offspring_.mean(), immigration_, tolerance_);
}

void GwiModel::require_limit_theorem_range() const {
  const double a = alpha();
  if (a == 1.0) {
    fail(ErrorKind::invalid_argument,
         "alpha = 1 is excluded: the stable limit theorem cannot be applied to this "
         "process for alpha = 1 (the 1-stable limit would be non-negative with full support)");
  }
  if (!(a > 0.0 && a < 4.0 / 3.0)) {
    fail(ErrorKind::invalid_argument,
         "alpha = " + std::to_string(a) +
             " is outside (0,1) u (1,4/3), the range covered by the aggregation limit theorems");
  }
}

std::size_t burn_in_length(double offspring_mean, const ImmigrationLaw& immigration,
                           double tolerance) {
  if (offspring_mean == 0.0) return 1;
  const double beta = immigration.alpha() / 2.0;
  const double decay = std::pow(offspring_mean, beta);
  const double moment = immigration.moment(beta);
  // moment * decay^B / (1 - decay) <= tolerance
  const double needed =
      std::log(tolerance * (1.0 - decay) / moment) / std::log(decay);
  std::size_t b = needed <= 1.0 ? 1 : static_cast<std::size_t>(std::ceil(needed));
  while (b > 1 && moment * std::pow(decay, static_cast<double>(b - 1)) / (1.0 - decay) <=
                      tolerance) {
    --b;
  }
  while (moment * std::pow(decay, static_cast<double>(b)) / (1.0 - decay) > tolerance) ++b;
  return b;
}

State step(const GwiModel& model, State x, Rng& rng) {
  const State offspring = model.offspring().aggregate(x, rng);
  return saturating_add(offspring, model.immigration().sample(rng));
}

StationaryDraw sample_stationary(const GwiModel& model, Rng& rng) {
  State x = 0;
  const std::size_t b = model.burn_in();
  for (std::size_t i = 0; i < b; ++i) x = step(model, x, rng);
  return {x, b};
}

PathSample simulate_path(const GwiModel& model, std::size_t n, Rng& rng) {
  PathSample path;
  path.values.resize(n + 1);
  const auto start = sample_stationary(model, rng);
  path.burn_in = start.burn_in;
  path.values[0] = start.state;
  for (std::size_t k = 1; k <= n; ++k) path.values[k] = step(model, path.values[k - 1], rng);
  return path;
}

PathSample simulate_path(const GwiModel& model, std::size_t n, const StreamId& seed) {
  Rng rng(seed);
  PathSample path = simulate_path(model, n, rng);
  path.seed = seed;
  return path;
}

std::vector<State> stationary_sample(const GwiModel& model, std::size_t count,
                                     std::uint64_t seed, Stream purpose, Exec exec) {
  return map_indexed(count, exec, [&](std::size_t i) {
    Rng rng = make_rng(seed, purpose, i);
    return sample_stationary(model, rng).state;
  });
}

TailRatio stationary_tail_ratio(const GwiModel& model, double x, std::size_t reps,
                                std::uint64_t seed, Exec exec) {
  require(reps >= 1000, "stationary_tail_ratio needs at least 1000 replications");
  const double eps_tail = model.immigration().tail(x);
  if (eps_tail * static_cast<double>(reps) < 100.0) {
    fail(ErrorKind::threshold_too_high,
         "stationary_tail_ratio: threshold " + std::to_string(x) +
             " gives fewer than 100 expected immigration tail hits over " +
             std::to_string(reps) + " replications");
  }
  const auto sample = stationary_sample(model, reps, seed, Stream::tail_ratio, exec);
  std::size_t hits = 0;
  for (State s : sample) hits += static_cast<double>(s) > x ? 1 : 0;

  TailRatio out;
  out.reps = reps;
  out.hits = hits;
  const double p = static_cast<double>(hits) / static_cast<double>(reps);
  out.ratio = p / eps_tail;
  out.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(reps)) / eps_tail;
  out.target = 1.0 / (1.0 - std::pow(model.offspring_mean(), model.alpha()));
  return out;
}

NormingSequence analytic_norming(const GwiModel& model) {
  return NormingSequence::analytic(model.offspring_mean(), model.immigration());
}

NormingSequence empirical_norming(const GwiModel& model, std::size_t sample_size,
                                  std::uint64_t seed, Exec exec) {
  return NormingSequence::empirical(
      stationary_sample(model, sample_size, seed, Stream::norming, exec));
}

double norming_sequence(const GwiModel& model, std::uint64_t n) {
  return analytic_norming(model)(n);
}

}  // namespace gwi
