#include "gwi/heavy_tail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/negative_binomial_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "gwi/error.hpp"

namespace gwi {

namespace {

// Infinite series are summed exactly over this many support points before the
// closed-form remainder takes over.
constexpr std::uint64_t kSeriesTerms = std::uint64_t{1} << 17;

// Integral of y^beta * alpha y^(-alpha-1) over (lo, hi]; hi may be +inf when
// beta < alpha.
double power_tail_integral(double alpha, double beta, double lo, double hi) {
  const double e = beta - alpha;
  if (e == 0.0) return alpha * std::log(hi / lo);
  if (std::isinf(hi)) return alpha / (-e) * std::pow(lo, e);
  return alpha / e * (std::pow(hi, e) - std::pow(lo, e));
}

// sum_{k=lo}^{hi-1} k^beta P(eps = k) = int_lo^hi floor(y)^beta alpha y^(-alpha-1) dy
// with floor(y)^beta ~ y^beta - (beta/2) y^(beta-1); relative error O(lo^-2).
double power_tail_sum(double alpha, double beta, double lo, double hi) {
  return power_tail_integral(alpha, beta, lo, hi) -
         0.5 * beta * power_tail_integral(alpha, beta - 1.0, lo, hi);
}

// sum_{k=first}^{last} k^beta P(eps = k)
double power_moment_sum(const ImmigrationLaw& law, double beta, std::uint64_t first,
                        std::uint64_t last) {
  double total = 0.0;
  double compensation = 0.0;
  for (std::uint64_t k = first; k <= last; ++k) {
    const double kd = static_cast<double>(k);
    const double term = std::pow(kd, beta) * law.pmf(k);
    const double y = term - compensation;
    const double t = total + y;
    compensation = (t - total) - y;
    total = t;
  }
  return total;
}

State saturate(double value) {
  if (!(value < static_cast<double>(kStateCeiling))) return kStateCeiling;
  return static_cast<State>(value);
}

State saturate(std::int64_t value) {
  if (value <= 0) return 0;
  return static_cast<State>(value) >= kStateCeiling ? kStateCeiling
                                                   : static_cast<State>(value);
}

}  // namespace

// ImmigrationLaw ------------------------------------------------------------

ImmigrationLaw::ImmigrationLaw(double alpha) : alpha_(alpha) {
  require(alpha > 0.0 && alpha < 2.0,
          "immigration tail index must lie in (0,2), got " + std::to_string(alpha));
}

State ImmigrationLaw::from_uniform(double u) const noexcept {
  return saturate(std::floor(std::pow(u, -1.0 / alpha_)));
}

double ImmigrationLaw::tail(double x) const {
  require(x >= 0.0, "immigration_tail: x must be non-negative");
  return std::pow(std::floor(x) + 1.0, -alpha_);
}

double ImmigrationLaw::pmf(std::uint64_t k) const noexcept {
  if (k == 0) return 0.0;
  const double kd = static_cast<double>(k);
  // k^-a - (k+1)^-a without cancellation
  return std::pow(kd, -alpha_) * -std::expm1(-alpha_ * std::log1p(1.0 / kd));
}

double ImmigrationLaw::truncated_moment(double beta, double x) const {
  require(beta > 0.0, "truncated moment order must be positive");
  require(x >= 0.0, "truncation level must be non-negative");
  const double top = std::floor(x);
  if (top < 1.0) return 0.0;
  const auto cap = static_cast<double>(kExactSummationCap);
  if (top <= cap) return power_moment_sum(*this, beta, 1, static_cast<std::uint64_t>(top));
  return power_moment_sum(*this, beta, 1, kExactSummationCap) +
         power_tail_sum(alpha_, beta, cap + 1.0, top + 1.0);
}

double ImmigrationLaw::upper_moment(double beta, double x) const {
  require(beta > 0.0, "upper moment order must be positive");
  require(beta < alpha_, "E(eps^beta 1{eps > x}) is infinite unless beta < alpha");
  require(x >= 0.0, "truncation level must be non-negative");
  const auto first = static_cast<std::uint64_t>(std::floor(x)) + 1;
  const std::uint64_t last = first + kSeriesTerms - 1;
  return power_moment_sum(*this, beta, first, last) +
         power_tail_sum(alpha_, beta, static_cast<double>(last) + 1.0,
                        std::numeric_limits<double>::infinity());
}

double ImmigrationLaw::moment(double beta) const { return upper_moment(beta, 0.0); }

double ImmigrationLaw::mean() const {
  if (!(alpha_ > 1.0)) {
    fail(ErrorKind::infinite_mean,
         "E(eps) is infinite for tail index alpha = " + std::to_string(alpha_) + " <= 1");
  }
  // E(eps) = sum_{k>=0} P(eps > k) = sum_{j>=1} j^-alpha, with an
  // Euler-Maclaurin remainder after kSeriesTerms terms.
  double total = 0.0;
  for (std::uint64_t j = kSeriesTerms; j >= 1; --j) {
    total += std::pow(static_cast<double>(j), -alpha_);
  }
  const double big = static_cast<double>(kSeriesTerms);
  const double remainder = std::pow(big, 1.0 - alpha_) / (alpha_ - 1.0) -
                           0.5 * std::pow(big, -alpha_) +
                           alpha_ / 12.0 * std::pow(big, -alpha_ - 1.0);
  return total + remainder;
}

// OffspringLaw --------------------------------------------------------------

OffspringLaw OffspringLaw::bernoulli(double p) {
  require(p >= 0.0 && p < 1.0, "Bernoulli offspring needs p in [0,1)");
  return {OffspringFamily::bernoulli, p};
}

OffspringLaw OffspringLaw::poisson(double lambda) {
  require(lambda >= 0.0 && lambda < 1.0, "Poisson offspring needs mean in [0,1)");
  return {OffspringFamily::poisson, lambda};
}

OffspringLaw OffspringLaw::geometric(double mean) {
  require(mean >= 0.0 && mean < 1.0, "geometric offspring needs mean in [0,1)");
  return {OffspringFamily::geometric, mean};
}

double OffspringLaw::second_moment() const noexcept {
  switch (family_) {
    case OffspringFamily::bernoulli: return mean_;
    case OffspringFamily::poisson: return mean_ + mean_ * mean_;
    case OffspringFamily::geometric: return mean_ + 2.0 * mean_ * mean_;
  }
  return 0.0;
}

std::string OffspringLaw::name() const {
  std::ostringstream os;
  os << to_string(family_) << "(mean=" << mean_ << ")";
  return os.str();
}

State OffspringLaw::sample_one(Rng& rng) const {
  if (mean_ == 0.0) return 0;
  switch (family_) {
    case OffspringFamily::bernoulli: return rng.uniform_open() < mean_ ? 1 : 0;
    case OffspringFamily::poisson: {
      boost::random::poisson_distribution<std::int64_t, double> dist(mean_);
      return saturate(dist(rng));
    }
    case OffspringFamily::geometric: {
      // P(k) = (1-q) q^k with q = m/(1+m)
      const double q = mean_ / (1.0 + mean_);
      return saturate(std::floor(std::log(rng.uniform_open()) / std::log(q)));
    }
  }
  return 0;
}

State OffspringLaw::aggregate(State x, Rng& rng) const {
  if (x == 0 || mean_ == 0.0) return 0;
  const auto count = static_cast<std::int64_t>(x);
  switch (family_) {
    case OffspringFamily::bernoulli: {
      boost::random::binomial_distribution<std::int64_t, double> dist(count, mean_);
      return saturate(dist(rng));
    }
    case OffspringFamily::poisson: {
      boost::random::poisson_distribution<std::int64_t, double> dist(
          static_cast<double>(x) * mean_);
      return saturate(dist(rng));
    }
    case OffspringFamily::geometric: {
      // x-fold sum of geometrics = failures before x successes
      boost::random::negative_binomial_distribution<std::int64_t, double> dist(
          count, 1.0 / (1.0 + mean_));
      return saturate(dist(rng));
    }
  }
  return 0;
}

std::string to_string(OffspringFamily family) {
  switch (family) {
    case OffspringFamily::bernoulli: return "bernoulli";
    case OffspringFamily::poisson: return "poisson";
    case OffspringFamily::geometric: return "geometric";
  }
  return "unknown";
}

OffspringFamily parse_offspring_family(const std::string& text) {
  if (text == "bernoulli") return OffspringFamily::bernoulli;
  if (text == "poisson") return OffspringFamily::poisson;
  if (text == "geometric") return OffspringFamily::geometric;
  fail(ErrorKind::invalid_argument, "unknown offspring family '" + text + "'");
}

// Free functions -------------------------------------------------------------

double karamata_ratio(const ImmigrationLaw& law, double beta, double x) {
  require(beta > 0.0, "karamata_ratio: beta must be positive");
  require(x >= 1.0, "karamata_ratio: x must be >= 1");
  const double numerator = std::pow(x, beta) * law.tail(x);
  if (beta >= law.alpha()) return numerator / law.truncated_moment(beta, x);
  return numerator / law.upper_moment(beta, x);
}

double hill_estimator(std::span<const double> sample, std::size_t k) {
  require(k >= 1 && k < sample.size(), "hill_estimator: need 1 <= k < sample size");
  std::vector<double> top(sample.begin(), sample.end());
  for (double v : top) require(v > 0.0, "hill_estimator: sample values must be positive");
  std::nth_element(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k), top.end(),
                   std::greater<>());
  const double threshold = top[k];
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(top[i] / threshold);
  if (!(sum > 0.0)) {
    fail(ErrorKind::degenerate_sample,
         "hill_estimator: top order statistics are tied, log-spacing sum is zero");
  }
  return static_cast<double>(k) / sum;
}

double hill_estimator(std::span<const double> sample) {
  const auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(sample.size()))));
  return hill_estimator(sample, k);
}

// NormingSequence ------------------------------------------------------------

NormingSequence NormingSequence::analytic(double offspring_mean, const ImmigrationLaw& law) {
  require(offspring_mean >= 0.0 && offspring_mean < 1.0,
          "norming sequence: offspring mean must lie in [0,1)");
  NormingSequence seq;
  seq.mode_ = NormingMode::analytic;
  seq.alpha_ = law.alpha();
  seq.tail_factor_ = 1.0 / (1.0 - std::pow(offspring_mean, law.alpha()));
  return seq;
}

NormingSequence NormingSequence::empirical(std::vector<State> stationary_sample) {
  require(!stationary_sample.empty(), "empirical norming needs a non-empty sample");
  NormingSequence seq;
  seq.mode_ = NormingMode::empirical;
  std::sort(stationary_sample.begin(), stationary_sample.end());
  seq.sorted_ = std::move(stationary_sample);
  return seq;
}

double NormingSequence::operator()(std::uint64_t n) const {
  require(n >= 1, "norming sequence index must be >= 1");
  if (mode_ == NormingMode::analytic) {
    return std::pow(static_cast<double>(n) * tail_factor_, 1.0 / alpha_) - 1.0;
  }
  const std::size_t size = sorted_.size();
  if (size < n) {
    fail(ErrorKind::insufficient_sample,
         "empirical norming: sample of " + std::to_string(size) +
             " draws cannot resolve the (1-1/n)-quantile for n = " + std::to_string(n));
  }
  // smallest order statistic with empirical CDF >= 1 - 1/n
  const double level = 1.0 - 1.0 / static_cast<double>(n);
  auto index = static_cast<std::size_t>(std::ceil(level * static_cast<double>(size)));
  index = index == 0 ? 0 : index - 1;
  return static_cast<double>(sorted_[std::min(index, size - 1)]);
}

}  // namespace gwi
