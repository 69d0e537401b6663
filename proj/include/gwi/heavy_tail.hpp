#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gwi/rng.hpp"

namespace gwi {

/// Population counts. Heavy-tailed immigration (alpha < 1) produces values
/// beyond 2^64 with probability ~1e-10 per draw; states saturate at
/// kStateCeiling instead of wrapping.
using State = std::uint64_t;
inline constexpr State kStateCeiling = State{1} << 62;

constexpr State saturating_add(State a, State b) noexcept {
  return (a >= kStateCeiling || b >= kStateCeiling - a) ? kStateCeiling
                                                        : a + b;
}

/// Truncated moments are summed term by term up to this many support points;
/// the remainder of a power tail is integrated in closed form.
inline constexpr std::uint64_t kExactSummationCap = 10'000'000;

/// Floored Pareto immigration: eps = floor(U^(-1/alpha)), so
/// P(eps > k) = (k+1)^(-alpha) for integer k >= 0 and eps >= 1 a.s.
class ImmigrationLaw {
 public:
  explicit ImmigrationLaw(double alpha);

  double alpha() const noexcept { return alpha_; }

  State from_uniform(double u) const noexcept;
  State sample(Rng& rng) const noexcept { return from_uniform(rng.uniform_open()); }

  /// P(eps > x) = (floor(x)+1)^(-alpha); x must be >= 0.
  double tail(double x) const;
  double pmf(std::uint64_t k) const noexcept;

  /// E(eps^beta 1{eps <= x}).
  double truncated_moment(double beta, double x) const;
  /// E(eps^beta 1{eps > x}); finite only for beta < alpha.
  double upper_moment(double beta, double x) const;
  /// E(eps^beta) for 0 < beta < alpha.
  double moment(double beta) const;
  /// E(eps) = zeta(alpha); throws infinite_mean unless alpha > 1.
  double mean() const;

 private:
  double alpha_;
};

enum class OffspringFamily { bernoulli, poisson, geometric };

class OffspringLaw {
 public:
  static OffspringLaw bernoulli(double p);
  static OffspringLaw poisson(double lambda);
  /// Geometric on {0,1,...} with the given mean.
  static OffspringLaw geometric(double mean);

  OffspringFamily family() const noexcept { return family_; }
  double mean() const noexcept { return mean_; }
  double second_moment() const noexcept;
  std::string name() const;

  /// One offspring count.
  State sample_one(Rng& rng) const;
  /// Sum of x independent offspring counts, drawn from the aggregate law
  /// (Binomial, Poisson or negative binomial) in O(1) expected time.
  State aggregate(State x, Rng& rng) const;

 private:
  OffspringLaw(OffspringFamily family, double mean) : family_(family), mean_(mean) {}

  OffspringFamily family_;
  double mean_;
};

std::string to_string(OffspringFamily family);
OffspringFamily parse_offspring_family(const std::string& text);

/// Ratio whose limit is given by Karamata's theorem for truncated moments:
/// (beta-alpha)/alpha for beta >= alpha, (alpha-beta)/alpha for beta < alpha.
double karamata_ratio(const ImmigrationLaw& law, double beta, double x);

/// Hill estimator of the tail index from the k largest order statistics.
double hill_estimator(std::span<const double> sample, std::size_t k);
/// Same with k = floor(sqrt(N)).
double hill_estimator(std::span<const double> sample);

enum class NormingMode { analytic, empirical };

/// a_n with n P(X_0 > a_n) -> 1.
class NormingSequence {
 public:
  /// Solves n (a+1)^(-alpha) / (1 - m^alpha) = 1 exactly.
  static NormingSequence analytic(double offspring_mean, const ImmigrationLaw& law);
  /// (1 - 1/n)-quantile of a stationary sample.
  static NormingSequence empirical(std::vector<State> stationary_sample);

  NormingMode mode() const noexcept { return mode_; }
  double operator()(std::uint64_t n) const;

 private:
  NormingSequence() = default;

  NormingMode mode_ = NormingMode::analytic;
  double alpha_ = 1.0;
  double tail_factor_ = 1.0;  // 1/(1 - m^alpha)
  std::vector<State> sorted_;
};

}  // namespace gwi
