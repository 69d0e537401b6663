#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gwi/heavy_tail.hpp"
#include "gwi/parallel.hpp"
#include "gwi/rng.hpp"

namespace gwi {

/// Subcritical Galton-Watson process with immigration,
/// X_k = sum_{j=1}^{X_{k-1}} xi_{k,j} + eps_k.
class GwiModel {
 public:
  GwiModel(OffspringLaw offspring, ImmigrationLaw immigration,
           double stationarity_tolerance = 1e-4);

  const OffspringLaw& offspring() const noexcept { return offspring_; }
  const ImmigrationLaw& immigration() const noexcept { return immigration_; }
  double offspring_mean() const noexcept { return offspring_.mean(); }
  double alpha() const noexcept { return immigration_.alpha(); }
  double stationarity_tolerance() const noexcept { return tolerance_; }

  /// Steps from X = 0 needed before the state is treated as a draw from pi.
  std::size_t burn_in() const noexcept { return burn_in_; }

  /// The limit theorems only cover alpha in (0,1) u (1,4/3); throws otherwise.
  void require_limit_theorem_range() const;

 private:
  OffspringLaw offspring_;
  ImmigrationLaw immigration_;
  double tolerance_;
  std::size_t burn_in_;
};

/// Smallest B >= 1 with E(eps^b) m^(B b) / (1 - m^b) <= tolerance, b = alpha/2.
std::size_t burn_in_length(double offspring_mean, const ImmigrationLaw& immigration,
                           double tolerance);

State step(const GwiModel& model, State x, Rng& rng);

struct StationaryDraw {
  State state = 0;
  std::size_t burn_in = 0;
};

StationaryDraw sample_stationary(const GwiModel& model, Rng& rng);

struct PathSample {
  std::vector<State> values;  // X_0 .. X_n
  StreamId seed;
  std::size_t burn_in = 0;

  std::size_t steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

PathSample simulate_path(const GwiModel& model, std::size_t n, const StreamId& seed);
PathSample simulate_path(const GwiModel& model, std::size_t n, Rng& rng);

struct TailRatio {
  double ratio = 0.0;
  double std_error = 0.0;
  std::size_t hits = 0;
  std::size_t reps = 0;
  double target = 0.0;  // 1/(1 - m^alpha)
};

/// Monte Carlo pi((x,inf)) / P(eps > x) from `reps` independent stationary draws.
TailRatio stationary_tail_ratio(const GwiModel& model, double x, std::size_t reps,
                                std::uint64_t seed, Exec exec = Exec::parallel);

/// `count` independent stationary draws, replication i on stream (seed, purpose, i).
std::vector<State> stationary_sample(const GwiModel& model, std::size_t count,
                                     std::uint64_t seed, Stream purpose,
                                     Exec exec = Exec::parallel);

NormingSequence analytic_norming(const GwiModel& model);
NormingSequence empirical_norming(const GwiModel& model, std::size_t sample_size,
                                  std::uint64_t seed, Exec exec = Exec::parallel);
/// Analytic a_n = (n / (1 - m^alpha))^(1/alpha) - 1.
double norming_sequence(const GwiModel& model, std::uint64_t n);

}  // namespace gwi
