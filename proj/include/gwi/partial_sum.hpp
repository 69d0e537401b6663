#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gwi/branching.hpp"
#include "gwi/parallel.hpp"

namespace gwi {

enum class CenteringKind { truncated_mean, full_mean, none };

std::string to_string(CenteringKind kind);
CenteringKind parse_centering_kind(const std::string& text);

/// Per-step centre subtracted from the partial sums.
struct Centering {
  CenteringKind kind = CenteringKind::none;
  double value = 0.0;

  static Centering none() { return {CenteringKind::none, 0.0}; }
  static Centering full_mean(double mean) { return {CenteringKind::full_mean, mean}; }
  static Centering truncated_mean(double value) {
    return {CenteringKind::truncated_mean, value};
  }
};

/// full_mean needs alpha > 1, none needs alpha < 1.
void require_centering_valid(CenteringKind kind, double alpha);

/// 0 < t_1 < ... < t_d.
class FidisGrid {
 public:
  explicit FidisGrid(std::vector<double> points);
  static FidisGrid unit() { return FidisGrid({1.0}); }

  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double last() const noexcept { return points_.back(); }
  /// floor(n t_l) for every grid point.
  std::vector<std::uint64_t> steps(std::uint64_t n) const;

 private:
  std::vector<double> points_;
};

/// a_n^-1 (S_[n t_l] - centre [n t_l]) on a grid, S_0 = 0.
struct ScaledFidis {
  std::vector<double> values;
  std::vector<std::uint64_t> steps;
  std::uint64_t n = 0;
  double a_n = 1.0;
  Centering centering;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo E(X_0 1{X_0 <= a}) from `reps` stationary draws (stream
/// truncated_mean). Returns exactly 0 when a < 1, since X_0 >= 1.
Estimate truncated_mean(const GwiModel& model, double a, std::size_t reps, std::uint64_t seed,
                        Exec exec = Exec::parallel);

/// E(X_0) = E(eps) / (1 - m); throws infinite_mean for alpha <= 1.
double stationary_mean(const GwiModel& model);

ScaledFidis scaled_fidis(const PathSample& path, std::uint64_t n, double a_n,
                         const Centering& centering, const FidisGrid& grid);

/// (a_n N^(1/alpha))^-1 (sum_j S^(j)_[nt] - N centre [nt]) over N independent
/// stationary paths; copy j runs on stream (seed, path, j).
ScaledFidis iterated_aggregate(const GwiModel& model, std::uint64_t n, std::uint64_t copies,
                               const Centering& centering, const FidisGrid& grid,
                               std::uint64_t seed, Exec exec = Exec::parallel);

/// `reps` independent draws of a_n^-1 (S_[nt] - centre [nt]); replication i is
/// scaled_fidis of the path on stream (seed, path, i) at the single point t.
std::vector<double> scaled_sum_sample(const GwiModel& model, std::uint64_t n, double a_n,
                                      const Centering& centering, double t, std::size_t reps,
                                      std::uint64_t seed, Exec exec = Exec::parallel);

/// Partial sums S_[n t_l] of one path, exactly, before scaling.
std::vector<unsigned __int128> grid_sums(const PathSample& path,
                                         const std::vector<std::uint64_t>& steps);

struct BlockSequence {
  std::uint64_t n = 0;
  std::uint64_t m_n = 0;  // floor(n^gamma2)
  std::uint64_t r_n = 0;  // floor(n^gamma1)
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

/// Open interval of admissible gamma2: (1/2, min(1/alpha, 1)), further capped
/// by 2/alpha - 1 when alpha > 1. Empty (lo >= hi) for alpha >= 4/3.
struct Gamma2Range {
  double lo = 0.5;
  double hi = 1.0;
  bool empty() const noexcept { return !(lo < hi); }
};
Gamma2Range gamma2_range(double alpha);

/// Validates every constraint and lists all violations in the error message.
BlockSequence block_sequence(std::uint64_t n, double gamma1, double gamma2, double alpha);
/// gamma2 at the midpoint of its range, gamma1 = gamma2 / 2.
BlockSequence default_block_sequence(std::uint64_t n, double alpha);

/// floor(n^gamma), robust to pow landing just below an exact integer.
std::uint64_t floor_power(std::uint64_t n, double gamma);

}  // namespace gwi
