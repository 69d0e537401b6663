#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gwi/branching.hpp"
#include "gwi/parallel.hpp"
#include "gwi/partial_sum.hpp"
#include "gwi/stable_law.hpp"

namespace gwi {

// Distances to a stable law -------------------------------------------------

/// `points` equally spaced values covering [lo, hi].
std::vector<double> theta_grid(double lo, double hi, std::size_t points);

/// Mean of e^{i theta x}.
std::complex<double> empirical_cf(std::span<const double> samples, double theta);

struct EcfDistance {
  double distance = 0.0;
  double theta_at_max = 0.0;
};

/// sup over the grid of |empirical CF - stable_cf|.
EcfDistance ecf_distance(std::span<const double> samples, const StableParams& law,
                         std::span<const double> thetas, Exec exec = Exec::parallel);
EcfDistance ecf_distance(std::span<const double> samples, const GeneralStableCF& law,
                         std::span<const double> thetas, Exec exec = Exec::parallel);

/// sup_x |F_N(x) - F(x)| for the empirical CDF F_N of `samples`.
double ks_distance(std::span<const double> samples, const StableParams& law,
                   Exec exec = Exec::parallel);
/// KS distance of values in [0,1] to the uniform law.
double ks_uniform(std::span<const double> values);
/// Two-sample KS distance.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Asymptotic Kolmogorov critical value c(level) / sqrt(n_eff) for a
/// one-sample (n_b = 0) or two-sample comparison.
double ks_band(double level, std::size_t n_a, std::size_t n_b = 0);

// Anti-clustering -----------------------------------------------------------

enum class AntiClusteringVariant { plain, centred };

struct AntiClusteringSpec {
  std::uint64_t n = 0;
  std::uint64_t m_n = 0;
  double x = 1.0;
  std::size_t reps = 10'000;
  AntiClusteringVariant variant = AntiClusteringVariant::plain;
};

struct AntiClusteringEstimate {
  Estimate statistic;  // n sum_{j=d+1}^{m_n} E[(|X_j|/a_n ^ x)(|X_0|/a_n ^ x)]
  std::uint64_t d = 0;
  double a_n = 0.0;
};

AntiClusteringEstimate anti_clustering_stat(const GwiModel& model, const AntiClusteringSpec& spec,
                                            std::uint64_t d, std::uint64_t seed,
                                            Exec exec = Exec::parallel);

/// Both statistics from the same paths, with the paired difference
/// small - large = n sum_{j=d_small+1}^{d_large} E[...] and its standard error.
struct AntiClusteringTrend {
  AntiClusteringEstimate small_lag;
  AntiClusteringEstimate large_lag;
  Estimate difference;
};

AntiClusteringTrend anti_clustering_decrease(const GwiModel& model,
                                             const AntiClusteringSpec& spec,
                                             std::uint64_t d_small, std::uint64_t d_large,
                                             std::uint64_t seed, Exec exec = Exec::parallel);

/// Per-lag terms E[f(X_j) f(X_0)] next to the product of marginal means
/// E f(X_j) E f(X_0), f(v) = |v|/a_n ^ x, for j = 1..max_lag.
struct LagTerm {
  std::uint64_t lag = 0;
  Estimate paired;
  Estimate product;
};

std::vector<LagTerm> anti_clustering_lag_terms(const GwiModel& model,
                                               const AntiClusteringSpec& spec,
                                               std::uint64_t max_lag, std::uint64_t seed,
                                               Exec exec = Exec::parallel);

// Mixing factorisation -------------------------------------------------------

struct MixingResidual {
  double residual = 0.0;   // |phi_{n,[nt]} - phi_{n,m_n}^k|
  double std_error = 0.0;  // delta-method band
  std::complex<double> phi_full;
  std::complex<double> phi_block;
  std::uint64_t steps = 0;   // [nt]
  std::uint64_t m_n = 0;
  std::uint64_t blocks = 0;  // k = [[nt] / m_n]
};

/// phi_{n,[nt]} from `reps` sums of length [nt]; phi_{n,m_n} from min(k,100) * reps
/// sums of length m_n.
MixingResidual mixing_residual(const GwiModel& model, std::uint64_t n, double t, double theta,
                               std::size_t reps, std::uint64_t seed,
                               Exec exec = Exec::parallel);
MixingResidual mixing_residual(const GwiModel& model, const BlockSequence& blocks, double t,
                               double theta, std::size_t reps, std::uint64_t seed,
                               Exec exec = Exec::parallel);

// Tail process ----------------------------------------------------------------

/// Stationary pairs (X_0, X_k) from independent replications.
struct TailPairs {
  std::vector<State> x0;
  std::vector<State> xk;
  std::uint64_t lag = 0;
};

TailPairs simulate_tail_pairs(const GwiModel& model, std::uint64_t lag, std::size_t reps,
                              std::uint64_t seed, Exec exec = Exec::parallel);

/// Empirical q-quantile of X_0 over the pairs.
double tail_quantile(const TailPairs& pairs, double q);

struct TailProcessResult {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr = 0.0;
  std::size_t hits = 0;
  std::size_t reps = 0;
  double threshold = 0.0;
  double target = 0.0;  // m^k
};

/// Quartiles of X_k / X_0 over pairs with X_0 > threshold; at least 200 hits.
TailProcessResult tail_process_check(const TailPairs& pairs, double threshold,
                                     double offspring_mean);
TailProcessResult tail_process_check(const GwiModel& model, double threshold, std::uint64_t lag,
                                     std::size_t reps, std::uint64_t seed,
                                     Exec exec = Exec::parallel);

// b+ ----------------------------------------------------------------------------

struct BPlusEstimate {
  Estimate b_plus;          // n P(S_d > a_n)
  double b_minus = 0.0;     // n P(S_d <= -a_n)
  std::size_t hits = 0;
  std::size_t reps = 0;
  double a_n = 0.0;
  double target = 0.0;      // closed-form b+(d)
};

BPlusEstimate b_plus_mc(const GwiModel& model, std::uint64_t d, std::uint64_t n,
                        std::size_t reps, std::uint64_t seed, Exec exec = Exec::parallel);

// Centering limits ----------------------------------------------------------

/// alpha < 1: [nt] E(X_0 1{X_0 <= a_n}) / a_n -> alpha/(1-alpha) t.
/// alpha > 1: [nt] E(X_0 1{X_0 >  a_n}) / a_n -> alpha/(alpha-1) t.
struct CenteringLimit {
  Estimate estimate;
  double target = 0.0;
  double a_n = 0.0;
  std::uint64_t steps = 0;
};

CenteringLimit centering_limit_check(const GwiModel& model, std::uint64_t n, double t,
                                     std::size_t reps, std::uint64_t seed,
                                     Exec exec = Exec::parallel);

// Reports -------------------------------------------------------------------

struct ReportEntry {
  std::string check_id;
  std::string statistic;
  double estimate = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

/// pass = |estimate - target| <= tolerance.
ReportEntry make_entry(std::string check_id, std::string statistic, double estimate,
                       double std_error, double target, double tolerance);

struct VerificationReport {
  std::vector<ReportEntry> entries;

  void add(ReportEntry entry) { entries.push_back(std::move(entry)); }
  bool all_passed() const;
};

}  // namespace gwi
