#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "gwi/rng.hpp"

namespace gwi {

/// C_alpha = Gamma(2-alpha) cos(pi alpha/2) / (1-alpha), and pi/2 at alpha = 1.
double c_alpha(double alpha);

/// K = (1 - m^alpha) / (1 - m)^alpha, the scale deflation of the aggregated
/// process relative to iid immigration.
double limit_scale_K(double offspring_mean, double alpha);

/// b_alpha = (K - 1) alpha / (1 - alpha).
double drift_b_alpha(double offspring_mean, double alpha);

/// alpha-stable law given through its tail-balance constants:
///   phi(t) = exp{-C_a |t|^a ((c+ + c-) - i (c+ - c-) tan(pi a/2) sign t)}      a != 1
///   phi(t) = exp{-C_1 |t|   ((c+ + c-) + i (c+ - c-) (2/pi) sign t log|t|)}    a == 1
struct GeneralStableCF {
  double alpha = 1.0;
  double c_plus = 1.0;
  double c_minus = 0.0;

  void validate() const;
};

/// 1-parametrisation:
///   phi(t) = exp{-gamma^a |t|^a (1 - i beta tan(pi a/2) sign t) + i delta t}.
struct StableParams {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 1.0;
  double delta = 0.0;

  void validate() const;
};

/// Law of Z_1 + alpha/(1-alpha): beta = 1, gamma^alpha = C_alpha K, delta = 0.
StableParams limit_law(double offspring_mean, double alpha);
/// Law of Z_1 itself, i.e. limit_law shifted by -alpha/(1-alpha).
StableParams centered_limit_law(double offspring_mean, double alpha);
/// Same law as `cf`, expressed in the 1-parametrisation (alpha != 1).
StableParams to_params(const GeneralStableCF& cf);

std::complex<double> stable_cf(const GeneralStableCF& law, double theta);
std::complex<double> stable_cf(const StableParams& law, double theta);

/// Chambers-Mallows-Stuck draw; alpha = 1 is rejected.
double stable_sample(const StableParams& params, Rng& rng);

struct CdfValue {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Gil-Pelaez inversion; throws inversion_failure when the quadrature error
/// estimate stays above 1e-6.
double stable_cdf(const StableParams& params, double x);
CdfValue stable_cdf_detailed(const StableParams& params, double x);

struct BPlusTerm {
  std::size_t d = 0;
  double b_plus = 0.0;
  double increment = 0.0;  // b+(d) - b+(d-1), with b+(0) = 0
};

struct BPlusTable {
  std::vector<BPlusTerm> terms;
  double c_plus = 0.0;   // lim increment = K
  double c_minus = 0.0;  // summands are non-negative
};

/// Closed-form b+(d) = lim n P(X_1 + ... + X_d > a_n), d = 1..d_max.
BPlusTable b_plus_sequence(double offspring_mean, double alpha, std::size_t d_max);

/// Forward spectral tail process Theta_lag = m^lag.
double spectral_tail(double offspring_mean, std::size_t lag);

}  // namespace gwi
