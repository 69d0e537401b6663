#include "gwi/stable_law.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "gwi/error.hpp"

namespace gwi {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

constexpr double kCdfTolerance = 1e-6;

void require_alpha(double alpha) {
  require(alpha > 0.0 && alpha < 2.0, "stability index must lie in (0,2), got " +
                                          std::to_string(alpha));
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// ---------------------------------------------------------------------------
// CDF of the standard law (gamma = 1, delta = 0).
//
// F(z) = 1/2 - (1/pi) Im \int_0^inf (g(t) - h(t)) dt / t with
// g(t) = exp(-i t z - t^a A), A = 1 - i beta tan(pi a/2), h(t) = exp(-t).
// h is real on the positive axis, so it leaves the imaginary part alone and
// only removes the 1/t singularity. The path is rotated to t = r e^{-i psi},
// psi picked to minimise the oscillation left on the ray.
// On the rotated ray the integral splits into
//   [0, r0]:   power series of e^X - e^{-t}, X = -izt - A t^a, |X| <= 0.2
//   [r0, inf): \int g du by 7/15 Gauss-Kronrod panels in u = log r,
//              minus \int h dt/t = E1(r0 e^{-i psi}) in closed form.
class StandardCdf {
 public:
  StandardCdf(double alpha, double beta, double z) : alpha_(alpha), z_(z) {
    a_ = cplx(1.0, -beta * std::tan(kPi * alpha / 2.0));
    abs_a_ = std::abs(a_);
    eta_ = -std::arg(a_);
    // |alpha psi + eta| < pi/2 keeps exp(-A t^alpha) decaying on the ray.
    const double psi_hi = std::min(kPi / 4.0, 0.5 * (kPi / 2.0 - eta_) / alpha);
    const double psi_lo = std::max(-kPi / 4.0, 0.5 * (-kPi / 2.0 - eta_) / alpha);
    double best_work = std::numeric_limits<double>::infinity();
    constexpr int kCandidates = 8;
    for (int k = 0; k <= kCandidates; ++k) {
      const double psi = psi_lo + (psi_hi - psi_lo) * k / kCandidates;
      const auto end = ray_end(psi);
      if (!end) continue;
      const double work = std::abs(z) * *end + abs_a_ * std::pow(*end, alpha);
      if (work < best_work) {
        best_work = work;
        psi_ = psi;
        r_end_ = *end;
      }
    }
    rot_ = std::polar(1.0, -psi_);
    rot_alpha_ = std::polar(1.0, -alpha * psi_);
    c1_ = cplx(0.0, -z) * rot_;
    c2_ = -a_ * rot_alpha_;
  }

  CdfValue evaluate(int density) const {
    const double az = std::abs(z_);
    double r0 = std::pow(0.1 / abs_a_, 1.0 / alpha_);
    if (az > 0.0) r0 = std::min(r0, 0.1 / az);
    const double r_end = std::max(r_end_, r0);

    cplx total = head_series(r0) - exponential_integral(r0 * rot_);
    double error = 0.0;

    // Panels in u shrink with the local phase/decay rate of g.
    const double u_end = std::log(r_end);
    const double reach = 8.0 / density;
    double left = std::log(r0);
    while (left < u_end) {
      double width = std::min(2.0 / density, u_end - left);
      const double r_right = std::exp(left + width);
      const double rate = r_right * az + alpha_ * std::pow(r_right, alpha_) * abs_a_;
      if (rate * width > reach) width = std::max(reach / rate, 1e-3 * width);
      const cplx mid = 0.5 * width;
      const double centre = left + 0.5 * width;
      cplx kronrod = kKronrodWeights[7] * g(centre);
      cplx gauss = kGaussWeights[3] * g(centre);
      for (int i = 0; i < 7; ++i) {
        const double dx = 0.5 * width * kKronrodNodes[i];
        const cplx f_sum = g(centre - dx) + g(centre + dx);
        kronrod += kKronrodWeights[i] * f_sum;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * f_sum;
      }
      kronrod *= mid;
      gauss *= mid;
      total += kronrod;
      error += std::abs(kronrod.imag() - gauss.imag());
      left += width;
    }
    CdfValue out;
    out.value = std::clamp(0.5 - total.imag() / kPi, 0.0, 1.0);
    out.error_estimate = error / kPi;
    return out;
  }

 private:
  static constexpr double kDecay = 40.0;  // |g| < e^-40 beyond the mesh
  static constexpr double kMaxGrowth = 2.0;  // allowed log-overshoot of |g| on the ray

  // log|g(r e^{-i psi})| = s r - phi r^alpha. Radius where it falls to -kDecay,
  // or nothing when the ray is unusable.
  std::optional<double> ray_end(double psi) const {
    const double phi = abs_a_ * std::cos(alpha_ * psi + eta_);
    const double s = -z_ * std::sin(psi);
    if (!(phi > 0.0)) return std::nullopt;
    const double pure = std::pow(kDecay / phi, 1.0 / alpha_);
    if (s <= 0.0) return s < 0.0 ? std::min(pure, kDecay / -s) : pure;
    if (alpha_ <= 1.0) return std::nullopt;
    const double peak_r = std::pow(s / (alpha_ * phi), 1.0 / (alpha_ - 1.0));
    if (s * peak_r * (1.0 - 1.0 / alpha_) > kMaxGrowth) return std::nullopt;
    double r = std::max(pure, peak_r);
    for (int i = 0; i < 60; ++i) r = std::pow((kDecay + s * r) / phi, 1.0 / alpha_);
    return r;
  }
  static constexpr int kSeriesOrder = 12;

  // 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]; the
  // odd-indexed Kronrod nodes are the Gauss nodes.
  static constexpr double kKronrodNodes[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr double kKronrodWeights[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double kGaussWeights[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  cplx g(double u) const {
    const double r = std::exp(u);
    const double r_alpha = std::exp(alpha_ * u);
    const double re = c1_.real() * r + c2_.real() * r_alpha;
    const double im = c1_.imag() * r + c2_.imag() * r_alpha;
    return std::polar(std::exp(re), im);
  }

  // \int_{-inf}^{log r0} (e^X - e^{-t}) du, expanding both exponentials.
  cplx head_series(double r0) const {
    const cplx x1 = cplx(0.0, -z_) * (r0 * rot_);              // -i z t0
    const cplx x2 = -a_ * (std::pow(r0, alpha_) * rot_alpha_);  // -A t0^a
    const cplx mt = -(r0 * rot_);                               // -t0
    std::array<cplx, kSeriesOrder + 1> p1{};
    std::array<cplx, kSeriesOrder + 1> p2{};
    p1[0] = p2[0] = 1.0;
    for (int k = 1; k <= kSeriesOrder; ++k) {
      p1[k] = p1[k - 1] * x1;
      p2[k] = p2[k - 1] * x2;
    }
    cplx sum = 0.0;
    cplx pt = 1.0;
    double factorial = 1.0;
    for (int k = 1; k <= kSeriesOrder; ++k) {
      factorial *= k;
      pt *= mt;
      double binom = 1.0;
      cplx inner = 0.0;
      for (int j = 0; j <= k; ++j) {
        if (j > 0) binom = binom * (k - j + 1) / j;
        inner += binom * p1[j] * p2[k - j] / (j + alpha_ * (k - j));
      }
      sum += (inner - pt / static_cast<double>(k)) / factorial;
    }
    return sum;
  }

  // E1(w) = -gamma_E - log w - sum_{k>=1} (-w)^k / (k k!), principal branch.
  static cplx exponential_integral(cplx w) {
    cplx sum = 0.0;
    cplx power = 1.0;
    double factorial = 1.0;
    for (int k = 1; k <= 40; ++k) {
      power *= -w;
      factorial *= k;
      const cplx term = power / (k * factorial);
      sum += term;
      if (std::abs(term) < 1e-18) break;
    }
    return -std::numbers::egamma - std::log(w) - sum;
  }

  double alpha_;
  double z_;
  cplx a_;
  double abs_a_ = 1.0;
  double eta_ = 0.0;
  double psi_ = 0.0;
  double r_end_ = 1.0;
  cplx rot_;
  cplx rot_alpha_;
  cplx c1_;  // g = exp(c1 r + c2 r^alpha)
  cplx c2_;
};

}  // namespace

double c_alpha(double alpha) {
  require_alpha(alpha);
  if (alpha == 1.0) return kPi / 2.0;
  // cos(pi a/2) = sin(pi (1-a)/2); the sine form stays accurate next to a = 1
  return std::tgamma(2.0 - alpha) * std::sin(kPi * (1.0 - alpha) / 2.0) / (1.0 - alpha);
}

double limit_scale_K(double offspring_mean, double alpha) {
  require_alpha(alpha);
  require(offspring_mean >= 0.0 && offspring_mean < 1.0,
          "limit_scale_K: offspring mean must lie in [0,1)");
  return (1.0 - std::pow(offspring_mean, alpha)) / std::pow(1.0 - offspring_mean, alpha);
}

double drift_b_alpha(double offspring_mean, double alpha) {
  require(alpha != 1.0, "drift b_alpha is undefined at alpha = 1");
  require(alpha > 0.0 && alpha < 4.0 / 3.0,
          "drift b_alpha is defined for alpha in (0,1) u (1,4/3)");
  return (limit_scale_K(offspring_mean, alpha) - 1.0) * alpha / (1.0 - alpha);
}

void GeneralStableCF::validate() const {
  require_alpha(alpha);
  require(c_plus >= 0.0 && c_minus >= 0.0, "tail constants c+ and c- must be non-negative");
  require(c_plus + c_minus > 0.0, "tail constants c+ and c- cannot both be zero");
}

void StableParams::validate() const {
  require_alpha(alpha);
  require(beta >= -1.0 && beta <= 1.0, "skewness beta must lie in [-1,1]");
  require(gamma > 0.0, "scale gamma must be positive");
  require(std::isfinite(delta), "location delta must be finite");
}

StableParams limit_law(double offspring_mean, double alpha) {
  StableParams p;
  p.alpha = alpha;
  p.beta = 1.0;
  p.gamma = std::pow(c_alpha(alpha) * limit_scale_K(offspring_mean, alpha), 1.0 / alpha);
  p.delta = 0.0;
  return p;
}

StableParams centered_limit_law(double offspring_mean, double alpha) {
  require(alpha != 1.0, "the centred limit law is undefined at alpha = 1");
  StableParams p = limit_law(offspring_mean, alpha);
  p.delta = -alpha / (1.0 - alpha);
  return p;
}

StableParams to_params(const GeneralStableCF& cf) {
  cf.validate();
  StableParams p;
  p.alpha = cf.alpha;
  const double total = cf.c_plus + cf.c_minus;
  p.beta = (cf.c_plus - cf.c_minus) / total;
  p.gamma = std::pow(c_alpha(cf.alpha) * total, 1.0 / cf.alpha);
  p.delta = 0.0;
  return p;
}

std::complex<double> stable_cf(const GeneralStableCF& law, double theta) {
  law.validate();
  if (theta == 0.0) return 1.0;
  const double abs_t = std::abs(theta);
  const double s = sign(theta);
  const double c = c_alpha(law.alpha);
  const double sum = law.c_plus + law.c_minus;
  const double diff = law.c_plus - law.c_minus;
  cplx exponent;
  if (law.alpha == 1.0) {
    exponent = -c * abs_t * cplx(sum, diff * (2.0 / kPi) * s * std::log(abs_t));
  } else {
    exponent = -c * std::pow(abs_t, law.alpha) *
               cplx(sum, -diff * std::tan(kPi * law.alpha / 2.0) * s);
  }
  return std::exp(exponent);
}

std::complex<double> stable_cf(const StableParams& law, double theta) {
  law.validate();
  if (theta == 0.0) return 1.0;
  const double abs_t = std::abs(theta);
  const double s = sign(theta);
  cplx exponent;
  if (law.alpha == 1.0) {
    exponent = -law.gamma * abs_t * cplx(1.0, law.beta * (2.0 / kPi) * s * std::log(abs_t));
  } else {
    exponent = -std::pow(law.gamma * abs_t, law.alpha) *
               cplx(1.0, -law.beta * std::tan(kPi * law.alpha / 2.0) * s);
  }
  return std::exp(exponent + cplx(0.0, law.delta * theta));
}

double stable_sample(const StableParams& params, Rng& rng) {
  params.validate();
  require(params.alpha != 1.0, "stable_sample: alpha = 1 is not supported");
  const double a = params.alpha;
  const double v = kPi * (rng.uniform_open() - 0.5);
  const double w = -std::log(rng.uniform_open());
  const double t = params.beta * std::tan(kPi * a / 2.0);
  const double b = std::atan(t) / a;
  const double s = std::pow(1.0 + t * t, 1.0 / (2.0 * a));
  const double x = s * std::sin(a * (v + b)) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos(v - a * (v + b)) / w, (1.0 - a) / a);
  return params.gamma * x + params.delta;
}

CdfValue stable_cdf_detailed(const StableParams& params, double x) {
  params.validate();
  require(params.alpha != 1.0, "stable_cdf: alpha = 1 is not supported");
  const double z = (x - params.delta) / params.gamma;
  if (std::isinf(z)) return {z > 0.0 ? 1.0 : 0.0, 0.0};
  require(!std::isnan(z), "stable_cdf: x must not be NaN");
  // totally skewed with alpha < 1: support is a half-line ending at delta
  if (params.alpha < 1.0 && params.beta == 1.0 && z <= 0.0) return {0.0, 0.0};
  if (params.alpha < 1.0 && params.beta == -1.0 && z >= 0.0) return {1.0, 0.0};
  const StandardCdf cdf(params.alpha, params.beta, z);
  CdfValue result = cdf.evaluate(1);
  for (int density = 2; result.error_estimate > kCdfTolerance && density <= 16; density *= 2) {
    result = cdf.evaluate(density);
  }
  if (result.error_estimate > kCdfTolerance) {
    fail(ErrorKind::inversion_failure,
         "stable_cdf: quadrature error estimate " + std::to_string(result.error_estimate) +
             " exceeds 1e-6 at x = " + std::to_string(x));
  }
  return result;
}

double stable_cdf(const StableParams& params, double x) {
  return stable_cdf_detailed(params, x).value;
}

BPlusTable b_plus_sequence(double offspring_mean, double alpha, std::size_t d_max) {
  require(d_max >= 1, "b_plus_sequence: d_max must be >= 1");
  const double k = limit_scale_K(offspring_mean, alpha);
  const double m = offspring_mean;
  const double head_scale = 1.0 - std::pow(m, alpha);

  BPlusTable table;
  table.c_plus = k;
  table.c_minus = 0.0;
  table.terms.reserve(d_max);
  double inner = 0.0;  // sum_{i=1}^{d-1} (1 - m^i)^alpha
  double previous = 0.0;
  for (std::size_t d = 1; d <= d_max; ++d) {
    const double md = std::pow(m, static_cast<double>(d));
    const double value = k * (std::pow(1.0 - md, alpha) / head_scale + inner);
    table.terms.push_back({d, value, value - previous});
    previous = value;
    inner += std::pow(1.0 - md, alpha);
  }
  return table;
}

double spectral_tail(double offspring_mean, std::size_t lag) {
  require(offspring_mean >= 0.0 && offspring_mean < 1.0,
          "spectral_tail: offspring mean must lie in [0,1)");
  return std::pow(offspring_mean, static_cast<double>(lag));
}

}  // namespace gwi
