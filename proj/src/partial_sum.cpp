#include "gwi/partial_sum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gwi/error.hpp"

namespace gwi {

namespace {

constexpr std::size_t kChunk = std::size_t{1} << 14;

double scaled_value(unsigned __int128 sum, double centre_per_step, std::uint64_t steps,
                    double scale) {
  const long double centred = static_cast<long double>(sum) -
                              static_cast<long double>(centre_per_step) * steps;
  return static_cast<double>(centred / scale);
}

}  // namespace

std::string to_string(CenteringKind kind) {
  switch (kind) {
    case CenteringKind::truncated_mean: return "truncated_mean";
    case CenteringKind::full_mean: return "full_mean";
    case CenteringKind::none: return "none";
  }
  return "unknown";
}

CenteringKind parse_centering_kind(const std::string& text) {
  if (text == "truncated_mean") return CenteringKind::truncated_mean;
  if (text == "full_mean") return CenteringKind::full_mean;
  if (text == "none") return CenteringKind::none;
  fail(ErrorKind::invalid_argument, "unknown centering '" + text + "'");
}

void require_centering_valid(CenteringKind kind, double alpha) {
  if (kind == CenteringKind::full_mean && !(alpha > 1.0)) {
    fail(ErrorKind::invalid_argument, "full_mean centering needs alpha > 1 (E(X_0) is infinite)");
  }
  if (kind == CenteringKind::none && !(alpha < 1.0)) {
    fail(ErrorKind::invalid_argument, "uncentred sums only have a stable limit for alpha < 1");
  }
}

// FidisGrid ------------------------------------------------------------------

FidisGrid::FidisGrid(std::vector<double> points) : points_(std::move(points)) {
  require(!points_.empty(), "fidis grid must contain at least one time point");
  double previous = 0.0;
  for (double t : points_) {
    require(std::isfinite(t) && t > previous,
            "fidis grid must be strictly increasing and positive");
    previous = t;
  }
}

std::vector<std::uint64_t> FidisGrid::steps(std::uint64_t n) const {
  std::vector<std::uint64_t> out;
  out.reserve(points_.size());
  for (double t : points_) {
    out.push_back(static_cast<std::uint64_t>(std::floor(static_cast<double>(n) * t)));
  }
  return out;
}

// Centering quantities --------------------------------------------------------

Estimate truncated_mean(const GwiModel& model, double a, std::size_t reps, std::uint64_t seed,
                        Exec exec) {
  require(reps >= 1000, "truncated_mean needs at least 1000 replications");
  require(a >= 0.0, "truncation level must be non-negative");
  if (a < 1.0) return {0.0, 0.0};
  const auto parts = map_chunks(reps, kChunk, exec, [&](std::size_t, std::size_t begin,
                                                        std::size_t end) {
    Moments m;
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = make_rng(seed, Stream::truncated_mean, i);
      const double x = static_cast<double>(sample_stationary(model, rng).state);
      m.add(x <= a ? x : 0.0);
    }
    return m;
  });
  const Moments total = merge_in_order(parts);
  return {total.mean, total.std_error()};
}

double stationary_mean(const GwiModel& model) {
  return model.immigration().mean() / (1.0 - model.offspring_mean());
}

// Scaled partial sums ---------------------------------------------------------

std::vector<unsigned __int128> grid_sums(const PathSample& path,
                                         const std::vector<std::uint64_t>& steps) {
  const std::uint64_t need = steps.empty() ? 0 : steps.back();
  if (need > path.steps()) {
    fail(ErrorKind::invalid_argument,
         "fidis grid reaches step " + std::to_string(need) + " but the path only has " +
             std::to_string(path.steps()) + " steps");
  }
  std::vector<unsigned __int128> out(steps.size());
  unsigned __int128 sum = 0;
  std::uint64_t k = 0;
  for (std::size_t l = 0; l < steps.size(); ++l) {
    for (; k < steps[l]; ++k) sum += path.values[k + 1];
    out[l] = sum;
  }
  return out;
}

ScaledFidis scaled_fidis(const PathSample& path, std::uint64_t n, double a_n,
                         const Centering& centering, const FidisGrid& grid) {
  require(a_n > 0.0, "norming constant must be positive");
  ScaledFidis out;
  out.n = n;
  out.a_n = a_n;
  out.centering = centering;
  out.steps = grid.steps(n);
  const auto sums = grid_sums(path, out.steps);
  out.values.resize(sums.size());
  for (std::size_t l = 0; l < sums.size(); ++l) {
    out.values[l] = scaled_value(sums[l], centering.value, out.steps[l], a_n);
  }
  return out;
}

std::vector<double> scaled_sum_sample(const GwiModel& model, std::uint64_t n, double a_n,
                                      const Centering& centering, double t, std::size_t reps,
                                      std::uint64_t seed, Exec exec) {
  const FidisGrid grid({t});
  const std::uint64_t length = grid.steps(n).back();
  return map_indexed(reps, exec, [&](std::size_t i) {
    const PathSample path = simulate_path(model, length, StreamId{seed, i, Stream::path});
    return scaled_fidis(path, n, a_n, centering, grid).values.front();
  });
}

ScaledFidis iterated_aggregate(const GwiModel& model, std::uint64_t n, std::uint64_t copies,
                               const Centering& centering, const FidisGrid& grid,
                               std::uint64_t seed, Exec exec) {
  require(copies >= 1, "iterated_aggregate needs N >= 1");
  require_centering_valid(centering.kind, model.alpha());
  ScaledFidis out;
  out.n = n;
  out.a_n = norming_sequence(model, n);
  out.centering = centering;
  out.steps = grid.steps(n);
  const std::uint64_t length = out.steps.back();

  const auto per_copy = map_indexed(copies, exec, [&](std::size_t j) {
    const PathSample path = simulate_path(model, length, StreamId{seed, j, Stream::path});
    return grid_sums(path, out.steps);
  });
  // integer sums: exact, so independent of copy order
  std::vector<unsigned __int128> total(out.steps.size(), 0);
  for (const auto& sums : per_copy) {
    for (std::size_t l = 0; l < sums.size(); ++l) total[l] += sums[l];
  }
  const double n_copies = static_cast<double>(copies);
  const double scale = out.a_n * std::pow(n_copies, 1.0 / model.alpha());
  out.values.resize(total.size());
  for (std::size_t l = 0; l < total.size(); ++l) {
    out.values[l] = scaled_value(total[l], n_copies * centering.value, out.steps[l], scale);
  }
  return out;
}

// Block sequences --------------------------------------------------------------

std::uint64_t floor_power(std::uint64_t n, double gamma) {
  const double v = std::pow(static_cast<double>(n), gamma);
  const double nearest = std::round(v);
  if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, v)) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::floor(v));
}

Gamma2Range gamma2_range(double alpha) {
  require(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0,2)");
  Gamma2Range range;
  range.hi = std::min(1.0 / alpha, 1.0);
  if (alpha > 1.0) range.hi = std::min(range.hi, 2.0 / alpha - 1.0);
  return range;
}

BlockSequence block_sequence(std::uint64_t n, double gamma1, double gamma2, double alpha) {
  require(n >= 1, "block_sequence: n must be >= 1");
  const Gamma2Range range = gamma2_range(alpha);
  std::vector<std::string> problems;
  if (!(gamma2 > 0.5)) problems.push_back("gamma2 must exceed 1/2");
  if (!(gamma2 < std::min(1.0 / alpha, 1.0))) problems.push_back("gamma2 must be below min(1/alpha, 1)");
  if (alpha > 1.0 && !(gamma2 < 2.0 / alpha - 1.0)) {
    problems.push_back("gamma2 must be below 2/alpha - 1 so that n m_n / a_n^2 -> 0");
  }
  if (range.empty()) {
    std::ostringstream os;
    os << "no admissible gamma2 exists for alpha = " << alpha
       << " (1/2 < 2/alpha - 1 < 1/alpha holds only for alpha in (1, 4/3))";
    problems.push_back(os.str());
  }
  if (!(gamma1 > 0.0)) problems.push_back("gamma1 must be positive");
  if (!(gamma1 < gamma2)) problems.push_back("gamma1 must be below gamma2");
  if (!problems.empty()) {
    std::string message = "block_sequence:";
    for (const auto& p : problems) message += " [" + p + "]";
    fail(ErrorKind::invalid_argument, message);
  }
  return {n, floor_power(n, gamma2), floor_power(n, gamma1), gamma1, gamma2};
}

BlockSequence default_block_sequence(std::uint64_t n, double alpha) {
  const Gamma2Range range = gamma2_range(alpha);
  const double gamma2 = 0.5 * (range.lo + range.hi);
  return block_sequence(n, 0.5 * gamma2, gamma2, alpha);
}

}  // namespace gwi
