#pragma once

// Replication kernels come in two flavours selected by `Exec`: a plain serial
// loop (the reference) and an OpenMP loop. Both write per-replication results
// into an index-addressed buffer and every reduction happens afterwards in
// index order, so the two paths are bit-identical for any thread count.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace gwi {

enum class Exec { serial, parallel };

/// Reads GWI_NUM_THREADS (falls back to OpenMP's own defaults). Returns the
/// thread count that parallel kernels will use.
inline int configure_threads_from_env() {
  if (const char* env = std::getenv("GWI_NUM_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && value > 0) omp_set_num_threads(static_cast<int>(value));
  }
  return omp_get_max_threads();
}

/// out[i] = f(i) for i in [0, count).
template <class F>
auto map_indexed(std::size_t count, Exec exec, F&& f)
    -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(count);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr failure;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(gwi_map_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Splits [0, count) into fixed-size chunks (independent of thread count) and
/// maps f(chunk_index, begin, end) over them.
template <class F>
auto map_chunks(std::size_t count, std::size_t chunk, Exec exec, F&& f) {
  const std::size_t chunks = chunk == 0 ? 0 : (count + chunk - 1) / chunk;
  return map_indexed(chunks, exec, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t end = begin + chunk < count ? begin + chunk : count;
    return f(c, begin, end);
  });
}

/// Mean with standard error, built from (count, mean, M2) partials.
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  void merge(const Moments& other) {
    if (other.count == 0.0) return;
    if (count == 0.0) {
      *this = other;
      return;
    }
    const double total = count + other.count;
    const double delta = other.mean - mean;
    mean += delta * other.count / total;
    m2 += other.m2 + delta * delta * count * other.count / total;
    count = total;
  }

  double variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
  double std_error() const {
    return count > 1.0 ? std::sqrt(variance() / count) : 0.0;
  }
};

inline Moments moments_of(std::span<const double> values) {
  Moments m;
  for (double v : values) m.add(v);
  return m;
}

inline Moments merge_in_order(std::span<const Moments> parts) {
  Moments total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace gwi
