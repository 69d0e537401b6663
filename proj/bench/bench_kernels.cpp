// Serial reference vs OpenMP kernels. Both paths produce identical output, so
// the numbers compare scheduling cost only.
#include <benchmark/benchmark.h>

#include "gwi/branching.hpp"
#include "gwi/parallel.hpp"
#include "gwi/partial_sum.hpp"
#include "gwi/stable_law.hpp"
#include "gwi/verify.hpp"

using namespace gwi;

namespace {

GwiModel model(double alpha) {
  return GwiModel(OffspringLaw::bernoulli(0.5), ImmigrationLaw(alpha));
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

void path_steps(benchmark::State& state) {
  const auto m = model(state.range(0) == 0 ? 0.5 : 1.25);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    auto p = simulate_path(m, 10'000, StreamId{1, rep++, Stream::path});
    benchmark::DoNotOptimize(p.values.data());
  }
  state.SetItemsProcessed(state.iterations() * 10'000);
}

void stationary(benchmark::State& state) {
  const auto m = model(0.5);
  for (auto _ : state) {
    auto v = stationary_sample(m, 100'000, 2, Stream::user, exec_of(state));
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * 100'000);
}

void scaled_sums(benchmark::State& state) {
  const auto m = model(0.5);
  const double a_n = norming_sequence(m, 1000);
  for (auto _ : state) {
    auto v = scaled_sum_sample(m, 1000, a_n, Centering::none(), 1.0, 1000, 3, exec_of(state));
    benchmark::DoNotOptimize(v.data());
  }
}

void ks(benchmark::State& state) {
  const auto law = limit_law(0.5, 0.5);
  const auto x = map_indexed(20'000, Exec::parallel, [&](std::size_t i) {
    Rng rng = make_rng(4, Stream::stable, i);
    return stable_sample(law, rng);
  });
  for (auto _ : state) benchmark::DoNotOptimize(ks_distance(x, law, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * 20'000);
}

void ecf(benchmark::State& state) {
  const auto law = limit_law(0.5, 1.25);
  const auto x = map_indexed(200'000, Exec::parallel, [&](std::size_t i) {
    Rng rng = make_rng(5, Stream::stable, i);
    return stable_sample(law, rng);
  });
  const auto thetas = theta_grid(-5.0, 5.0, 21);
  for (auto _ : state) benchmark::DoNotOptimize(ecf_distance(x, law, thetas, exec_of(state)));
}

}  // namespace

BENCHMARK(path_steps)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(stationary)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(scaled_sums)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(ks)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(ecf)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
