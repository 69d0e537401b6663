#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "gwi/branching.hpp"
#include "gwi/error.hpp"
#include "gwi/verify.hpp"

using namespace gwi;

namespace {

GwiModel bernoulli_model(double m, double alpha) {
  return GwiModel(OffspringLaw::bernoulli(m), ImmigrationLaw(alpha));
}

std::vector<double> as_doubles(const std::vector<State>& v) {
  return std::vector<double>(v.begin(), v.end());
}

}  // namespace

TEST_CASE("model validation") {
  CHECK_THROWS_AS(OffspringLaw::bernoulli(1.0), Error);
  CHECK_THROWS_AS(OffspringLaw::poisson(-0.1), Error);
  CHECK_THROWS_AS(ImmigrationLaw(2.0), Error);
  CHECK_NOTHROW(bernoulli_model(0.5, 1.25).require_limit_theorem_range());
  CHECK_THROWS_AS(bernoulli_model(0.5, 1.0).require_limit_theorem_range(), Error);
  CHECK_THROWS_AS(bernoulli_model(0.5, 1.5).require_limit_theorem_range(), Error);
  CHECK(parse_offspring_family(to_string(OffspringFamily::geometric)) == OffspringFamily::geometric);
}

TEST_CASE("step from zero is a pure immigration draw") {
  const auto model = bernoulli_model(0.5, 0.5);
  Rng a(StreamId{1, 0, Stream::user});
  Rng b(StreamId{1, 0, Stream::user});
  for (int i = 0; i < 100; ++i) {
    const State next = step(model, 0, a);
    (void)model.offspring().aggregate(0, b);
    CHECK(next == model.immigration().sample(b));
  }
}

TEST_CASE("zero offspring mean gives immigration for any state") {
  const auto model = bernoulli_model(0.0, 0.5);
  Rng rng(StreamId{2, 0, Stream::user});
  for (State x : {State{0}, State{1}, State{1000}, State{1} << 40}) {
    const State next = step(model, x, rng);
    CHECK(next >= 1);
    CHECK(next < x + 1'000'000'000'000ULL);
  }
  CHECK(model.burn_in() == 1);
}

TEST_CASE("binomial offspring aggregate concentrates") {
  const auto offspring = OffspringLaw::bernoulli(0.5);
  Rng rng(StreamId{3, 0, Stream::user});
  int inside = 0;
  for (int r = 0; r < 2000; ++r) {
    const auto s = static_cast<double>(offspring.aggregate(1'000'000, rng));
    inside += std::abs(s - 500'000.0) <= 5'000.0 ? 1 : 0;
  }
  CHECK(inside >= 1998);
}

TEST_CASE("aggregate laws match direct summation of single offspring") {
  for (auto offspring : {OffspringLaw::bernoulli(0.3), OffspringLaw::poisson(0.6),
                         OffspringLaw::geometric(0.7)}) {
    Rng a(StreamId{4, 0, Stream::user});
    Rng b(StreamId{4, 1, Stream::user});
    const int reps = 20000;
    const State x = 25;
    std::vector<double> aggregate(reps);
    std::vector<double> direct(reps);
    for (int r = 0; r < reps; ++r) {
      aggregate[r] = static_cast<double>(offspring.aggregate(x, a));
      State sum = 0;
      for (State j = 0; j < x; ++j) sum += offspring.sample_one(b);
      direct[r] = static_cast<double>(sum);
    }
    CHECK(ks_two_sample(aggregate, direct) < ks_band(1e-3, reps, reps));
    const auto ma = moments_of(aggregate);
    CHECK(ma.mean == doctest::Approx(x * offspring.mean()).epsilon(0.03));
  }
}

TEST_CASE("Bernoulli step is bounded by x + immigration") {
  const auto model = bernoulli_model(0.7, 0.5);
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    Rng a(StreamId{6, rep, Stream::user});
    Rng b(StreamId{6, rep, Stream::user});
    const State x = rep * 37;
    const State next = step(model, x, a);
    (void)model.offspring().aggregate(x, b);
    CHECK(next <= x + model.immigration().sample(b));
  }
}

TEST_CASE("burn-in length satisfies the fractional moment bound minimally") {
  const ImmigrationLaw law(0.5);
  const std::size_t b = burn_in_length(0.5, law, 1e-4);
  const double beta = 0.25;
  const double decay = std::pow(0.5, beta);
  auto bound = [&](std::size_t steps) {
    return law.moment(beta) * std::pow(decay, static_cast<double>(steps)) / (1.0 - decay);
  };
  CHECK(bound(b) <= 1e-4);
  CHECK(bound(b - 1) > 1e-4);
  CHECK(burn_in_length(0.0, law, 1e-4) == 1);
}

TEST_CASE("paths") {
  const auto model = bernoulli_model(0.5, 0.5);
  const auto empty = simulate_path(model, 0, StreamId{9, 0, Stream::path});
  CHECK(empty.values.size() == 1);
  CHECK(empty.steps() == 0);
  const auto p = simulate_path(model, 500, StreamId{9, 1, Stream::path});
  const auto q = simulate_path(model, 500, StreamId{9, 1, Stream::path});
  CHECK(p.values.size() == 501);
  CHECK(p.values == q.values);
  CHECK(p.burn_in == model.burn_in());
  CHECK(std::all_of(p.values.begin(), p.values.end(), [](State s) { return s >= 1; }));
}

TEST_CASE("iid paths factorise pairwise") {
  const auto model = bernoulli_model(0.0, 0.5);
  const std::size_t reps = 100000;
  const auto pairs = map_indexed(reps, Exec::parallel, [&](std::size_t i) {
    const auto p = simulate_path(model, 1, StreamId{10, i, Stream::path});
    return std::pair<double, double>(std::log(static_cast<double>(p.values[0])),
                                     std::log(static_cast<double>(p.values[1])));
  });
  for (double s : {0.3, 1.0}) {
    std::complex<double> joint{0.0}, first{0.0}, second{0.0};
    for (const auto& [x, y] : pairs) {
      joint += std::polar(1.0, s * (x + y));
      first += std::polar(1.0, s * x);
      second += std::polar(1.0, s * y);
    }
    const double r = static_cast<double>(reps);
    CHECK(std::abs(joint / r - (first / r) * (second / r)) < 4.0 / std::sqrt(r));
  }
}

TEST_CASE("one-step stationarity") {
  const auto model = bernoulli_model(0.5, 0.5);
  const std::size_t reps = 100000;
  const auto paths = map_indexed(reps, Exec::parallel, [&](std::size_t i) {
    return simulate_path(model, 1, StreamId{12, i, Stream::path}).values;
  });
  std::vector<double> x0(reps), x1(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    x0[i] = static_cast<double>(paths[i][0]);
    x1[i] = static_cast<double>(paths[i][1]);
  }
  CHECK(ks_two_sample(x0, x1) < ks_band(1e-3, reps, reps));
}

TEST_CASE("longer burn-in leaves the stationary law unchanged") {
  const GwiModel standard(OffspringLaw::bernoulli(0.5), ImmigrationLaw(0.5), 1e-4);
  const GwiModel longer(OffspringLaw::bernoulli(0.5), ImmigrationLaw(0.5), 1e-8);
  CHECK(longer.burn_in() > standard.burn_in());
  const std::size_t reps = 100000;
  const auto a = as_doubles(stationary_sample(standard, reps, 13, Stream::user));
  const auto b = as_doubles(stationary_sample(longer, reps, 14, Stream::user));
  CHECK(ks_two_sample(a, b) < ks_band(1e-3, reps, reps));
}

TEST_CASE("stationary tail ratio") {
  const auto iid = bernoulli_model(0.0, 0.5);
  const auto r0 = stationary_tail_ratio(iid, 99.0, 200000, 15);
  CHECK(r0.target == 1.0);
  CHECK(std::abs(r0.ratio - 1.0) < 4.0 * r0.std_error);

  const auto heavy = bernoulli_model(0.5, 1.25);
  CHECK(stationary_tail_ratio(heavy, 1.0, 1000, 1).target ==
        doctest::Approx(1.0 / (1.0 - std::pow(0.5, 1.25))));
  CHECK(1.0 / (1.0 - std::pow(0.5, 1.25)) == doctest::Approx(1.7256).epsilon(1e-4));

  try {
    (void)stationary_tail_ratio(heavy, 1e6, 1000, 1);
    FAIL("expected threshold-too-high");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::threshold_too_high);
  }
  CHECK_THROWS_AS(stationary_tail_ratio(heavy, 1.0, 999, 1), Error);
}

TEST_CASE("tail ratio moves toward its limit as the threshold grows") {
  const auto model = bernoulli_model(0.5, 0.5);
  const auto near = stationary_tail_ratio(model, 24.0, 400000, 16);
  const auto far = stationary_tail_ratio(model, 9999.0, 400000, 17);
  const double gap_near = std::abs(near.ratio - near.target);
  const double gap_far = std::abs(far.ratio - far.target);
  CHECK((gap_far < gap_near || gap_far < 2.0 * std::hypot(near.std_error, far.std_error)));
}

TEST_CASE("serial and parallel stationary samples agree bit for bit") {
  const auto model = bernoulli_model(0.5, 1.25);
  CHECK(stationary_sample(model, 5000, 18, Stream::user, Exec::serial) ==
        stationary_sample(model, 5000, 18, Stream::user, Exec::parallel));
}
