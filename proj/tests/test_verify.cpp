#include <doctest.h>

#include <cmath>
#include <vector>

#include "gwi/error.hpp"
#include "gwi/verify.hpp"

using namespace gwi;

namespace {

GwiModel bernoulli_model(double m, double alpha) {
  return GwiModel(OffspringLaw::bernoulli(m), ImmigrationLaw(alpha));
}

std::vector<double> draws(const StableParams& law, std::size_t count, std::uint64_t seed) {
  return map_indexed(count, Exec::parallel, [&](std::size_t i) {
    Rng rng = make_rng(seed, Stream::stable, i);
    return stable_sample(law, rng);
  });
}

}  // namespace

TEST_CASE("theta grid") {
  const auto g = theta_grid(-5.0, 5.0, 21);
  CHECK(g.size() == 21);
  CHECK(g.front() == -5.0);
  CHECK(g[10] == doctest::Approx(0.0));
  CHECK(g.back() == 5.0);
  CHECK_THROWS_AS(theta_grid(1.0, 0.0, 3), Error);
}

TEST_CASE("ECF distance") {
  const auto law = limit_law(0.5, 0.5);
  const auto thetas = theta_grid(-5.0, 5.0, 21);
  const std::vector<double> zeros(1000, 0.0);
  double sup = 0.0;
  for (double t : thetas) sup = std::max(sup, std::abs(1.0 - stable_cf(law, t)));
  CHECK(ecf_distance(zeros, law, thetas).distance == doctest::Approx(sup).epsilon(1e-15));

  const auto x = draws(law, 1'000'000, 1);
  const auto d = ecf_distance(x, law, thetas);
  CHECK(d.distance < 0.01);

  const std::vector<double> plus{0.5, 1.0, 3.0};
  const std::vector<double> minus{-0.5, -1.0, -3.0};
  CHECK(ecf_distance(x, law, plus).distance == doctest::Approx(ecf_distance(x, law, minus).distance));
  CHECK_THROWS_AS(ecf_distance(x, law, std::vector<double>{}), Error);

  const GeneralStableCF general{0.5, limit_scale_K(0.5, 0.5), 0.0};
  CHECK(ecf_distance(x, general, thetas).distance == doctest::Approx(d.distance).epsilon(1e-10));
}

TEST_CASE("ECF and KS distances shrink with the sample size") {
  const auto law = limit_law(0.5, 1.25);
  const auto thetas = theta_grid(-5.0, 5.0, 21);
  const auto small = draws(law, 1000, 2);
  const auto large = draws(law, 100000, 3);
  CHECK(ecf_distance(large, law, thetas).distance < ecf_distance(small, law, thetas).distance);
  CHECK(ks_distance(large, law) < ks_distance(small, law));
}

TEST_CASE("KS distance") {
  const auto law = limit_law(0.5, 1.25);
  const std::vector<double> one{0.7};
  const double f = stable_cdf(law, 0.7);
  CHECK(ks_distance(one, law) == doctest::Approx(std::max(f, 1.0 - f)));

  auto x = draws(law, 50000, 4);
  const double self = ks_distance(x, law);
  CHECK(self < 0.01);
  for (double& v : x) v += 1.0;
  CHECK(ks_distance(x, law) > self);
  CHECK(ks_distance(x, law, Exec::serial) == ks_distance(x, law, Exec::parallel));
  CHECK_THROWS_AS(ks_distance(std::vector<double>{}, law), Error);
}

TEST_CASE("uniform and two-sample KS") {
  CHECK(ks_uniform(std::vector<double>{0.5}) == doctest::Approx(0.5));
  CHECK(ks_uniform(std::vector<double>{0.25, 0.75}) == doctest::Approx(0.25));
  CHECK(ks_two_sample(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK(ks_two_sample(std::vector<double>{1, 2}, std::vector<double>{3, 4}) == 1.0);
  CHECK(ks_two_sample(std::vector<double>{1, 1, 2, 2}, std::vector<double>{1, 2}) == 0.0);
  // Kolmogorov c(0.05) = 1.3581
  CHECK(ks_band(0.05, 1) == doctest::Approx(1.3581).epsilon(1e-4));
  CHECK(ks_band(0.05, 100, 100) == doctest::Approx(1.3581 / std::sqrt(50.0)).epsilon(1e-4));
}

TEST_CASE("anti-clustering terms factorise for iid immigration") {
  const auto model = bernoulli_model(0.0, 0.5);
  AntiClusteringSpec spec;
  spec.n = 10000;
  spec.m_n = 100;
  spec.reps = 50000;
  for (const auto& term : anti_clustering_lag_terms(model, spec, 10, 5)) {
    const double band = 3.0 * std::hypot(term.paired.std_error, term.product.std_error);
    CHECK(std::abs(term.paired.value - term.product.value) < band);
  }
}

TEST_CASE("anti-clustering statistic is non-increasing in d") {
  const auto model = bernoulli_model(0.5, 0.5);
  AntiClusteringSpec spec;
  spec.n = 10000;
  spec.m_n = 100;
  spec.reps = 10000;
  double previous = 1e300;
  for (std::uint64_t d : {0u, 1u, 5u, 20u, 99u}) {
    const auto s = anti_clustering_stat(model, spec, d, 6);
    CHECK(s.statistic.value <= previous);
    previous = s.statistic.value;
  }
  CHECK_THROWS_AS(anti_clustering_stat(model, spec, 100, 6), Error);
  spec.reps = 9999;
  CHECK_THROWS_AS(anti_clustering_stat(model, spec, 1, 6), Error);
}

TEST_CASE("anti-clustering decrease is paired on the same paths") {
  const auto model = bernoulli_model(0.5, 0.5);
  AntiClusteringSpec spec;
  spec.n = 10000;
  spec.m_n = 21;
  spec.reps = 200000;
  const auto trend = anti_clustering_decrease(model, spec, 2, 20, 7);
  CHECK(trend.small_lag.statistic.value == anti_clustering_stat(model, spec, 2, 7).statistic.value);
  CHECK(trend.difference.value ==
        doctest::Approx(trend.small_lag.statistic.value - trend.large_lag.statistic.value));
  CHECK(trend.difference.value > 2.0 * trend.difference.std_error);

  AntiClusteringSpec centred = spec;
  centred.variant = AntiClusteringVariant::centred;
  CHECK_THROWS_AS(anti_clustering_stat(model, centred, 2, 7), Error);
  CHECK_NOTHROW(anti_clustering_stat(bernoulli_model(0.5, 1.25), centred, 2, 7));
}

TEST_CASE("mixing residual") {
  const auto model = bernoulli_model(0.5, 0.5);
  const auto zero = mixing_residual(model, 1000, 1.0, 0.0, 10000, 8);
  CHECK(zero.residual == 0.0);

  // iid sums factorise exactly when m_n divides [nt]
  const auto iid = bernoulli_model(0.0, 0.5);
  const auto blocks = block_sequence(10000, 0.375, 0.75, 0.5);
  CHECK(blocks.m_n == 1000);
  const auto r = mixing_residual(iid, blocks, 1.0, 1.0, 10000, 9);
  CHECK(r.blocks == 10);
  CHECK(r.residual < 3.0 * r.std_error);
  CHECK_THROWS_AS(mixing_residual(iid, blocks, 1.0, 1.0, 9999, 9), Error);
}

TEST_CASE("tail process") {
  const auto model = bernoulli_model(0.5, 1.25);
  const auto same = tail_process_check(model, 10.0, 0, 20000, 10);
  CHECK(same.median == 1.0);
  CHECK(same.iqr == 0.0);
  CHECK(same.target == 1.0);

  const auto iid = bernoulli_model(0.0, 0.5);
  const auto pairs = simulate_tail_pairs(iid, 1, 400000, 11);
  const auto r = tail_process_check(pairs, tail_quantile(pairs, 0.999), 0.0);
  CHECK(r.target == 0.0);
  CHECK(r.median < 0.01);
  CHECK(r.hits >= 200);
  try {
    (void)tail_process_check(pairs, tail_quantile(pairs, 0.9999), 0.0);
    FAIL("expected threshold-too-high");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::threshold_too_high);
  }

  const std::vector<State> x0{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const TailPairs toy{x0, x0, 1};
  CHECK(tail_quantile(toy, 0.5) == 5.0);
  CHECK(tail_quantile(toy, 0.95) == 10.0);
}

TEST_CASE("b+ Monte Carlo at d = 1 for iid immigration") {
  for (double alpha : {0.5, 1.25}) {
    const auto model = bernoulli_model(0.0, alpha);
    const auto r = b_plus_mc(model, 1, 10000, 10'000'000, 12);
    CHECK(r.target == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.b_plus.value >= 0.9);
    CHECK(r.b_plus.value <= 1.1);
    CHECK(r.b_minus == 0.0);
  }
  try {
    (void)b_plus_mc(bernoulli_model(0.5, 0.5), 2, 10000, 100000, 1);
    FAIL("expected threshold-too-high");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::threshold_too_high);
  }
  const auto model = bernoulli_model(0.0, 0.5);
  CHECK(b_plus_mc(model, 2, 100, 100000, 13, Exec::serial).hits ==
        b_plus_mc(model, 2, 100, 100000, 13, Exec::parallel).hits);
}

TEST_CASE("centering limit") {
  const auto model = bernoulli_model(0.0, 0.5);
  const auto one = centering_limit_check(model, 10000, 1.0, 100000, 14);
  const auto two = centering_limit_check(model, 10000, 2.0, 100000, 14);
  CHECK(one.target == doctest::Approx(1.0));
  CHECK(two.target == doctest::Approx(2.0));
  CHECK(two.estimate.value == doctest::Approx(2.0 * one.estimate.value).epsilon(1e-12));
  CHECK(one.steps == 10000);

  const auto heavy = centering_limit_check(bernoulli_model(0.0, 1.25), 10000, 1.0, 100000, 15);
  CHECK(heavy.target == doctest::Approx(5.0));
  CHECK_THROWS_AS(centering_limit_check(bernoulli_model(0.0, 1.5), 100, 1.0, 1000, 1), Error);
}

TEST_CASE("report entries") {
  const auto pass = make_entry("c", "s", 1.05, 0.0, 1.0, 0.1);
  const auto fail = make_entry("c", "s", 1.2, 0.0, 1.0, 0.1);
  CHECK(pass.pass);
  CHECK_FALSE(fail.pass);
  VerificationReport report;
  CHECK(report.all_passed());
  report.add(pass);
  CHECK(report.all_passed());
  report.add(fail);
  CHECK_FALSE(report.all_passed());
}
