#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cbgen/kernel.hpp"
#include "cbgen/samplers.hpp"
#include "cbgen/stats.hpp"

using namespace cbgen;

namespace {

const ModelParams kUnit{1.0, 1.0};

// Moment checks here use 5 standard errors over modest sample sizes.
void check_mean(const std::vector<double>& v, double target) {
  const MCEstimate e = summarize(v);
  CHECK(std::abs(e.mean - target) <= 5.0 * e.stderr_ + 1e-12);
}

}  // namespace

TEST_SUITE("samplers") {

TEST_CASE("random streams are reproducible and independent of worker count") {
  RandomStream a(7, 3), b(7, 3), c(7, 4);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CHECK(RandomStream(7, 3)() != c());
  for (int i = 0; i < 10000; ++i) {
    const double u = a.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
  auto run = [] {
    return parallel_map(1000, RandomStream(11, 0), [](std::int64_t, RandomStream& rng) { return rng.uniform(); });
  };
  const auto first = run();
  CHECK(first == run());
  CHECK(first[0] == RandomStream(11, 0).substream(0).uniform());
}

TEST_CASE("z0 law") {
  const ModelParams p{1.0, 2.0};
  auto z = parallel_map(50000, RandomStream(1, 0), [&](std::int64_t, RandomStream& rng) { return sample_z0(p, rng); });
  check_mean(z, kernel::pop_mean(p));
  std::vector<double> z2(z.size()), lap(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z2[i] = z[i] * z[i];
    lap[i] = std::exp(-1.3 * z[i]);
  }
  check_mean(z2, kernel::pop_second_moment(p));
  check_mean(lap, kernel::pop_laplace(p, 1.3));
}

TEST_CASE("lineage sample structure") {
  RandomStream rng(3, 0);
  for (int i = 0; i < 200; ++i) {
    const LineageSample s = sample_lineage(kUnit, rng, 1e-3);
    REQUIRE(std::is_sorted(s.lifetimes.rbegin(), s.lifetimes.rend()));
    for (double z : s.lifetimes) REQUIRE(z > 1e-3);
    CHECK(s.ancestors_at(1e-3) == static_cast<std::int64_t>(s.lifetimes.size()));
    CHECK(s.ancestors_at(100.0) == 0);
    const StepPath path = ancestor_path(s);
    CHECK(path.value_at(0.5) == s.ancestors_at(0.5));
    CHECK(path.value_at(0.002) == s.ancestors_at(0.002));
  }
  CHECK_THROWS_AS(sample_lineage(kUnit, rng, 0.0), DomainError);
}

TEST_CASE("ancestor counts across parameters") {
  const ModelParams p{0.5, 1.7};
  const double r = 0.4;
  auto m = parallel_map(40000, RandomStream(5, 0), [&](std::int64_t, RandomStream& rng) {
    return static_cast<double>(sample_lineage(p, rng, 0.01).ancestors_at(r));
  });
  check_mean(m, kernel::ancestors_mean(p, r));
  std::vector<double> m2(m.size()), zero(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    m2[i] = m[i] * m[i];
    zero[i] = m[i] == 0.0;
  }
  check_mean(m2, kernel::ancestors_second_moment(p, r));
  check_mean(zero, kernel::tmrca_cdf(p, r));
}

TEST_CASE("tree length and compensation") {
  LineageSample s;
  s.z0 = 0.8;
  s.epsilon = 0.01;
  s.lifetimes = {2.0, 0.5, 0.05};
  CHECK(tree_length(s, 0.1) == doctest::Approx(1.9 + 0.4));
  CHECK(tree_length(s, 0.01) == doctest::Approx(1.99 + 0.49 + 0.04));
  const double comp = compensated_length(kUnit, s, 0.1);
  CHECK(comp == doctest::Approx(2.3 + 0.8 * std::log(-std::expm1(-0.2))));
  CHECK_THROWS_AS(tree_length(s, 0.001), DomainError);
}

TEST_CASE("forward chain is a thinning") {
  auto data = parallel_map_multi(40000, 2, RandomStream(9, 0), [&](std::int64_t, RandomStream& rng, std::span<double> row) {
    const ForwardChain ch = forward_thinning_chain(kUnit, rng, {0.5, 1.0});
    REQUIRE(ch.counts[1] <= ch.counts[0]);
    row[0] = static_cast<double>(ch.counts[0]);
    row[1] = static_cast<double>(ch.counts[1]);
  });
  check_mean(data[0], kernel::ancestors_mean(kUnit, 0.5));
  check_mean(data[1], kernel::ancestors_mean(kUnit, 1.0));
  RandomStream rng(1, 1);
  CHECK_THROWS_AS(forward_thinning_chain(kUnit, rng, {1.0, 0.5}), DomainError);
}

TEST_CASE("excursion slice counts are nonincreasing in the horizon") {
  RandomStream rng(13, 0);
  std::vector<double> mass;
  for (int i = 0; i < 20000; ++i) {
    const SliceSample s = excursion_slice_sample(kUnit, rng, 0.5, {0.25, 0.5, 1.0});
    REQUIRE(s.counts[0] >= s.counts[1]);
    REQUIRE(s.counts[1] >= s.counts[2]);
    REQUIRE(s.mass > 0.0);
    mass.push_back(s.mass);
  }
  check_mean(mass, kernel::excursion_mean(kUnit, 0.5) / kernel::extinction_rate(kUnit, 0.5));
}

TEST_CASE("fluctuation pair") {
  RandomStream rng(17, 0);
  CHECK(fluctuation_pair(kUnit, rng, 0.01, 0.01) == 0.0);
  CHECK_THROWS_AS(fluctuation_pair(kUnit, rng, 0.01, 0.02), DomainError);
  CHECK_THROWS_AS(fluctuation_pair(kUnit, rng, 0.01, 0.0), DomainError);
}

TEST_CASE("discrete helpers") {
  RandomStream rng(19, 0);
  CHECK(binomial(rng, 0, 0.5) == 0);
  CHECK(binomial(rng, 10, 1.0) == 10);
  CHECK(poisson(rng, 0.0) == 0);
  std::vector<double> v;
  for (int i = 0; i < 20000; ++i) v.push_back(static_cast<double>(binomial(rng, 1'000'000'000, 0.3)));
  check_mean(v, 3e8);
}

}  // TEST_SUITE
