#include <doctest.h>

#include <cmath>
#include <vector>

#include "cbgen/kernel.hpp"
#include "cbgen/paths.hpp"
#include "cbgen/stats.hpp"

using namespace cbgen;

namespace {

const ModelParams kUnit{1.0, 1.0};

std::vector<double> exponential_reference(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<double> out(n);
  for (auto& x : out) x = rng.exponential();
  return out;
}

}  // namespace

TEST_SUITE("paths") {

TEST_CASE("birth path shape") {
  RandomStream rng(1, 0);
  PathSimConfig cfg;
  for (int i = 0; i < 500; ++i) {
    const StepPath path = simulate_birth_path(kUnit, rng, cfg);
    REQUIRE(path.direction == PathDirection::kCalendar);
    CHECK(path.breakpoints.front() == -cfg.horizon);
    for (std::size_t k = 1; k < path.values.size(); ++k) {
      REQUIRE(path.breakpoints[k] > path.breakpoints[k - 1]);
      REQUIRE(path.values[k] == path.values[k - 1] + 1);
      REQUIRE(path.breakpoints[k] < -cfg.eps_stop);
    }
  }
}

TEST_CASE("death path shape") {
  RandomStream rng(2, 0);
  for (int i = 0; i < 500; ++i) {
    const StepPath path = simulate_death_path(kUnit, rng, 1e-3, 4.0);
    REQUIRE(path.direction == PathDirection::kBackwardAncestors);
    for (std::size_t k = 1; k < path.values.size(); ++k) {
      REQUIRE(path.breakpoints[k] > path.breakpoints[k - 1]);
      REQUIRE(path.values[k] == path.values[k - 1] - 1);
    }
    CHECK(path.breakpoints.back() < 4.0);
  }
}

// Between jumps the rate is a known function of time, so the integrated
// hazard of each holding time is standard exponential.
TEST_CASE("birth holding times are exponential on the integrated-rate scale") {
  const double a = kUnit.rate();
  PathSimConfig cfg;
  cfg.init = PathInit::kFixedCount;
  cfg.fixed_count = 3;
  cfg.eps_stop = 0.01;
  RandomStream rng(3, 0);
  std::vector<double> e;
  for (int i = 0; i < 20000; ++i) {
    const StepPath path = simulate_birth_path(kUnit, rng, cfg);
    // First two jumps; the stop level is far enough that censoring is negligible.
    for (std::size_t k = 1; k < std::min<std::size_t>(3, path.breakpoints.size()); ++k) {
      const double g0 = -std::expm1(a * path.breakpoints[k - 1]);
      const double g1 = -std::expm1(a * path.breakpoints[k]);
      e.push_back(static_cast<double>(path.values[k - 1] + 2) * std::log(g0 / g1));
    }
  }
  const KsResult ks = ks_two_sample(e, exponential_reference(e.size(), 30));
  CHECK(ks.p_value > 1e-3);
}

TEST_CASE("death holding times are exponential on the integrated-rate scale") {
  RandomStream rng(4, 0);
  std::vector<double> e;
  for (int i = 0; i < 20000; ++i) {
    const StepPath path = simulate_death_path(kUnit, rng, 1e-3, 30.0);
    if (path.values.size() < 2) continue;
    const double c0 = kernel::extinction_rate(kUnit, path.breakpoints[0]);
    const double c1 = kernel::extinction_rate(kUnit, path.breakpoints[1]);
    e.push_back(static_cast<double>(path.values[0]) * std::log(c0 / c1));
  }
  REQUIRE(e.size() > 10000);
  const KsResult ks = ks_two_sample(e, exponential_reference(e.size(), 31));
  CHECK(ks.p_value > 1e-3);
}

TEST_CASE("birth compensator") {
  StepPath path;
  path.direction = PathDirection::kCalendar;
  path.breakpoints = {-2.0, -1.0};
  path.values = {0, 1};
  const double a = kUnit.rate();
  auto g = [a](double t) { return -std::expm1(a * t); };
  CHECK(birth_compensator(kUnit, path, -1.5) == doctest::Approx(2.0 * std::log(g(-2.0) / g(-1.5))));
  CHECK(birth_compensator(kUnit, path, -0.5) ==
        doctest::Approx(2.0 * std::log(g(-2.0) / g(-1.0)) + 3.0 * std::log(g(-1.0) / g(-0.5))));
  CHECK_THROWS_AS(birth_compensator(kUnit, path, -3.0), DomainError);
}

TEST_CASE("cross validation produces named checks") {
  PathValidationConfig cfg;
  cfg.grid = {0.5};
  cfg.replicates = 2000;
  const auto checks = cross_validate_paths(kUnit, 5, cfg);
  CHECK(checks.size() == 6);
  for (const auto& c : checks) CHECK(c.passed);
  cfg.grid = {1e-4};
  CHECK_THROWS_AS(cross_validate_paths(kUnit, 5, cfg), DomainError);
}

}  // TEST_SUITE
