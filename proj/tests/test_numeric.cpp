#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cbgen/numeric.hpp"
#include "cbgen/params.hpp"

using namespace cbgen;

TEST_SUITE("numeric") {

TEST_CASE("dilogarithm special values") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(numeric::dilogarithm(0.0) == 0.0);
  CHECK(numeric::dilogarithm(1.0) == doctest::Approx(pi2 / 6).epsilon(1e-15));
  CHECK(numeric::dilogarithm(-1.0) == doctest::Approx(-pi2 / 12).epsilon(1e-14));
  const double l2 = std::log(2.0);
  CHECK(numeric::dilogarithm(0.5) == doctest::Approx(pi2 / 12 - l2 * l2 / 2).epsilon(1e-14));
  CHECK_THROWS_AS(numeric::dilogarithm(1.5), DomainError);
}

TEST_CASE("dilogarithm functional equations") {
  const double pi2_6 = std::numbers::pi * std::numbers::pi / 6;
  for (double x = 0.01; x < 1.0; x += 0.07)
    CHECK(numeric::dilogarithm(x) + numeric::dilogarithm(1 - x) ==
          doctest::Approx(pi2_6 - std::log(x) * std::log1p(-x)).epsilon(1e-13));
  // Inversion for x < -1.
  for (double x : {-1.5, -4.0, -30.0}) {
    const double l = std::log(-x);
    CHECK(numeric::dilogarithm(x) + numeric::dilogarithm(1 / x) ==
          doctest::Approx(-pi2_6 - l * l / 2).epsilon(1e-13));
  }
}

TEST_CASE("adaptive quadrature") {
  auto r = numeric::integrate([](double x) { return std::exp(-x * x); }, 0.0, 6.0);
  CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-14));
  CHECK(r.error < 1e-12);
  // Integrable endpoint singularity.
  r = numeric::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                         {1e-12, 1e-11, 5000});
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(numeric::integrate([](double x) { return std::sin(1.0 / x) / x; }, 1e-9, 1.0,
                                     {1e-15, 1e-15, 20}),
                  ResourceError);
}

}  // TEST_SUITE
