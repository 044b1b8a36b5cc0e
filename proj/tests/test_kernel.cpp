#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "cbgen/kernel.hpp"
#include "cbgen/numeric.hpp"

using namespace cbgen;
using namespace cbgen::kernel;

namespace {

const ModelParams kUnit{1.0, 1.0};
constexpr double kPi2Over6 = std::numbers::pi * std::numbers::pi / 6.0;

// Composite Simpson rule; an oracle independent of the adaptive integrator.
double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// E[W_0 W_s] at beta theta = 1 from the power series in x = e^{-2s}.
double w_cov_series(double s) {
  const double x = std::exp(-2.0 * s);
  double h = 0.0, first = 0.0, second = 0.0, xk = 1.0;
  for (int k = 1; k < 4000; ++k) {
    h += 1.0 / k;
    first += xk * (1.0 - k * h) / (double(k) * k);
    xk *= x;
    second += h * xk * x / k;
  }
  return (kPi2Over6 * x + first + second) / 2.0;
}

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("constructor rejects nonpositive parameters") {
  CHECK_THROWS_AS(ModelParams(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(ModelParams(1.0, -2.0), DomainError);
  CHECK_THROWS_AS(ModelParams(std::nan(""), 1.0), DomainError);
}

// Values from mpmath at 30 digits, computed from the defining ODE and
// integrals rather than from the closed forms used here.
TEST_CASE("frozen oracle values at beta = theta = 1") {
  CHECK(cumulant(kUnit, 1.0, 0.5) == doctest::Approx(0.279530844388958728).epsilon(1e-14));
  CHECK(cumulant(kUnit, 10.0, 2.0) == doctest::Approx(0.0309992067111897814).epsilon(1e-13));
  CHECK(extinction_rate(kUnit, 0.5) == doctest::Approx(2.0 / (std::exp(1.0) - 1.0)).epsilon(1e-15));
  CHECK(band_cumulant_integral(kUnit, 1.0, 0.5) == doctest::Approx(0.274642636880155037).epsilon(1e-13));
  CHECK(tail_rate_integral(kUnit, 0.5) == doctest::Approx(0.458675145387081891).epsilon(1e-13));
  CHECK(tmrca_mean(kUnit) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(joint_forward_laplace(kUnit, std::log(2.0), std::log(2.0), 0.5, 1.0) ==
        doctest::Approx(0.565222982990672691).epsilon(1e-13));
  CHECK(cross_moment(kUnit, 0.5, 1.0) == doctest::Approx(0.859573019265732032).epsilon(1e-13));
  CHECK(ancestors_second_moment(kUnit, 0.5) == doctest::Approx(3.19613473776944822).epsilon(1e-13));
  CHECK(ancestors_laplace(kUnit, 1.0, 0.5) == doctest::Approx(0.534446645388523027).epsilon(1e-13));
  CHECK(pop_laplace(kUnit, 1.0) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  CHECK(phi(0.25) == doctest::Approx(-0.0874405328813168631).epsilon(1e-12));
  CHECK(phi(3.7) == doctest::Approx(-7.45416605577326371).epsilon(1e-12));
  CHECK(w_laplace(kUnit, 0.25) == doctest::Approx(1.20081927428011055).epsilon(1e-12));
  CHECK(compensated_increment_second_moment(kUnit, 0.1, 1.0) ==
        doctest::Approx(0.711200767205533000).epsilon(1e-12));
  CHECK(numeric::dilogarithm(0.864665) == doctest::Approx(1.2138952243561349).epsilon(1e-14));
}

TEST_CASE("values stated with the model") {
  CHECK(extinction_rate(kUnit, 0.5) == doctest::Approx(1.16395).epsilon(1e-5));
  CHECK(tmrca_cdf(kUnit, 0.5) == doctest::Approx(0.39958).epsilon(1e-5));
  CHECK(pop_autocovariance_raw(kUnit, 0.5) == doctest::Approx((2.0 + std::exp(-1.0)) / 2.0).epsilon(1e-14));
  CHECK(w_laplace(kUnit, 0.5) == doctest::Approx(1.0 / (std::log(2.0) * std::log(2.0))).epsilon(1e-12));
  CHECK(slice_laplace(kUnit, std::log(2.0), 0.5, 0.5) == doctest::Approx(0.18084).epsilon(1e-4));
  CHECK(slice_mean(kUnit, 0.5, 0.5) == doctest::Approx(0.42820).epsilon(1e-4));
  CHECK(restricted_mean(kUnit, 0.5, 0.5, 0.5) == doctest::Approx(0.25921).epsilon(1e-4));
  CHECK(two_time_cross_moment(kUnit, 1.0, 0.3, 0.8) == doctest::Approx(0.3736).epsilon(1e-3));
  CHECK(w_second_moment(kUnit) == doctest::Approx(kPi2Over6).epsilon(1e-15));
}

TEST_CASE("phi at integers is minus n times the harmonic number") {
  double h = 0.0;
  for (int n = 1; n <= 10; ++n) {
    h += 1.0 / n;
    CHECK(std::abs(phi(n) + n * h) < 1e-10);
  }
  CHECK(phi(0.0) == 0.0);
  CHECK(phi(1000.0) == doctest::Approx(-7485.470860550344).epsilon(1e-12));
}

TEST_CASE("phi against a Simpson oracle of the unit-interval form") {
  for (double l : {0.1, 0.5, 1.7, 4.0}) {
    // (1 - v^l) / (1 - v) is smooth on [0, 1) with limit l at v = 1.
    const double ref = -l * simpson([l](double v) { return v >= 1.0 ? l : (1.0 - std::pow(v, l)) / (1.0 - v); },
                                    0.0, 1.0, 200000);
    CHECK(phi(l) == doctest::Approx(ref).epsilon(l < 1.0 ? 1e-5 : 1e-9));
  }
}

TEST_CASE("w_laplace domain") {
  CHECK_THROWS_AS(w_laplace(kUnit, 1.0), DomainError);
  CHECK_THROWS_AS(w_laplace(kUnit, 1.5), DomainError);
  CHECK_THROWS_AS(w_laplace(kUnit, -0.1), DomainError);
  CHECK(w_laplace(kUnit, 0.0) == 1.0);
  try {
    w_laplace(kUnit, 1.5);
  } catch (const DomainError& e) {
    CHECK(e.quantity() == "w_laplace");
    CHECK(e.argument() == 1.5);
  }
}

TEST_CASE("semigroup and extinction-rate composition") {
  const ModelParams p{0.7, 1.9};
  for (double l : {1e-3, 0.3, 7.0, 1e3})
    for (double s : {1e-3, 0.2, 1.5})
      for (double t : {1e-3, 0.4, 3.0}) {
        CHECK(std::abs(cumulant(p, cumulant(p, l, s), t) - cumulant(p, l, s + t)) / (1.0 + l) < 1e-12);
        CHECK(cumulant(p, extinction_rate(p, s), t) ==
              doctest::Approx(extinction_rate(p, s + t)).epsilon(1e-12));
      }
}

TEST_CASE("extinction rate inverse and derivative") {
  const ModelParams p{2.0, 0.3};
  for (double t : {1e-6, 0.01, 0.5, 3.0, 20.0}) {
    CHECK(extinction_rate_inverse(p, extinction_rate(p, t)) == doctest::Approx(t).epsilon(1e-12));
    const double h = 1e-6 * t;
    const double fd = (extinction_rate(p, t + h) - extinction_rate(p, t - h)) / (2 * h);
    CHECK(extinction_rate_derivative(p, t) == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK_THROWS_AS(extinction_rate(p, 0.0), DomainError);
  CHECK_THROWS_AS(extinction_rate_inverse(p, -1.0), DomainError);
}

TEST_CASE("integrals against Simpson") {
  const ModelParams p{1.3, 0.8};
  CHECK(band_cumulant_integral(p, 2.0, 1.2) ==
        doctest::Approx(simpson([&](double s) { return cumulant(p, 2.0, s); }, 0.0, 1.2)).epsilon(1e-12));
  CHECK(band_rate_integral(p, 0.3, 2.0) ==
        doctest::Approx(simpson([&](double s) { return extinction_rate(p, s); }, 0.3, 2.0)).epsilon(1e-12));
  // Tail truncated where c is below 1e-20.
  CHECK(tail_rate_integral(p, 0.3) ==
        doctest::Approx(simpson([&](double s) { return extinction_rate(p, s); }, 0.3, 40.0, 400000))
            .epsilon(1e-10));
}

TEST_CASE("ancestor laws are consistent with the Poisson mixture") {
  const ModelParams p{0.9, 1.4};
  for (double r : {0.1, 0.6, 2.0}) {
    const double c = extinction_rate(p, r);
    CHECK(ancestors_mean(p, r) == doctest::Approx(c * pop_mean(p)).epsilon(1e-14));
    CHECK(ancestors_second_moment(p, r) ==
          doctest::Approx(c * pop_mean(p) + c * c * pop_second_moment(p)).epsilon(1e-13));
    CHECK(ancestors_laplace(p, 0.7, r) == doctest::Approx(pop_laplace(p, c * -std::expm1(-0.7))).epsilon(1e-13));
    CHECK(graft_identity(p, r) == doctest::Approx(tmrca_cdf(p, r)).epsilon(1e-13));
  }
}

TEST_CASE("conditional mean is affine in m and matches the cross moment") {
  const ModelParams p{1.0, 1.0};
  const double t = 0.5, r = 1.0;
  const double slope = cond_mean(p, t, r, 1.0) - cond_mean(p, t, r, 0.0);
  CHECK(cond_mean(p, t, r, 5.0) == doctest::Approx(cond_mean(p, t, r, 0.0) + 5.0 * slope).epsilon(1e-13));
  CHECK(slope == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("two-time moment branches agree at the boundary") {
  const ModelParams p{1.2, 0.7};
  for (auto [r, s] : std::vector<std::pair<double, double>>{{0.5, 0.3}, {1.0, 1.0}, {0.2, 2.0}})
    CHECK(two_time_cross_moment_near(p, r, s, s + r) ==
          doctest::Approx(two_time_cross_moment_far(p, r, s, s + r)).epsilon(1e-12));
  CHECK(two_time_cross_moment(p, 1.0, 0.0, 0.5) == doctest::Approx(cross_moment(p, 0.5, 1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(two_time_cross_moment(p, 1.0, 0.5, 0.4), DomainError);
}

TEST_CASE("w covariance against the series oracle") {
  CHECK(w_covariance(kUnit, 0.5) == doctest::Approx(w_cov_series(0.5)).epsilon(1e-13));
  CHECK(w_covariance(kUnit, 0.5) == doctest::Approx(0.2541337509060847).epsilon(1e-13));
  CHECK(w_covariance(kUnit, 0.1) == doctest::Approx(0.83547055499539846).epsilon(1e-12));
  CHECK(w_covariance(kUnit, 0.01) == doctest::Approx(1.4103340580141543).epsilon(1e-12));
  CHECK(w_covariance(kUnit, 1e-4) == doctest::Approx(1.636399150561723).epsilon(1e-12));
  CHECK(w_covariance(kUnit, 1.0) == doctest::Approx(0.082451548297954425).epsilon(1e-12));
  CHECK(w_covariance(kUnit, 5.0) == doctest::Approx(2.59904784108454e-5).epsilon(1e-10));
  CHECK(w_covariance(kUnit, 0.0) == doctest::Approx(kPi2Over6).epsilon(1e-15));
  // Scaling: f(beta theta s) / (beta theta)^2.
  const ModelParams p{2.0, 1.5};
  CHECK(w_covariance(p, 0.5 / 3.0) == doctest::Approx(w_covariance(kUnit, 0.5) / 9.0).epsilon(1e-12));
}

TEST_CASE("w covariance is strictly decreasing and approaches the variance slowly") {
  double prev = w_second_moment(kUnit);
  for (double s : {1e-4, 1e-3, 0.01, 0.03, 0.1, 0.3, 1.0, 2.0, 5.0, 20.0}) {
    const double v = w_covariance(kUnit, s);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  // Large-s asymptote (pi^2/6 - 1/2) x / 2.
  const double x = std::exp(-2.0 * 12.0);
  CHECK(w_covariance(kUnit, 12.0) == doctest::Approx((kPi2Over6 - 0.5) * x / 2.0).epsilon(1e-6));
}

TEST_CASE("increment second moment ratio to s log(s)^2") {
  std::vector<double> ratio;
  for (double s : {0.1, 0.03, 0.01, 0.003, 0.001}) {
    const double l = std::log(s);
    ratio.push_back(w_increment_second_moment(kUnit, s) / (s * l * l));
  }
  for (std::size_t i = 1; i < ratio.size(); ++i) CHECK(ratio[i] < ratio[i - 1]);
  const double lo = ratio[4], hi = ratio[2];
  CHECK((hi - lo) / lo < 0.15);
}

TEST_CASE("truncation error bound and compensated moments") {
  const ModelParams p{1.5, 0.6};
  for (double eta : {1e-4, 1e-2, 0.5, 3.0}) {
    CHECK(compensated_truncation_error(p, eta) <= truncation_error_bound(p, eta));
    CHECK(compensated_second_moment(p, eta) < w_second_moment(p));
  }
  CHECK(compensated_second_moment(p, 1e-9) == doctest::Approx(w_second_moment(p)).epsilon(1e-6));
  // Increment moments add along a chain of truncations for nested compensated sums.
  const double a = compensated_increment_second_moment(p, 0.1, 0.5);
  const double b = compensated_increment_second_moment(p, 0.5, 2.0);
  const double ab = compensated_increment_second_moment(p, 0.1, 2.0);
  CHECK(ab > a);
  CHECK(ab > b);
}

TEST_CASE("restricted slice transforms reduce at mu = 0") {
  for (double l : {0.2, 1.0}) {
    const double base = restricted_laplace_1(kUnit, l, 0.5, 0.6, 0.4);
    CHECK(restricted_laplace_2(kUnit, l, 0.0, 0.5, 0.6, 0.4, 0.3) == doctest::Approx(base).epsilon(1e-12));
    CHECK(restricted_laplace_3(kUnit, l, 0.0, 0.5, 0.6, 0.4, 0.3) == doctest::Approx(base).epsilon(1e-12));
  }
  CHECK_THROWS_AS(restricted_laplace_2(kUnit, 1.0, 1.0, 0.5, 0.6, 0.4, 0.7), DomainError);
}

TEST_CASE("extinct-weighted mean forms agree") {
  for (double s : {0.05, 0.5, 2.0})
    for (double t : {0.1, 1.0, 4.0})
      CHECK(extinct_weighted_mean(kUnit, s, t) ==
            doctest::Approx(extinct_weighted_mean_ratio_form(kUnit, s, t)).epsilon(1e-12));
}

}  // TEST_SUITE
