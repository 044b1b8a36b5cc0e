#include "cbgen/kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cbgen/numeric.hpp"

namespace cbgen::kernel {

namespace {

constexpr double kPi2Over6 = std::numbers::pi * std::numbers::pi / 6.0;

void require(bool ok, const char* quantity, double arg, const char* reason) {
  if (!ok) throw DomainError(quantity, arg, reason);
}

void require_laplace_arg(double lambda, const char* quantity) {
  require(std::isfinite(lambda) && lambda >= 0.0, quantity, lambda,
          "requires a finite lambda >= 0");
}

void require_positive(double t, const char* quantity) {
  require(t > 0.0, quantity, t, "requires a positive argument");
}

// 1 - exp(-x) without cancellation.
double one_minus_exp(double x) { return -std::expm1(-x); }

// Unchecked c(t) for t > 0; c(+inf) = 0.
double c_of(const ModelParams& p, double t) { return 2.0 * p.theta() / std::expm1(p.rate() * t); }

double u_of(const ModelParams& p, double lambda, double t) {
  if (lambda == 0.0) return 0.0;
  const double at = p.rate() * t;
  const double denom = lambda * std::expm1(at) + 2.0 * p.theta() * std::exp(at);
  return 2.0 * p.theta() * lambda / denom;
}

}  // namespace

double branching_mechanism(const ModelParams& p, double lambda) {
  require(std::isfinite(lambda), "branching_mechanism", lambda, "requires a finite argument");
  return p.beta() * lambda * lambda + p.rate() * lambda;
}

double cumulant(const ModelParams& p, double lambda, double t) {
  require_laplace_arg(lambda, "cumulant");
  require(t >= 0.0, "cumulant", t, "requires t >= 0");
  return u_of(p, lambda, t);
}

double extinction_rate(const ModelParams& p, double t) {
  require_positive(t, "extinction_rate");
  return c_of(p, t);
}

double extinction_rate_inverse(const ModelParams& p, double y) {
  require_positive(y, "extinction_rate_inverse");
  return std::log1p(2.0 * p.theta() / y) / p.rate();
}

double extinction_rate_derivative(const ModelParams& p, double t) {
  require_positive(t, "extinction_rate_derivative");
  const double c = c_of(p, t);
  return -p.rate() * c * (1.0 + c / (2.0 * p.theta()));
}

double band_cumulant_integral(const ModelParams& p, double lambda, double t) {
  require_laplace_arg(lambda, "band_cumulant_integral");
  require(t >= 0.0, "band_cumulant_integral", t, "requires t >= 0");
  return std::log1p(lambda * one_minus_exp(p.rate() * t) / (2.0 * p.theta())) / p.beta();
}

double tail_rate_integral(const ModelParams& p, double s) {
  require_positive(s, "tail_rate_integral");
  return -std::log(one_minus_exp(p.rate() * s)) / p.beta();
}

double band_rate_integral(const ModelParams& p, double t, double s) {
  require_positive(t, "band_rate_integral");
  require(s >= t, "band_rate_integral", s, "requires s >= t");
  return std::log(one_minus_exp(p.rate() * s) / one_minus_exp(p.rate() * t)) / p.beta();
}

double excursion_mean(const ModelParams& p, double t) {
  require(t >= 0.0, "excursion_mean", t, "requires t >= 0");
  return std::exp(-p.rate() * t);
}

double survival_laplace(const ModelParams& p, double lambda, double t) {
  require_laplace_arg(lambda, "survival_laplace");
  require_positive(t, "survival_laplace");
  // c(t) - u(lambda, t), rearranged to avoid cancellation.
  return c_of(p, t) / (1.0 + lambda * one_minus_exp(p.rate() * t) / (2.0 * p.theta()));
}

double extinct_weighted_mean(const ModelParams& p, double s, double t) {
  require(s >= 0.0, "extinct_weighted_mean", s, "requires s >= 0");
  require_positive(t, "extinct_weighted_mean");
  return branching_mechanism(p, c_of(p, s + t)) / branching_mechanism(p, c_of(p, t));
}

double extinct_weighted_mean_ratio_form(const ModelParams& p, double s, double t) {
  require(s >= 0.0, "extinct_weighted_mean", s, "requires s >= 0");
  require_positive(t, "extinct_weighted_mean");
  const double ratio = c_of(p, s + t) / c_of(p, t);
  return std::exp(p.rate() * s) * ratio * ratio;
}

double pop_laplace(const ModelParams& p, double lambda) {
  require_laplace_arg(lambda, "pop_laplace");
  const double base = 1.0 + lambda / (2.0 * p.theta());
  return 1.0 / (base * base);
}

double pop_mean(const ModelParams& p) { return 1.0 / p.theta(); }

double pop_second_moment(const ModelParams& p) { return 1.5 / (p.theta() * p.theta()); }

double pop_autocovariance_raw(const ModelParams& p, double s) {
  require(s >= 0.0, "pop_autocovariance_raw", s, "requires s >= 0");
  return (2.0 + std::exp(-p.rate() * s)) / (2.0 * p.theta() * p.theta());
}

double tmrca_cdf(const ModelParams& p, double t) {
  require(t >= 0.0, "tmrca_cdf", t, "requires t >= 0");
  const double g = one_minus_exp(p.rate() * t);
  return g * g;
}

double tmrca_mean(const ModelParams& p) { return 3.0 / (4.0 * p.beta() * p.theta()); }

double ancestors_mean(const ModelParams& p, double r) {
  require_positive(r, "ancestors_mean");
  return c_of(p, r) / p.theta();
}

double ancestors_second_moment(const ModelParams& p, double r) {
  require_positive(r, "ancestors_second_moment");
  const double c = c_of(p, r);
  return c / p.theta() * (1.0 + 1.5 * c / p.theta());
}

double ancestors_laplace(const ModelParams& p, double lambda, double r) {
  require_laplace_arg(lambda, "ancestors_laplace");
  require_positive(r, "ancestors_laplace");
  const double base = 1.0 + c_of(p, r) / (2.0 * p.theta()) * one_minus_exp(lambda);
  return 1.0 / (base * base);
}

double joint_forward_laplace(const ModelParams& p, double mu, double lambda, double t,
                             double r) {
  require_laplace_arg(mu, "joint_forward_laplace");
  require_laplace_arg(lambda, "joint_forward_laplace");
  require_positive(t, "joint_forward_laplace");
  require(r > t, "joint_forward_laplace", r, "requires r > t");
  const double k = 2.0 * p.theta();
  const double base = 1.0 + c_of(p, t) / k * one_minus_exp(mu) +
                      c_of(p, r) / k * one_minus_exp(lambda) * std::exp(-mu);
  return 1.0 / (base * base);
}

double cond_mean(const ModelParams& p, double t, double r, double m) {
  require_positive(t, "cond_mean");
  require(r >= t, "cond_mean", r, "requires r >= t");
  require(m >= 0.0, "cond_mean", m, "requires m >= 0");
  const double decay = std::exp(-p.rate() * (r - t));
  const double ct = c_of(p, t);
  return ct / p.theta() * (1.0 - decay) + ct / c_of(p, r) * decay * m;
}

double cross_moment(const ModelParams& p, double t, double r) {
  require_positive(t, "cross_moment");
  require(r >= t, "cross_moment", r, "requires r >= t");
  return c_of(p, r) / p.theta() * (1.0 + 1.5 * c_of(p, t) / p.theta());
}

namespace {

void require_two_time(double r, double s, double q) {
  require_positive(r, "two_time_cross_moment");
  require(s >= 0.0, "two_time_cross_moment", s, "requires s >= 0");
  require(q > s, "two_time_cross_moment", q, "requires q > s");
}

}  // namespace

double two_time_cross_moment_near(const ModelParams& p, double r, double s, double q) {
  require_two_time(r, s, q);
  const double th = p.theta();
  return c_of(p, r) / th * c_of(p, q) / th * (th / c_of(p, q - s) + 1.5);
}

double two_time_cross_moment_far(const ModelParams& p, double r, double s, double q) {
  require_two_time(r, s, q);
  const double th = p.theta();
  const double cq = c_of(p, q);
  return c_of(p, r) / th * cq / th * (th / c_of(p, q - s) * cq / c_of(p, r + s) + 1.5);
}

double two_time_cross_moment(const ModelParams& p, double r, double s, double q) {
  require_two_time(r, s, q);
  return s + r >= q ? two_time_cross_moment_near(p, r, s, q) : two_time_cross_moment_far(p, r, s, q);
}

double slice_laplace(const ModelParams& p, double lambda, double v, double q) {
  require_laplace_arg(lambda, "slice_laplace");
  require(v >= 0.0, "slice_laplace", v, "requires v >= 0");
  require_positive(q, "slice_laplace");
  return u_of(p, c_of(p, q) * one_minus_exp(lambda), v);
}

double slice_mean(const ModelParams& p, double v, double q) {
  require(v >= 0.0, "slice_mean", v, "requires v >= 0");
  require_positive(q, "slice_mean");
  return c_of(p, q) * std::exp(-p.rate() * v);
}

double slice_mean_conditioned(const ModelParams& p, double v, double q) {
  require(v >= 0.0, "slice_mean_conditioned", v, "requires v >= 0");
  require_positive(q, "slice_mean_conditioned");
  return c_of(p, q) / c_of(p, v + q) * std::exp(-p.rate() * v);
}

double thinning_factor(const ModelParams& p, double lambda, double q, double r) {
  require_laplace_arg(lambda, "thinning_factor");
  require_positive(r, "thinning_factor");
  require(q > r, "thinning_factor", q, "requires q > r");
  const double inner = u_of(p, c_of(p, q - r) * one_minus_exp(lambda), r);
  return std::exp(-lambda) * (1.0 - inner / c_of(p, r));
}

namespace {

double kappa1(const ModelParams& p, double lambda, double q, double s) {
  return one_minus_exp(lambda) * c_of(p, q) + std::exp(-lambda) * c_of(p, q + s);
}

void require_restricted(double lambda, double v, double q, double s, const char* name) {
  require_laplace_arg(lambda, name);
  require_positive(v, name);
  require_positive(q, name);
  require_positive(s, name);
}

}  // namespace

double restricted_laplace_1(const ModelParams& p, double lambda, double v, double q,
                            double s) {
  require_restricted(lambda, v, q, s, "restricted_laplace_1");
  return u_of(p, kappa1(p, lambda, q, s), v) - c_of(p, v + q + s);
}

double restricted_laplace_2(const ModelParams& p, double lambda, double mu, double v,
                            double q, double s, double vp) {
  require_restricted(lambda, v, q, s, "restricted_laplace_2");
  require_laplace_arg(mu, "restricted_laplace_2");
  require(vp > 0.0 && vp < q, "restricted_laplace_2", vp, "requires 0 < v' < q");
  const double k2 = one_minus_exp(mu) * c_of(p, q - vp) +
                    std::exp(-mu) * kappa1(p, lambda, q, s);
  return u_of(p, k2, v) - c_of(p, v + q + s);
}

double restricted_laplace_3(const ModelParams& p, double lambda, double mu, double v,
                            double q, double s, double vp) {
  require_restricted(lambda, v, q, s, "restricted_laplace_3");
  require_laplace_arg(mu, "restricted_laplace_3");
  require(vp > 0.0 && vp < v, "restricted_laplace_3", vp, "requires 0 < v' < v");
  const double k3 = one_minus_exp(mu) * c_of(p, q + vp) +
                    std::exp(-mu) * u_of(p, kappa1(p, lambda, q, s), vp);
  return u_of(p, k3, v - vp) - c_of(p, v + q + s);
}

double restricted_mean(const ModelParams& p, double v, double q, double s) {
  require(v >= 0.0, "restricted_mean", v, "requires v >= 0");
  require_positive(q, "restricted_mean");
  require_positive(s, "restricted_mean");
  const double ratio = c_of(p, v + q + s) / c_of(p, q + s);
  return (c_of(p, q) - c_of(p, q + s)) * std::exp(p.rate() * v) * ratio * ratio;
}

double length_mean(const ModelParams& p, double eps) {
  require_positive(eps, "length_mean");
  return -std::log(one_minus_exp(p.rate() * eps)) / (p.beta() * p.theta());
}

double compensated_increment_second_moment(const ModelParams& p, double eps, double eta) {
  require_positive(eps, "compensated_increment_second_moment");
  require(eta >= eps, "compensated_increment_second_moment", eta, "requires eta >= eps");
  const double bt = p.beta() * p.theta();
  const double ge = one_minus_exp(p.rate() * eps);
  const double gh = one_minus_exp(p.rate() * eta);
  return (numeric::dilogarithm(gh) - numeric::dilogarithm(ge)) / (bt * bt) +
         2.0 * eps / bt * std::log(ge / gh);
}

double compensated_second_moment(const ModelParams& p, double eps) {
  require_positive(eps, "compensated_second_moment");
  const double bt = p.beta() * p.theta();
  const double ge = one_minus_exp(p.rate() * eps);
  return (kPi2Over6 - numeric::dilogarithm(ge)) / (bt * bt) + 2.0 * eps / bt * std::log(ge);
}

double compensated_truncation_error(const ModelParams& p, double eta) {
  require_positive(eta, "compensated_truncation_error");
  const double bt = p.beta() * p.theta();
  return numeric::dilogarithm(one_minus_exp(p.rate() * eta)) / (bt * bt);
}

double truncation_error_bound(const ModelParams& p, double eta) {
  require_positive(eta, "truncation_error_bound");
  return 4.0 * eta / (p.beta() * p.theta());
}

double length_variance(const ModelParams& p, double eps) {
  require_positive(eps, "length_variance");
  const double bt = p.beta() * p.theta();
  const double lg = std::log(one_minus_exp(p.rate() * eps));
  const double second = compensated_second_moment(p, eps) + 1.5 * lg * lg / (bt * bt);
  const double mean = -lg / bt;
  return second - mean * mean;
}

double phi(double lambda) {
  require_laplace_arg(lambda, "phi");
  if (lambda == 0.0) return 0.0;
  // -lambda * int_0^inf (1 - e^{-lambda x}) / (e^x - 1) dx; the integrand
  // tends to lambda at 0 and is below e^{-x} / (1 - e^{-x}) beyond 1.
  auto f = [lambda](double x) {
    if (x == 0.0) return lambda;
    return -std::expm1(-lambda * x) / std::expm1(x);
  };
  const numeric::QuadOptions opts{1e-16, 1e-15, 4000};
  const double knee = 1.0 / std::max(lambda, 1.0);
  double total = numeric::integrate(f, 0.0, knee, opts).value;
  if (knee < 1.0) total += numeric::integrate(f, knee, 1.0, opts).value;
  total += numeric::integrate(f, 1.0, 45.0, opts).value;
  return -lambda * total;
}

double w_laplace(const ModelParams& p, double lambda) {
  (void)p;
  require_laplace_arg(lambda, "w_laplace");
  require(lambda < 1.0, "w_laplace", lambda, "requires lambda < 1 (transform diverges)");
  const double base = 1.0 + phi(lambda);
  return 1.0 / (base * base);
}

double w_laplace_conditional(double lambda, double z) {
  require_laplace_arg(lambda, "w_laplace_conditional");
  require(z >= 0.0, "w_laplace_conditional", z, "requires z >= 0");
  return std::exp(-z * phi(lambda));
}

double w_second_moment(const ModelParams& p) {
  const double bt = p.beta() * p.theta();
  return kPi2Over6 / (bt * bt);
}

double w_covariance(const ModelParams& p, double s) {
  require(s >= 0.0 && std::isfinite(s), "w_covariance", s, "requires finite s >= 0");
  if (s == 0.0) return w_second_moment(p);
  const double a = p.rate();
  const double bt = p.beta() * p.theta();
  const double x = std::exp(-a * s);
  const double gs = one_minus_exp(a * s);
  if (x < 1e-2) {
    // Far from the diagonal the two terms cancel to O(x); expanding the
    // inner integral in powers of x gives Li2 and harmonic-number series.
    double sum = kPi2Over6 * x;
    double harmonic = 1.0;
    double xk = 1.0;  // x^{k-1}
    for (int k = 1; k < 60; ++k) {
      const double kk = static_cast<double>(k);
      if (k > 1) harmonic += 1.0 / kk;
      const double add = xk * (1.0 - kk * harmonic) / (kk * kk) + harmonic * xk * x * x / kk;
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
      xk *= x;
    }
    return sum / (2.0 * bt * bt);
  }
  const double first = (kPi2Over6 * x + numeric::dilogarithm(x) / x) / (2.0 * bt * bt);
  const double pref = 2.0 * (1.0 / x - x);

  // Inner integral over q in [s, s + r] done in closed form.
  auto f = [a, x, gs](double r) {
    if (r == 0.0) return x / (a * gs);
    const double inner = std::log1p(x * one_minus_exp(a * r) / gs);
    return inner / (a * std::expm1(a * r));
  };
  // Beyond R the integrand is below K e^{-a r} / a with K = -log(gs).
  const double k = -std::log(gs);
  const double target = 1e-12;
  double tail_r = std::max(1.0, s) / a;
  while (pref * k * std::exp(-a * tail_r) / (a * a * one_minus_exp(a * tail_r)) > target)
    tail_r *= 1.5;
  const numeric::QuadOptions opts{1e-300, 1e-13, 4000};
  double integral = 0.0;
  const double knee = std::min(s, tail_r);
  integral += numeric::integrate(f, 0.0, knee, opts).value;
  integral += numeric::integrate(f, knee, tail_r, opts).value;
  return first - pref * integral;
}

double w_increment_second_moment(const ModelParams& p, double s) {
  return 2.0 * (w_second_moment(p) - w_covariance(p, s));
}

double graft_identity(const ModelParams& p, double t) {
  require_positive(t, "graft_identity");
  const double k = 2.0 * p.theta();
  const double ratio = k / (k + c_of(p, t));
  return ratio * ratio;
}

}  // namespace cbgen::kernel
