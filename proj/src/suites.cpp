#include "cbgen/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "cbgen/kernel.hpp"
#include "cbgen/numeric.hpp"
#include "cbgen/particle.hpp"
#include "cbgen/paths.hpp"
#include "cbgen/samplers.hpp"
#include "cbgen/stats.hpp"

namespace cbgen {

namespace {

constexpr double kPi2Over6 = std::numbers::pi * std::numbers::pi / 6.0;
const double kLn2 = std::log(2.0);

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

void append(SuiteReport& rep, std::vector<CheckResult> checks, std::int64_t ms) {
  for (auto& c : checks) {
    c.runtime_ms = ms;
    rep.checks.push_back(std::move(c));
  }
}

std::int64_t samples_or(const SuiteOptions& o, std::int64_t fallback) {
  const std::int64_t n = o.samples.value_or(fallback);
  if (n < 2) throw ConfigError("suite: samples must be at least 2");
  return n;
}

// Difference of two independent estimates as one estimate.
MCEstimate difference(const MCEstimate& a, const MCEstimate& b) {
  MCEstimate d;
  d.n = std::min(a.n, b.n);
  d.mean = a.mean - b.mean;
  d.stderr_ = std::hypot(a.stderr_, b.stderr_);
  d.variance = d.stderr_ * d.stderr_ * static_cast<double>(d.n);
  return d;
}

// Least-squares slope of y on x with its standard error.
MCEstimate regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - my - slope * (x[i] - mx);
    rss += e * e;
  }
  MCEstimate est;
  est.n = static_cast<std::int64_t>(x.size());
  est.mean = slope;
  est.stderr_ = std::sqrt(rss / (n - 2.0) / sxx);
  est.variance = est.stderr_ * est.stderr_ * n;
  return est;
}

// ---------------------------------------------------------------- kernel

SuiteReport kernel_suite(const SuiteOptions& o) {
  const ModelParams& p = o.params;
  const double bt = p.beta() * p.theta();
  SuiteReport rep;
  const auto t0 = Clock::now();
  std::vector<CheckResult> out;
  using namespace kernel;

  out.push_back(make_abs_check("kernel.dilog.at_one", numeric::dilogarithm(1.0), kPi2Over6, 1e-12));
  double worst = 0.0;
  for (int i = 1; i < 100; ++i) {
    const double x = i / 100.0;
    const double lhs = numeric::dilogarithm(x) + numeric::dilogarithm(1.0 - x);
    worst = std::max(worst, std::abs(lhs - (kPi2Over6 - std::log(x) * std::log1p(-x))));
  }
  out.push_back(make_abs_check("kernel.dilog.reflection", worst, 0.0, 1e-12));

  worst = 0.0;
  double harmonic = 0.0;
  for (int n = 1; n <= 10; ++n) {
    harmonic += 1.0 / n;
    worst = std::max(worst, std::abs(phi(n) + n * harmonic));
  }
  out.push_back(make_abs_check("kernel.phi.harmonic", worst, 0.0, 1e-10));
  out.push_back(make_abs_check("kernel.phi.half_closed_form", phi(0.5), kLn2 - 1.0, 1e-10));
  out.push_back(make_abs_check("kernel.w_laplace.half_closed_form", w_laplace(p, 0.5),
                               1.0 / (kLn2 * kLn2), 1e-10));
  int violations = 0;
  double prev = 0.0;
  for (double l : {0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 2.0, 5.0, 10.0}) {
    const double v = phi(l);
    if (!(v < 0.0 && v < prev)) ++violations;
    prev = v;
  }
  out.push_back(make_abs_check("kernel.phi.decreasing", violations, 0.0, 0.5));

  const std::vector<double> lambdas{1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0, 1e3};
  const std::vector<double> times{1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0};
  double semi = 0.0, rate = 0.0, ode = 0.0;
  for (double l : lambdas)
    for (double s : times)
      for (double t : times) {
        semi = std::max(semi, std::abs(cumulant(p, cumulant(p, l, s), t) - cumulant(p, l, s + t)) /
                                  (1.0 + l));
      }
  for (double s : times)
    for (double t : times) {
      const double cs = extinction_rate(p, s);
      rate = std::max(rate, std::abs(cumulant(p, cs, t) - extinction_rate(p, s + t)) / (1.0 + cs));
    }
  // Five-point stencil with h = 1e-5 for du/dt = -psi(u).
  const double h = 1e-5;
  for (double l : lambdas)
    for (double t : times) {
      const double d = (-cumulant(p, l, t + 2 * h) + 8 * cumulant(p, l, t + h) -
                        8 * cumulant(p, l, t - h) + cumulant(p, l, t - 2 * h)) /
                       (12 * h);
      const double target = -branching_mechanism(p, cumulant(p, l, t));
      ode = std::max(ode, std::abs(d - target) / std::abs(target));
    }
  out.push_back(make_abs_check("kernel.semigroup", semi, 0.0, 1e-10));
  out.push_back(make_abs_check("kernel.rate_consistency", rate, 0.0, 1e-10));
  out.push_back(make_abs_check("kernel.backward_ode", ode, 0.0, 1e-5));

  worst = 0.0;
  for (double t : {0.1, 0.5, 1.0, 3.0})
    worst = std::max(worst, std::abs(cumulant(p, 1e8, t) / extinction_rate(p, t) - 1.0));
  out.push_back(make_abs_check("kernel.cumulant_large_lambda", worst, 0.0, 1e-6));

  double g1 = 0.0, g2 = 0.0;
  for (double t : {0.1, 0.5, 1.0, 3.0}) {
    const double g = graft_identity(p, t);
    g1 = std::max(g1, std::abs(g - tmrca_cdf(p, t)));
    g2 = std::max(g2, std::abs(g - pop_laplace(p, extinction_rate(p, t))));
  }
  out.push_back(make_abs_check("kernel.graft.tmrca", g1, 0.0, 1e-12));
  out.push_back(make_abs_check("kernel.graft.pop_laplace", g2, 0.0, 1e-12));

  worst = 0.0;
  double integrals = 0.0;
  for (double s : times)
    for (double t : times) {
      const double a = extinct_weighted_mean(p, s, t);
      const double b = extinct_weighted_mean_ratio_form(p, s, t);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
      if (s > t)
        integrals = std::max(integrals, std::abs(band_rate_integral(p, t, s) -
                                                 (tail_rate_integral(p, t) - tail_rate_integral(p, s))));
    }
  out.push_back(make_abs_check("kernel.extinct_weighted_mean.forms", worst, 0.0, 1e-12));
  out.push_back(make_abs_check("kernel.integrals.consistency", integrals, 0.0, 1e-12));

  double boundary = 0.0, reduction = 0.0;
  for (auto [r, s] : std::vector<std::pair<double, double>>{{0.5, 0.3}, {1.0, 0.3}, {1.0, 1.0}, {2.0, 0.5}, {0.2, 2.0}}) {
    const double q = s + r;
    boundary = std::max(boundary, std::abs(two_time_cross_moment_near(p, r, s, q) -
                                           two_time_cross_moment_far(p, r, s, q)));
  }
  for (auto [r, q] : std::vector<std::pair<double, double>>{{1.0, 0.5}, {1.0, 1.0}, {2.0, 0.3}, {0.5, 0.1}})
    reduction = std::max(reduction,
                         std::abs(two_time_cross_moment(p, r, 0.0, q) - cross_moment(p, q, r)));
  out.push_back(make_abs_check("kernel.two_time.boundary", boundary, 0.0, 1e-10));
  out.push_back(make_abs_check("kernel.two_time.s_zero", reduction, 0.0, 1e-10));

  double mu_zero = 0.0;
  for (double l : {0.1, kLn2, 2.0}) {
    const double base = restricted_laplace_1(p, l, 0.5, 0.5, 0.5);
    mu_zero = std::max(mu_zero, std::abs(restricted_laplace_2(p, l, 0.0, 0.5, 0.5, 0.5, 0.25) - base));
    mu_zero = std::max(mu_zero, std::abs(restricted_laplace_3(p, l, 0.0, 0.5, 0.5, 0.5, 0.25) - base));
  }
  out.push_back(make_abs_check("kernel.restricted.mu_zero", mu_zero, 0.0, 1e-12));

  // Pinned values are stated at beta theta = 1; w_cov scales as
  // f(beta theta s) / (beta theta)^2.
  const double w2 = w_second_moment(p);
  out.push_back(make_abs_check("kernel.w_cov.small_s", bt * bt * w_covariance(p, 1e-4 / bt),
                               bt * bt * w2, 1e-4));
  violations = 0;
  prev = w2;
  for (double s : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0}) {
    const double v = w_covariance(p, s);
    if (!(v < prev && v > 0.0)) ++violations;
    prev = v;
  }
  out.push_back(make_abs_check("kernel.w_cov.monotone", violations, 0.0, 0.5));
  out.push_back(make_abs_check("kernel.w_cov.pinned", bt * bt * w_covariance(p, 0.5 / bt),
                               0.254133750906085, 1e-6));

  violations = 0;
  for (double eta : {1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0})
    if (compensated_truncation_error(p, eta) > truncation_error_bound(p, eta)) ++violations;
  out.push_back(make_abs_check("kernel.truncation_bound", violations, 0.0, 0.5));

  append(rep, std::move(out), ms_since(t0));
  return rep;
}

// ----------------------------------------------------------- single-time

SuiteReport single_time_suite(const SuiteOptions& o) {
  const ModelParams& p = o.params;
  const std::int64_t n = samples_or(o, 100000);
  const double eps = o.eps;
  SuiteReport rep;
  using namespace kernel;

  {
    const auto t0 = Clock::now();
    const double r = 0.5;
    if (!(eps <= 0.1)) throw ConfigError("single-time suite: eps must be at most 0.1");
    enum { kZ, kZ2, kZLap, kM, kM2, kMLap, kGraft, kTmrca, kLen, kComp, kInc, kMeps, kResid, kCount };
    const double c_eps = extinction_rate(p, eps);
    auto data = parallel_map_multi(n, kCount, RandomStream(o.seed, 1),
                                   [&](std::int64_t, RandomStream& rng, std::span<double> row) {
      thread_local LineageSample s;
      sample_lineage_given(p, rng, eps, sample_z0(p, rng), s);
      const double m = static_cast<double>(s.ancestors_at(r));
      const double meps = static_cast<double>(s.lifetimes.size());
      row[kZ] = s.z0;
      row[kZ2] = s.z0 * s.z0;
      row[kZLap] = std::exp(-s.z0);
      row[kM] = m;
      row[kM2] = m * m;
      row[kMLap] = std::exp(-m);
      row[kGraft] = m == 0.0 ? 1.0 : 0.0;
      row[kTmrca] = s.lifetimes.empty() ? 0.0 : s.lifetimes.front();
      row[kLen] = tree_length(s, 0.1);
      row[kComp] = compensated_length(p, s, eps);
      const double inc = compensated_length(p, s, 1.0) - compensated_length(p, s, 0.1);
      row[kInc] = inc * inc;
      row[kMeps] = meps;
      const double resid = meps / c_eps - s.z0;
      row[kResid] = resid * resid;
    });
    std::vector<CheckResult> out;
    out.push_back(make_z_check("single.z0.mean", summarize(data[kZ]), pop_mean(p)));
    out.push_back(make_z_check("single.z0.second_moment", summarize(data[kZ2]), pop_second_moment(p)));
    out.push_back(make_z_check("single.z0.laplace_1", summarize(data[kZLap]), pop_laplace(p, 1.0)));
    out.push_back(make_z_check("single.ancestors.mean_0.5", summarize(data[kM]), ancestors_mean(p, r)));
    out.push_back(make_z_check("single.ancestors.second_moment_0.5", summarize(data[kM2]),
                               ancestors_second_moment(p, r)));
    out.push_back(make_z_check("single.ancestors.laplace_1_0.5", summarize(data[kMLap]),
                               ancestors_laplace(p, 1.0, r)));
    out.push_back(make_z_check("single.ancestors.graft_0.5", summarize(data[kGraft]), graft_identity(p, r)));
    out.push_back(make_z_check("single.tmrca.cdf_0.5", summarize(data[kGraft]), tmrca_cdf(p, r)));
    out.push_back(make_z_check("single.tmrca.mean", summarize(data[kTmrca]), tmrca_mean(p)));
    out.push_back(make_z_check("single.length.mean_0.1", summarize(data[kLen]), length_mean(p, 0.1)));
    out.push_back(make_z_check("single.compensated.mean", summarize(data[kComp]), 0.0));
    out.push_back(make_z_check("single.compensated.increment_0.1_1", summarize(data[kInc]),
                               compensated_increment_second_moment(p, 0.1, 1.0)));
    out.push_back(make_z_check("single.ancestors.slope_eps", regression_slope(data[kZ], data[kMeps]), c_eps));
    out.push_back(make_z_check("single.ancestors.poisson_residual", summarize(data[kResid]),
                               pop_mean(p) / c_eps));
    append(rep, std::move(out), ms_since(t0));
  }

  {
    const auto t0 = Clock::now();
    const double eps_w = 1e-4;
    const double a = p.rate();
    const double phi_q = phi(0.25);
    enum { kW, kW2, kLapQ, kLap4, kCond, kCount };
    auto data = parallel_map_multi(n, kCount, RandomStream(o.seed, 2),
                                   [&](std::int64_t, RandomStream& rng, std::span<double> row) {
      thread_local LineageSample s;
      sample_lineage_given(p, rng, eps_w, sample_z0(p, rng), s);
      const double w = w0_estimate(p, s);
      row[kW] = w;
      row[kW2] = w * w;
      row[kLapQ] = std::exp(-a * 0.25 * w);
      row[kLap4] = std::exp(-a * 0.4 * w);
      row[kCond] = row[kLapQ] - std::exp(-2.0 * p.theta() * s.z0 * phi_q);
    });
    std::vector<CheckResult> out;
    out.push_back(make_z_check("single.w0.mean", summarize(data[kW]), 0.0));
    out.push_back(make_z_check("single.w0.second_moment", summarize(data[kW2]), w_second_moment(p)));
    out.push_back(make_z_check("single.w0.second_moment_truncated", summarize(data[kW2]),
                               compensated_second_moment(p, eps_w)));
    out.push_back(make_z_check("single.w0.laplace_0.25", summarize(data[kLapQ]), w_laplace(p, 0.25)));
    out.push_back(make_z_check("single.w0.laplace_0.4", summarize(data[kLap4]), w_laplace(p, 0.4)));
    out.push_back(make_z_check("single.w0.conditional_0.25", summarize(data[kCond]), 0.0));
    append(rep, std::move(out), ms_since(t0));
  }

  {
    const auto t0 = Clock::now();
    const double v = 0.5, q = 0.5, s = 0.5, vp = 0.25;
    const double cv = extinction_rate(p, v);
    enum { kMass, kLap, kMean, kRMean, kRLap1, kRLap2, kCount };
    auto data = parallel_map_multi(n, kCount, RandomStream(o.seed, 3),
                                   [&](std::int64_t, RandomStream& rng, std::span<double> row) {
      const SliceSample sl = excursion_slice_sample(p, rng, v, {q - vp, q, q + s});
      const double r_near = static_cast<double>(sl.counts[0]);
      const double r_q = static_cast<double>(sl.counts[1]);
      const double extinct = sl.counts[2] == 0 ? 1.0 : 0.0;
      row[kMass] = sl.mass;
      row[kLap] = cv * -std::expm1(-kLn2 * r_q);
      row[kMean] = cv * r_q;
      row[kRMean] = cv * r_q * extinct;
      row[kRLap1] = cv * -std::expm1(-kLn2 * r_q) * extinct;
      row[kRLap2] = cv * -std::expm1(-kLn2 * (r_q + r_near)) * extinct;
    });
    std::vector<CheckResult> out;
    out.push_back(make_z_check("slice.mass_mean", summarize(data[kMass]), excursion_mean(p, v) / cv));
    out.push_back(make_z_check("slice.laplace", summarize(data[kLap]), slice_laplace(p, kLn2, v, q)));
    out.push_back(make_z_check("slice.mean", summarize(data[kMean]), slice_mean(p, v, q)));
    out.push_back(make_z_check("slice.restricted_mean", summarize(data[kRMean]), restricted_mean(p, v, q, s)));
    out.push_back(make_z_check("slice.restricted_laplace_1", summarize(data[kRLap1]),
                               restricted_laplace_1(p, kLn2, v, q, s)));
    out.push_back(make_z_check("slice.restricted_laplace_2", summarize(data[kRLap2]),
                               restricted_laplace_2(p, kLn2, kLn2, v, q, s, vp)));
    append(rep, std::move(out), ms_since(t0));
  }
  return rep;
}

// -------------------------------------------------------------- two-time

SuiteReport two_time_suite(const SuiteOptions& o) {
  const ModelParams& p = o.params;
  const std::int64_t n = samples_or(o, 100000);
  const double t = 0.5, r = 1.0, mu = kLn2, lambda = kLn2;
  SuiteReport rep;
  const auto t0 = Clock::now();
  using namespace kernel;
  enum { kNear, kFar, kLap, kCross, kCount };
  auto backward = parallel_map_multi(n, kCount, RandomStream(o.seed, 4),
                                     [&](std::int64_t, RandomStream& rng, std::span<double> row) {
    thread_local LineageSample s;
    sample_lineage_given(p, rng, t, sample_z0(p, rng), s);
    const double near = static_cast<double>(s.ancestors_at(t));
    const double far = static_cast<double>(s.ancestors_at(r));
    row[kNear] = near;
    row[kFar] = far;
    row[kLap] = std::exp(-mu * near - lambda * far);
    row[kCross] = near * far;
  });
  auto forward = parallel_map_multi(n, kCount, RandomStream(o.seed, 5),
                                    [&](std::int64_t, RandomStream& rng, std::span<double> row) {
    const ForwardChain ch = forward_thinning_chain(p, rng, {t, r});
    const double near = static_cast<double>(ch.counts[0]);
    const double far = static_cast<double>(ch.counts[1]);
    row[kNear] = near;
    row[kFar] = far;
    row[kLap] = std::exp(-mu * near - lambda * far);
    row[kCross] = near * far;
  });
  std::vector<CheckResult> out;
  const double joint = joint_forward_laplace(p, mu, lambda, t, r);
  const MCEstimate lap_b = summarize(backward[kLap]);
  const MCEstimate lap_f = summarize(forward[kLap]);
  out.push_back(make_z_check("two_time.joint_laplace.backward", lap_b, joint));
  out.push_back(make_z_check("two_time.joint_laplace.forward", lap_f, joint));
  out.push_back(make_z_check("two_time.joint_laplace.agreement", difference(lap_b, lap_f), 0.0));
  out.push_back(make_z_check("two_time.cross_moment", summarize(backward[kCross]), cross_moment(p, t, r)));
  out.push_back(make_z_check("two_time.cross_moment.forward", summarize(forward[kCross]),
                             cross_moment(p, t, r)));
  out.push_back(make_ks_check("two_time.ks.level_0.5", ks_two_sample(backward[kNear], forward[kNear])));
  out.push_back(make_ks_check("two_time.ks.level_1", ks_two_sample(backward[kFar], forward[kFar])));

  std::map<std::int64_t, std::vector<double>> bins;
  for (std::size_t i = 0; i < backward[kNear].size(); ++i)
    bins[static_cast<std::int64_t>(backward[kFar][i])].push_back(backward[kNear][i]);
  for (const auto& [m, values] : bins) {
    if (values.size() < 500) continue;
    out.push_back(make_z_check("two_time.cond_mean.m=" + std::to_string(m), summarize(values),
                               cond_mean(p, t, r, static_cast<double>(m))));
  }
  append(rep, std::move(out), ms_since(t0));
  return rep;
}

// ----------------------------------------------------------------- paths

SuiteReport paths_suite(const SuiteOptions& o) {
  const ModelParams& p = o.params;
  const std::int64_t n = samples_or(o, 10000);
  SuiteReport rep;
  using namespace kernel;
  {
    const auto t0 = Clock::now();
    PathValidationConfig cfg;
    cfg.grid = {0.5, 1.0};
    cfg.replicates = n;
    cfg.eps = o.eps;
    auto checks = cross_validate_paths(p, o.seed, cfg);
    append(rep, std::move(checks), ms_since(t0));
  }
  {
    const auto t0 = Clock::now();
    enum { kMart1, kMart05, kM2_05, kM2_1, kLap05, kLap1, kCount };
    PathSimConfig cfg;
    cfg.horizon = 6.0;
    cfg.eps_stop = o.eps;
    auto data = parallel_map_multi(n, kCount, RandomStream(o.seed, 6),
                                   [&](std::int64_t, RandomStream& rng, std::span<double> row) {
      const StepPath path = simulate_birth_path(p, rng, cfg);
      const double start = static_cast<double>(path.values.front());
      for (auto [idx, time] : {std::pair{kMart1, -1.0}, std::pair{kMart05, -0.5}})
        row[idx] = static_cast<double>(path.value_at(time)) - start - birth_compensator(p, path, time);
      const double m05 = static_cast<double>(path.value_at(-0.5));
      const double m1 = static_cast<double>(path.value_at(-1.0));
      row[kM2_05] = m05 * m05;
      row[kM2_1] = m1 * m1;
      row[kLap05] = std::exp(-m05);
      row[kLap1] = std::exp(-m1);
    });
    PathSimConfig long_cfg = cfg;
    long_cfg.horizon = 10.0;
    auto longer = parallel_map(n, RandomStream(o.seed, 7), [&](std::int64_t, RandomStream& rng) {
      return static_cast<double>(simulate_birth_path(p, rng, long_cfg).value_at(-0.5));
    });
    auto shorter = parallel_map(n, RandomStream(o.seed, 8), [&](std::int64_t, RandomStream& rng) {
      return static_cast<double>(simulate_birth_path(p, rng, cfg).value_at(-0.5));
    });
    std::vector<CheckResult> out;
    out.push_back(make_z_check("paths.martingale.t=-1", summarize(data[kMart1]), 0.0));
    out.push_back(make_z_check("paths.martingale.t=-0.5", summarize(data[kMart05]), 0.0));
    out.push_back(make_z_check("paths.birth.second_moment.r=0.5", summarize(data[kM2_05]),
                               ancestors_second_moment(p, 0.5)));
    out.push_back(make_z_check("paths.birth.second_moment.r=1", summarize(data[kM2_1]),
                               ancestors_second_moment(p, 1.0)));
    out.push_back(make_z_check("paths.birth.laplace.r=0.5", summarize(data[kLap05]),
                               ancestors_laplace(p, 1.0, 0.5)));
    out.push_back(make_z_check("paths.birth.laplace.r=1", summarize(data[kLap1]),
                               ancestors_laplace(p, 1.0, 1.0)));
    out.push_back(make_ks_check("paths.ks.horizon_6_vs_10.r=0.5", ks_two_sample(shorter, longer)));
    append(rep, std::move(out), ms_since(t0));
  }
  {
    const auto t0 = Clock::now();
    enum { kM2_05, kM2_1, kLap05, kLap1, kCount };
    auto data = parallel_map_multi(n, kCount, RandomStream(o.seed, 9),
                                   [&](std::int64_t, RandomStream& rng, std::span<double> row) {
      const StepPath path = simulate_death_path(p, rng, o.eps, 1.5);
      const double m05 = static_cast<double>(path.value_at(0.5));
      const double m1 = static_cast<double>(path.value_at(1.0));
      row[kM2_05] = m05 * m05;
      row[kM2_1] = m1 * m1;
      row[kLap05] = std::exp(-m05);
      row[kLap1] = std::exp(-m1);
    });
    std::vector<CheckResult> out;
    out.push_back(make_z_check("paths.death.second_moment.r=0.5", summarize(data[kM2_05]),
                               ancestors_second_moment(p, 0.5)));
    out.push_back(make_z_check("paths.death.second_moment.r=1", summarize(data[kM2_1]),
                               ancestors_second_moment(p, 1.0)));
    out.push_back(make_z_check("paths.death.laplace.r=0.5", summarize(data[kLap05]),
                               ancestors_laplace(p, 1.0, 0.5)));
    out.push_back(make_z_check("paths.death.laplace.r=1", summarize(data[kLap1]),
                               ancestors_laplace(p, 1.0, 1.0)));
    append(rep, std::move(out), ms_since(t0));
  }
  return rep;
}

// ----------------------------------------------------------- fluctuation

SuiteReport fluctuation_suite(const SuiteOptions& o) {
  const ModelParams& p = o.params;
  const std::int64_t n = samples_or(o, 10000);
  const double eps = 0.01, eps_ref = 1e-5;
  SuiteReport rep;
  const auto t0 = Clock::now();
  auto pairs = parallel_map(n, RandomStream(o.seed, 10), [&](std::int64_t, RandomStream& rng) {
    return fluctuation_pair(p, rng, eps, eps_ref);
  });
  auto direct = parallel_map(n, RandomStream(o.seed, 11), [&](std::int64_t, RandomStream& rng) {
    const double z = sample_z0(p, rng);
    std::normal_distribution<double> g;
    return std::sqrt(2.0 * z) * g(rng);
  });
  std::vector<double> squares(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) squares[i] = pairs[i] * pairs[i];
  const MCEstimate sq = summarize(squares);
  std::vector<CheckResult> out;
  out.push_back(make_z_check("fluctuation.mean", summarize(pairs), 0.0));
  out.push_back(make_rel_check("fluctuation.variance_limit", sq, 2.0 * kernel::pop_mean(p), 0.10));
  out.push_back(make_z_check("fluctuation.variance_exact", sq,
                             p.beta() / eps * kernel::compensated_increment_second_moment(p, eps_ref, eps)));
  out.push_back(make_ks_check("fluctuation.ks_limit", ks_two_sample(pairs, direct)));
  append(rep, std::move(out), ms_since(t0));
  return rep;
}

// -------------------------------------------------------------- particle

struct ParticleSeries {
  std::vector<double> z, m05, m08, m1, length;
};

// Observations every dt after burn-in for `steps` windows.
ParticleSeries run_skeleton(const ParticleConfig& cfg, RandomStream rng, std::int64_t steps,
                            double eps) {
  SkeletonParticleSystem sys(cfg, rng);
  sys.advance_to(cfg.burn_in);
  const ObservationSpec spec{{0.5, 0.8, 1.0}, {eps}};
  TreeSnapshot snap;
  ParticleSeries out;
  const double n = static_cast<double>(cfg.n);
  for (std::int64_t k = 0; k < steps; ++k) {
    sys.step();
    sys.observe(spec, snap);
    out.z.push_back(static_cast<double>(snap.population) / n);
    out.m05.push_back(static_cast<double>(snap.ancestors[0]));
    out.m08.push_back(static_cast<double>(snap.ancestors[1]));
    out.m1.push_back(static_cast<double>(snap.ancestors[2]));
    out.length.push_back(compensated_from_snapshot(cfg.params, cfg.n, snap, 0, eps));
  }
  return out;
}

// x[i] * y[i + lag] within one replicate.
std::vector<double> lagged_product(const std::vector<double>& x, const std::vector<double>& y,
                                   std::size_t lag) {
  std::vector<double> out;
  for (std::size_t i = 0; i + lag < x.size(); ++i) out.push_back(x[i] * y[i + lag]);
  return out;
}

// Pools per-replicate batch means into one estimate.
MCEstimate pooled_batches(const std::vector<std::vector<double>>& series, std::size_t batches_each) {
  std::vector<double> means;
  for (const auto& s : series) {
    const std::size_t len = s.size() / batches_each;
    for (std::size_t b = 0; b < batches_each; ++b) {
      double sum = 0.0;
      for (std::size_t i = b * len; i < (b + 1) * len; ++i) sum += s[i];
      means.push_back(sum / static_cast<double>(len));
    }
  }
  return summarize(means);
}

SuiteReport particle_suite(const SuiteOptions& o) {
  const ModelParams& p = o.params;
  ParticleConfig cfg;
  cfg.params = p;
  cfg.n = o.particles;
  cfg.burn_in = o.burn_in.value_or(10.0 / p.rate());
  cfg.horizon = o.horizon;
  cfg.validate();
  SuiteReport rep;
  using namespace kernel;

  const double dt = 0.1;
  const double eps = 0.01;
  const int replicates = 4;
  const auto steps = static_cast<std::int64_t>(std::llround(cfg.horizon / replicates / dt));
  if (steps < 1000) throw ConfigError("particle suite: horizon too short for batch means");
  const std::size_t batches = 25;
  {
    const auto t0 = Clock::now();
    std::vector<ParticleSeries> runs(replicates);
    parallel_map(replicates, RandomStream(o.seed, 12), [&](std::int64_t i, RandomStream& rng) {
      runs[static_cast<std::size_t>(i)] = run_skeleton(cfg, rng, steps, eps);
      return 0.0;
    });
    auto pool = [&](auto pick) {
      std::vector<std::vector<double>> v;
      for (const auto& run : runs) v.push_back(pick(run));
      return pooled_batches(v, batches);
    };
    const auto lag05 = static_cast<std::size_t>(std::llround(0.5 / dt));
    const auto lag03 = static_cast<std::size_t>(std::llround(0.3 / dt));
    std::vector<CheckResult> out;
    out.push_back(make_rel_check("particle.mean", pool([](const ParticleSeries& s) { return s.z; }),
                                 pop_mean(p), 0.05));
    out.push_back(make_rel_check("particle.second_moment", pool([](const ParticleSeries& s) {
                                   std::vector<double> v;
                                   for (double z : s.z) v.push_back(z * z);
                                   return v;
                                 }), pop_second_moment(p), 0.10));
    out.push_back(make_rel_check("particle.autocov_0.5", pool([&](const ParticleSeries& s) {
                                   return lagged_product(s.z, s.z, lag05);
                                 }), pop_autocovariance_raw(p, 0.5), 0.10));
    {
      std::vector<std::vector<double>> first, second;
      for (const auto& run : runs) {
        const std::size_t half = run.z.size() / 2;
        first.emplace_back(run.z.begin(), run.z.begin() + static_cast<std::ptrdiff_t>(half));
        second.emplace_back(run.z.begin() + static_cast<std::ptrdiff_t>(half), run.z.end());
      }
      out.push_back(make_z_check("particle.stationarity_halves",
                                 difference(pooled_batches(first, batches), pooled_batches(second, batches)),
                                 0.0));
    }
    out.push_back(make_rel_check("particle.ancestors_mean_0.5",
                                 pool([](const ParticleSeries& s) { return s.m05; }),
                                 ancestors_mean(p, 0.5), 0.10));
    out.push_back(make_rel_check("particle.two_time_r1_s0.3_q0.8", pool([&](const ParticleSeries& s) {
                                   return lagged_product(s.m1, s.m08, lag03);
                                 }), two_time_cross_moment(p, 1.0, 0.3, 0.8), 0.10));
    out.push_back(make_rel_check("particle.length_variance", pool([](const ParticleSeries& s) {
                                   std::vector<double> v;
                                   for (double l : s.length) v.push_back(l * l);
                                   return v;
                                 }), compensated_second_moment(p, eps), 0.15));
    {
      const MCEstimate cov = pool([&](const ParticleSeries& s) {
        return lagged_product(s.length, s.length, lag05);
      });
      out.push_back(make_abs_check("particle.length_cov_0.5", cov.mean, w_covariance(p, 0.5), 0.05, &cov));
    }

    // Snapshots two time units apart against exact lineage draws.
    const auto spacing = static_cast<std::size_t>(std::llround(2.0 / dt));
    std::vector<double> sub05, sub1;
    for (const auto& run : runs)
      for (std::size_t i = 0; i < run.z.size(); i += spacing) {
        sub05.push_back(run.m05[i]);
        sub1.push_back(run.m1[i]);
      }
    auto exact = parallel_map_multi(static_cast<std::int64_t>(sub05.size()), 2, RandomStream(o.seed, 13),
                                    [&](std::int64_t, RandomStream& rng, std::span<double> row) {
      const ForwardChain ch = forward_thinning_chain(p, rng, {0.5, 1.0});
      row[0] = static_cast<double>(ch.counts[0]);
      row[1] = static_cast<double>(ch.counts[1]);
    });
    out.push_back(make_ks_check("particle.ks.ancestors_0.5", ks_two_sample(sub05, exact[0])));
    out.push_back(make_ks_check("particle.ks.ancestors_1", ks_two_sample(sub1, exact[1])));
    append(rep, std::move(out), ms_since(t0));
  }
  {
    // The skeleton engine against the event-driven engine at the size floor.
    const auto t0 = Clock::now();
    ParticleConfig small = cfg;
    small.n = 100;
    const ObservationSpec spec{{0.5, 1.0}, {0.05}};
    const int samples = 600;
    const double gap = 2.0;
    std::vector<double> ev_n, ev_m, ev_l, sk_n, sk_m, sk_l;
    {
      EventParticleSystem ev(small, RandomStream(o.seed, 14), false);
      TreeSnapshot snap;
      for (int k = 0; k < samples; ++k) {
        ev.advance_to(small.burn_in + gap * k);
        ev.observe(spec, snap);
        ev_n.push_back(static_cast<double>(snap.population));
        ev_m.push_back(static_cast<double>(snap.ancestors[0]));
        ev_l.push_back(compensated_from_snapshot(p, small.n, snap, 0, 0.05));
      }
    }
    {
      SkeletonParticleSystem sk(small, RandomStream(o.seed, 15), dt);
      TreeSnapshot snap;
      for (int k = 0; k < samples; ++k) {
        sk.advance_to(small.burn_in + gap * k);
        sk.observe(spec, snap);
        sk_n.push_back(static_cast<double>(snap.population));
        sk_m.push_back(static_cast<double>(snap.ancestors[0]));
        sk_l.push_back(compensated_from_snapshot(p, small.n, snap, 0, 0.05));
      }
    }
    std::vector<CheckResult> out;
    out.push_back(make_ks_check("particle.engines.ks.population", ks_two_sample(ev_n, sk_n)));
    out.push_back(make_ks_check("particle.engines.ks.ancestors_0.5", ks_two_sample(ev_m, sk_m)));
    out.push_back(make_ks_check("particle.engines.ks.length", ks_two_sample(ev_l, sk_l)));
    append(rep, std::move(out), ms_since(t0));
  }
  return rep;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"kernel", "single-time", "two-time",
                                              "paths", "fluctuation", "particle"};
  return names;
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& opts) {
  SuiteReport rep;
  if (name == "kernel") rep = kernel_suite(opts);
  else if (name == "single-time") rep = single_time_suite(opts);
  else if (name == "two-time") rep = two_time_suite(opts);
  else if (name == "paths") rep = paths_suite(opts);
  else if (name == "fluctuation") rep = fluctuation_suite(opts);
  else if (name == "particle") rep = particle_suite(opts);
  else throw ConfigError("unknown suite '" + name + "'");
  rep.suite = name;
  rep.seed = opts.seed;
  rep.params = opts.params;
  finalize(rep);
  return rep;
}

}  // namespace cbgen
