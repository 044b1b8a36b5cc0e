#include "cbgen/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cbgen/kernel.hpp"

namespace cbgen {

namespace {

void require(bool ok, const char* quantity, double arg, const char* reason) {
  if (!ok) throw DomainError(quantity, arg, reason);
}

void require_increasing(const std::vector<double>& xs, const char* quantity) {
  require(!xs.empty(), quantity, 0.0, "requires at least one level");
  require(xs.front() > 0.0, quantity, xs.front(), "requires positive levels");
  for (std::size_t i = 1; i < xs.size(); ++i)
    require(xs[i] > xs[i - 1], quantity, xs[i], "requires strictly increasing levels");
}

// Calls f(zeta) for each point of the Poisson measure z0 |c'(zeta)| d zeta on
// (eps, inf), in decreasing order of zeta. Under y = c(zeta) the points form a
// homogeneous Poisson process of rate z0 on (0, c(eps)).
template <class F>
void for_each_lifetime(const ModelParams& p, RandomStream& rng, double eps, double z0, F&& f) {
  if (z0 <= 0.0) return;
  const double ceiling = kernel::extinction_rate(p, eps);
  const double two_theta = 2.0 * p.theta();
  const double inv_rate = 1.0 / p.rate();
  const double step = 1.0 / z0;
  double y = 0.0;
  for (;;) {
    y += rng.exponential() * step;
    if (y >= ceiling) break;
    const double zeta = std::log1p(two_theta / y) * inv_rate;
    if (zeta > eps) f(zeta);
  }
}

}  // namespace

std::int64_t LineageSample::ancestors_at(double r) const {
  require(r >= epsilon, "ancestors_at", r, "requires r >= epsilon");
  // lifetimes is decreasing: count the prefix with zeta > r.
  auto it = std::partition_point(lifetimes.begin(), lifetimes.end(),
                                 [r](double z) { return z > r; });
  return it - lifetimes.begin();
}

std::int64_t StepPath::value_at(double x) const {
  require(!breakpoints.empty() && x >= breakpoints.front(), "value_at", x,
          "lies before the start of the path");
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

std::int64_t poisson(RandomStream& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

std::int64_t binomial(RandomStream& rng, std::int64_t n, double prob) {
  if (n <= 0 || prob <= 0.0) return 0;
  if (prob >= 1.0) return n;
  return std::binomial_distribution<std::int64_t>(n, prob)(rng);
}

double sample_z0(const ModelParams& p, RandomStream& rng) {
  return (rng.exponential() + rng.exponential()) / (2.0 * p.theta());
}

void sample_lineage_given(const ModelParams& p, RandomStream& rng, double eps, double z0,
                          LineageSample& out) {
  require(eps > 0.0, "sample_lineage", eps, "requires eps > 0");
  require(z0 >= 0.0, "sample_lineage", z0, "requires z0 >= 0");
  out.z0 = z0;
  out.epsilon = eps;
  out.lifetimes.clear();
  for_each_lifetime(p, rng, eps, z0, [&](double zeta) { out.lifetimes.push_back(zeta); });
}

LineageSample sample_lineage(const ModelParams& p, RandomStream& rng, double eps) {
  LineageSample out;
  const double z0 = sample_z0(p, rng);
  sample_lineage_given(p, rng, eps, z0, out);
  return out;
}

StepPath ancestor_path(const LineageSample& sample) {
  StepPath path;
  path.direction = PathDirection::kBackwardAncestors;
  const auto n = static_cast<std::int64_t>(sample.lifetimes.size());
  path.breakpoints.reserve(sample.lifetimes.size() + 1);
  path.values.reserve(sample.lifetimes.size() + 1);
  path.breakpoints.push_back(sample.epsilon);
  path.values.push_back(n);
  for (std::int64_t k = n - 1; k >= 0; --k) {
    path.breakpoints.push_back(sample.lifetimes[static_cast<std::size_t>(k)]);
    path.values.push_back(k);
  }
  return path;
}

double tree_length(const LineageSample& sample, double eta) {
  require(eta >= sample.epsilon, "tree_length", eta, "requires eta >= epsilon");
  double total = 0.0;
  for (double z : sample.lifetimes) {
    if (z <= eta) break;
    total += z - eta;
  }
  return total;
}

double compensated_length(const ModelParams& p, const LineageSample& sample, double eta) {
  require(eta >= sample.epsilon, "compensated_length", eta, "requires eta >= epsilon");
  return tree_length(sample, eta) +
         sample.z0 / p.beta() * std::log(-std::expm1(-p.rate() * eta));
}

double w0_estimate(const ModelParams& p, const LineageSample& sample) {
  return compensated_length(p, sample, sample.epsilon);
}

ForwardChain forward_thinning_chain(const ModelParams& p, RandomStream& rng,
                                    const std::vector<double>& levels) {
  require_increasing(levels, "forward_thinning_chain");
  ForwardChain chain;
  chain.z0 = sample_z0(p, rng);
  double prev_c = kernel::extinction_rate(p, levels.front());
  std::int64_t count = poisson(rng, prev_c * chain.z0);
  chain.counts.push_back(count);
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const double c = kernel::extinction_rate(p, levels[k]);
    count = binomial(rng, count, c / prev_c);
    chain.counts.push_back(count);
    prev_c = c;
  }
  return chain;
}

SliceSample excursion_slice_sample(const ModelParams& p, RandomStream& rng, double v,
                                   const std::vector<double>& horizons) {
  require(v > 0.0, "excursion_slice_sample", v, "requires v > 0");
  require_increasing(horizons, "excursion_slice_sample");
  SliceSample out;
  // Given zeta > v, Y_v is exponential with mean (1 - e^{-a v}) / (2 theta).
  out.mass = rng.exponential() * -std::expm1(-p.rate() * v) / (2.0 * p.theta());
  double prev_c = kernel::extinction_rate(p, horizons.front());
  std::int64_t count = poisson(rng, prev_c * out.mass);
  out.counts.push_back(count);
  for (std::size_t k = 1; k < horizons.size(); ++k) {
    const double c = kernel::extinction_rate(p, horizons[k]);
    count = binomial(rng, count, c / prev_c);
    out.counts.push_back(count);
    prev_c = c;
  }
  return out;
}

double fluctuation_pair(const ModelParams& p, RandomStream& rng, double eps, double eps_ref) {
  require(eps > 0.0, "fluctuation_pair", eps, "requires eps > 0");
  require(eps_ref > 0.0 && eps_ref <= eps, "fluctuation_pair", eps_ref,
          "requires 0 < eps_ref <= eps");
  if (eps_ref == eps) return 0.0;
  const double z0 = sample_z0(p, rng);
  double len_eps = 0.0;
  double len_ref = 0.0;
  for_each_lifetime(p, rng, eps_ref, z0, [&](double zeta) {
    len_ref += zeta - eps_ref;
    if (zeta > eps) len_eps += zeta - eps;
  });
  const double comp = z0 / p.beta() *
                      (std::log(-std::expm1(-p.rate() * eps)) -
                       std::log(-std::expm1(-p.rate() * eps_ref)));
  return std::sqrt(p.beta() / eps) * (len_eps - len_ref + comp);
}

}  // namespace cbgen
