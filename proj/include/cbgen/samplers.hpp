#pragma once

#include <cstdint>
#include <vector>

#include "cbgen/params.hpp"
#include "cbgen/random.hpp"

namespace cbgen {

// Lifetimes of the excursions of the stationary population alive at time 0,
// truncated below at epsilon. Lifetime zeta is the depth at which the family
// of one ancestor branches off, so M_{-r} = #{zeta > r} for r >= epsilon.
struct LineageSample {
  double z0 = 0.0;
  double epsilon = 0.0;
  std::vector<double> lifetimes;  // strictly decreasing, each > epsilon

  std::int64_t ancestors_at(double r) const;
};

enum class PathDirection {
  kBackwardAncestors,  // argument is a depth r, values nonincreasing
  kForwardResidual,    // argument is an offset past a slice level, values nonincreasing
  kCalendar,           // argument is calendar time, values nondecreasing
};

// Right-continuous step function: values[i] holds on [breakpoints[i], breakpoints[i+1]).
struct StepPath {
  std::vector<double> breakpoints;
  std::vector<std::int64_t> values;
  PathDirection direction = PathDirection::kBackwardAncestors;

  std::int64_t value_at(double x) const;
};

struct ForwardChain {
  double z0 = 0.0;
  std::vector<std::int64_t> counts;
};

struct SliceSample {
  double mass = 0.0;  // Y_v, conditioned on the excursion reaching v
  std::vector<std::int64_t> counts;
};

// Z0 ~ Gamma(2, rate 2 theta).
double sample_z0(const ModelParams& p, RandomStream& rng);

LineageSample sample_lineage(const ModelParams& p, RandomStream& rng, double eps);
// Reuses the storage of `out`; z0 is given.
void sample_lineage_given(const ModelParams& p, RandomStream& rng, double eps, double z0,
                          LineageSample& out);

StepPath ancestor_path(const LineageSample& sample);
// L_eta = sum (zeta - eta)_+, eta >= epsilon.
double tree_length(const LineageSample& sample, double eta);
// L_eta + (z0 / beta) log(1 - exp(-a eta)).
double compensated_length(const ModelParams& p, const LineageSample& sample, double eta);
double w0_estimate(const ModelParams& p, const LineageSample& sample);

// Counts at increasing depths, first level Poisson(c(t1) Z0), then binomial
// thinning with ratios c(t_{k+1}) / c(t_k).
ForwardChain forward_thinning_chain(const ModelParams& p, RandomStream& rng,
                                    const std::vector<double>& levels);
// R_v^{h_k} for increasing horizons h_k under the excursion measure
// conditioned on zeta > v.
SliceSample excursion_slice_sample(const ModelParams& p, RandomStream& rng, double v,
                                   const std::vector<double>& horizons);

// sqrt(beta / eps) (L_eps - L_ref) for compensated lengths computed from one
// sample truncated at eps_ref. Returns 0 when eps_ref == eps.
double fluctuation_pair(const ModelParams& p, RandomStream& rng, double eps, double eps_ref);

// Binomial(n, prob) with n possibly large.
std::int64_t binomial(RandomStream& rng, std::int64_t n, double prob);
std::int64_t poisson(RandomStream& rng, double mean);

}  // namespace cbgen
