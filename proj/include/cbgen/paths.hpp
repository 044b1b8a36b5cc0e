#pragma once

#include <cstdint>
#include <vector>

#include "cbgen/params.hpp"
#include "cbgen/random.hpp"
#include "cbgen/report.hpp"
#include "cbgen/samplers.hpp"

namespace cbgen {

enum class PathInit { kMarginal, kFixedCount };

struct PathSimConfig {
  double horizon = 6.0;    // start of the birth path at calendar time -horizon
  double eps_stop = 1e-3;  // last depth at which the path is observed
  PathInit init = PathInit::kMarginal;
  std::int64_t fixed_count = 0;
};

// Ancestor counts t -> M_t on [-horizon, -eps_stop] as a pure birth process of
// rate beta c(|t|) (M + 2). With marginal initialization M_{-horizon} is
// Poisson(c(horizon) Z0).
StepPath simulate_birth_path(const ModelParams& p, RandomStream& rng, const PathSimConfig& cfg);

// r -> M_{-r} on [eps_start, horizon] as a pure death process with
// per-individual rate beta (2 theta + c(r)), started from Poisson(c(eps_start) Z0).
StepPath simulate_death_path(const ModelParams& p, RandomStream& rng, double eps_start,
                             double horizon);

// int_{-horizon}^{t} beta c(|s|) (M_s + 2) ds along a birth path.
double birth_compensator(const ModelParams& p, const StepPath& path, double t);

struct PathValidationConfig {
  std::vector<double> grid{0.1, 0.5, 1.0, 2.0};  // depths
  std::int64_t replicates = 10000;
  double horizon = 6.0;
  double eps = 1e-3;
  double ks_floor = 1e-3;
  double z_threshold = 4.0;
};

// Marginal counts at each grid depth from the lineage sample, the birth path
// and the death path: pairwise KS tests and mean z-tests.
std::vector<CheckResult> cross_validate_paths(const ModelParams& p, std::uint64_t seed,
                                              const PathValidationConfig& cfg);

}  // namespace cbgen
