#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbgen/params.hpp"
#include "cbgen/report.hpp"

namespace cbgen {

struct SuiteOptions {
  ModelParams params;
  std::uint64_t seed = 42;
  // Replicate count; each suite has its own default when unset.
  std::optional<std::int64_t> samples;
  double eps = 1e-3;
  // Particle suite.
  std::int64_t particles = 2000;
  std::optional<double> burn_in;  // default 10 / (2 beta theta)
  double horizon = 20000.0;       // total post-burn-in time over all replicates
};

const std::vector<std::string>& suite_names();

// Throws ConfigError for an unknown suite or an invalid particle setup.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opts);

}  // namespace cbgen
