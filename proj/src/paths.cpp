#include "cbgen/paths.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "cbgen/kernel.hpp"
#include "cbgen/stats.hpp"

namespace cbgen {

namespace {

double one_minus_exp(double x) { return -std::expm1(-x); }

std::string depth_tag(double r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace

StepPath simulate_birth_path(const ModelParams& p, RandomStream& rng, const PathSimConfig& cfg) {
  if (!(cfg.eps_stop > 0.0)) throw DomainError("simulate_birth_path", cfg.eps_stop, "requires eps_stop > 0");
  if (!(cfg.horizon > cfg.eps_stop))
    throw DomainError("simulate_birth_path", cfg.horizon, "requires horizon > eps_stop");
  if (cfg.init == PathInit::kFixedCount && cfg.fixed_count < 0)
    throw ConfigError("simulate_birth_path: fixed count must be nonnegative");

  const double a = p.rate();
  std::int64_t m = cfg.fixed_count;
  if (cfg.init == PathInit::kMarginal)
    m = poisson(rng, kernel::extinction_rate(p, cfg.horizon) * sample_z0(p, rng));

  StepPath path;
  path.direction = PathDirection::kCalendar;
  path.breakpoints.push_back(-cfg.horizon);
  path.values.push_back(m);
  // Integrated rate from depth r0 down to r1 is (m + 2) log(g(r0) / g(r1))
  // with g(r) = 1 - exp(-a r), so the next jump depth solves
  // g(r1) = g(r0) exp(-E / (m + 2)).
  double g = one_minus_exp(a * cfg.horizon);
  const double g_stop = one_minus_exp(a * cfg.eps_stop);
  for (;;) {
    g *= std::exp(-rng.exponential() / static_cast<double>(m + 2));
    if (g <= g_stop) break;
    const double r = -std::log1p(-g) / a;
    ++m;
    path.breakpoints.push_back(-r);
    path.values.push_back(m);
  }
  return path;
}

StepPath simulate_death_path(const ModelParams& p, RandomStream& rng, double eps_start,
                             double horizon) {
  if (!(eps_start > 0.0)) throw DomainError("simulate_death_path", eps_start, "requires eps_start > 0");
  if (!(horizon > eps_start))
    throw DomainError("simulate_death_path", horizon, "requires horizon > eps_start");
  const double z0 = sample_z0(p, rng);
  double c = kernel::extinction_rate(p, eps_start);
  std::int64_t m = poisson(rng, c * z0);

  StepPath path;
  path.direction = PathDirection::kBackwardAncestors;
  path.breakpoints.push_back(eps_start);
  path.values.push_back(m);
  // The integrated hazard beta * 2 theta * dr + beta * int c equals
  // log(c(r0) / c(r1)), so c at the next death is c(r0) exp(-E / m).
  while (m > 0) {
    c *= std::exp(-rng.exponential() / static_cast<double>(m));
    const double r = kernel::extinction_rate_inverse(p, c);
    if (r >= horizon) break;
    --m;
    path.breakpoints.push_back(r);
    path.values.push_back(m);
  }
  return path;
}

double birth_compensator(const ModelParams& p, const StepPath& path, double t) {
  if (path.direction != PathDirection::kCalendar || path.breakpoints.empty())
    throw ConfigError("birth_compensator: expects a calendar-time birth path");
  if (t < path.breakpoints.front())
    throw DomainError("birth_compensator", t, "lies before the start of the path");
  const double a = p.rate();
  double total = 0.0;
  for (std::size_t i = 0; i < path.breakpoints.size(); ++i) {
    const double lo = path.breakpoints[i];
    if (lo >= t) break;
    const double hi = (i + 1 < path.breakpoints.size()) ? std::min(path.breakpoints[i + 1], t) : t;
    const double g_lo = one_minus_exp(-a * lo);
    const double g_hi = one_minus_exp(-a * hi);
    total += static_cast<double>(path.values[i] + 2) * std::log(g_lo / g_hi);
  }
  return total;
}

std::vector<CheckResult> cross_validate_paths(const ModelParams& p, std::uint64_t seed,
                                              const PathValidationConfig& cfg) {
  if (cfg.grid.empty()) throw ConfigError("cross_validate_paths: empty grid");
  double max_depth = 0.0;
  for (double r : cfg.grid) {
    if (!(r >= cfg.eps)) throw DomainError("cross_validate_paths", r, "grid depth below eps");
    if (!(r < cfg.horizon)) throw DomainError("cross_validate_paths", r, "grid depth beyond horizon");
    max_depth = std::max(max_depth, r);
  }
  const auto k = cfg.grid.size();
  const auto start = std::chrono::steady_clock::now();

  const RandomStream lineage_base(seed, 101);
  const RandomStream birth_base(seed, 102);
  const RandomStream death_base(seed, 103);
  auto lineage = parallel_map_multi(cfg.replicates, k, lineage_base,
                                    [&](std::int64_t, RandomStream& rng, std::span<double> row) {
    LineageSample s = sample_lineage(p, rng, cfg.eps);
    for (std::size_t j = 0; j < k; ++j) row[j] = static_cast<double>(s.ancestors_at(cfg.grid[j]));
  });
  PathSimConfig bcfg;
  bcfg.horizon = cfg.horizon;
  bcfg.eps_stop = cfg.eps;
  auto birth = parallel_map_multi(cfg.replicates, k, birth_base,
                                  [&](std::int64_t, RandomStream& rng, std::span<double> row) {
    StepPath path = simulate_birth_path(p, rng, bcfg);
    for (std::size_t j = 0; j < k; ++j) row[j] = static_cast<double>(path.value_at(-cfg.grid[j]));
  });
  auto death = parallel_map_multi(cfg.replicates, k, death_base,
                                  [&](std::int64_t, RandomStream& rng, std::span<double> row) {
    StepPath path = simulate_death_path(p, rng, cfg.eps, max_depth * 1.5);
    for (std::size_t j = 0; j < k; ++j) row[j] = static_cast<double>(path.value_at(cfg.grid[j]));
  });
  const double elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::vector<CheckResult> out;
  for (std::size_t j = 0; j < k; ++j) {
    const std::string tag = depth_tag(cfg.grid[j]);
    const double mean = kernel::ancestors_mean(p, cfg.grid[j]);
    out.push_back(make_ks_check("paths.ks.lineage_vs_birth.r=" + tag,
                                ks_two_sample(lineage[j], birth[j]), cfg.ks_floor));
    out.push_back(make_ks_check("paths.ks.lineage_vs_death.r=" + tag,
                                ks_two_sample(lineage[j], death[j]), cfg.ks_floor));
    out.push_back(make_ks_check("paths.ks.birth_vs_death.r=" + tag,
                                ks_two_sample(birth[j], death[j]), cfg.ks_floor));
    out.push_back(make_z_check("paths.mean.lineage.r=" + tag, summarize(lineage[j]), mean,
                               cfg.z_threshold));
    out.push_back(make_z_check("paths.mean.birth.r=" + tag, summarize(birth[j]), mean,
                               cfg.z_threshold));
    out.push_back(make_z_check("paths.mean.death.r=" + tag, summarize(death[j]), mean,
                               cfg.z_threshold));
  }
  for (auto& c : out) c.runtime_ms = static_cast<std::int64_t>(elapsed / static_cast<double>(out.size()));
  return out;
}

}  // namespace cbgen
