#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "cbgen/forest.hpp"
#include "cbgen/params.hpp"
#include "cbgen/random.hpp"

namespace cbgen {

// Discrete population with mass 1/n per particle: each particle splits at
// rate beta n and dies at rate beta n + 2 beta theta, and new particles
// branch off the immortal line at rate 2 beta n. N/n converges to the
// stationary population.
struct ParticleConfig {
  ModelParams params;
  std::int64_t n = 100;
  double burn_in = 5.0;
  double horizon = 5.0;
  std::int64_t event_cap = 200'000'000;
  std::int64_t initial_count = 0;
  bool immigration = true;

  // Throws ConfigError; n >= 100 and burn_in >= 10 / (2 beta theta) unless
  // `allow_small` (used for single-family checks).
  void validate(bool allow_small = false) const;
};

struct GenealogyRecord {
  std::int64_t particle_id = 0;
  std::int64_t parent_id = -1;  // -1 for the immortal line
  double birth_time = 0.0;
  std::optional<double> death_time;  // empty while alive
};

// All particles since time 0 in birth order. Times are absolute; the
// analysis window is [window_start, window_end].
struct GenealogyLog {
  ParticleConfig config;
  double window_start = 0.0;
  double window_end = 0.0;
  std::int64_t events = 0;
  std::vector<GenealogyRecord> records;
};

// Event-driven engine: one aggregate exponential clock over all particles and
// the immigration source.
class EventParticleSystem {
 public:
  EventParticleSystem(const ParticleConfig& cfg, RandomStream rng, bool keep_log);

  // Runs to time t; the state at t is exact because the clock is memoryless.
  void advance_to(double t);
  double time() const { return t_; }
  std::int64_t population() const { return static_cast<std::int64_t>(alive_.size()); }
  std::int64_t events() const { return events_; }
  void observe(const ObservationSpec& spec, TreeSnapshot& out);

  // Requires keep_log.
  GenealogyLog take_log();
  // Particles with a descendant alive now, ids local to the returned log.
  GenealogyLog ancestral_log() const;

 private:
  void add_particle(std::int32_t parent);
  void kill(std::size_t index);

  ParticleConfig cfg_;
  RandomStream rng_;
  bool keep_log_;
  double t_ = 0.0;
  std::int64_t events_ = 0;
  LineageForest forest_;
  std::vector<std::int32_t> alive_;
  std::vector<std::int32_t> slot_;  // node -> index in alive_
  std::vector<double> death_;       // node -> death time, inf while alive
  std::vector<GenealogyRecord> records_;
};

// Exact engine on a time grid of spacing dt. Each particle's family over one
// window is a linear birth-death process: it survives with the closed-form
// probability, its survivor count is geometric, and the reconstructed tree of
// the survivors is a coalescent point process with explicit node-depth law.
// Surviving immigrant families arrive as an inhomogeneous Poisson process.
class SkeletonParticleSystem {
 public:
  SkeletonParticleSystem(const ParticleConfig& cfg, RandomStream rng, double dt = 0.1);

  void step();
  void advance_to(double t);
  double time() const { return t_; }
  double dt() const { return dt_; }
  std::int64_t population() const { return static_cast<std::int64_t>(alive_.size()); }
  void observe(const ObservationSpec& spec, TreeSnapshot& out);

  struct WindowLaws {
    double survival;    // P(family of one particle survives the window)
    double geometric;   // q with P(K = k) = (1 - q) q^{k-1}
    double immigrant_mean;  // mean number of surviving immigrant families
  };
  WindowLaws window_laws() const;

 private:
  // Node depths of a coalescent point process, conditioned below `horizon`.
  double sample_depth(double horizon);
  // Adds k leaves at time t_ + dt_; the first continues `root`.
  void grow_family(std::int32_t root, std::int64_t k, double horizon);

  ParticleConfig cfg_;
  RandomStream rng_;
  double dt_;
  double t_ = 0.0;
  double lambda_, mu_, r_;
  WindowLaws laws_;
  LineageForest forest_;
  std::vector<std::int32_t> alive_;
  std::vector<std::int32_t> next_;
  std::vector<std::pair<double, std::int32_t>> stack_;
};

// Runs the event engine for burn_in + horizon and returns the full log.
// Throws ResourceError when the event cap is reached.
GenealogyLog run_particle_system(const ParticleConfig& cfg, std::uint64_t seed);

// Summary of the population alive at tau, reconstructed from a log.
TreeSnapshot observe_log(const GenealogyLog& log, double tau, const ObservationSpec& spec);

// (M_{-r} of the population at tau0, M^{tau0+s}_{tau0+s-q}).
std::pair<std::int64_t, std::int64_t> two_time_ancestor_counts(const GenealogyLog& log,
                                                               double tau0, double s, double r,
                                                               double q);
// Compensated lengths below tau - eps at tau0 and tau0 + s, with N/n as Z.
std::pair<double, double> compensated_length_pair(const GenealogyLog& log, double tau0,
                                                  double s, double eps);

// Compensated length from a snapshot: L + (N / n) / beta * log(1 - e^{-a eps}).
double compensated_from_snapshot(const ModelParams& p, std::int64_t n, const TreeSnapshot& snap,
                                 std::size_t length_index, double eps);

}  // namespace cbgen
