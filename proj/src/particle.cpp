#include "cbgen/particle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cbgen/samplers.hpp"

namespace cbgen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void ParticleConfig::validate(bool allow_small) const {
  if (!allow_small && n < 100)
    throw ConfigError("particle: n = " + std::to_string(n) + " is below the floor of 100");
  if (n < 1) throw ConfigError("particle: n must be positive");
  const double min_burn = 10.0 / params.rate();
  if (!allow_small && burn_in < min_burn)
    throw ConfigError("particle: burn_in must be at least " + std::to_string(min_burn));
  if (!(burn_in >= 0.0)) throw ConfigError("particle: burn_in must be nonnegative");
  if (!(horizon > 0.0)) throw ConfigError("particle: horizon must be positive");
  if (event_cap < 1) throw ConfigError("particle: event cap must be positive");
  if (initial_count < 0) throw ConfigError("particle: initial count must be nonnegative");
}

EventParticleSystem::EventParticleSystem(const ParticleConfig& cfg, RandomStream rng,
                                         bool keep_log)
    : cfg_(cfg), rng_(rng), keep_log_(keep_log), forest_(!keep_log) {
  for (std::int64_t i = 0; i < cfg_.initial_count; ++i) add_particle(-1);
}

void EventParticleSystem::add_particle(std::int32_t parent) {
  const std::int32_t node = forest_.add(t_, parent);
  const auto i = static_cast<std::size_t>(node);
  if (slot_.size() <= i) {
    slot_.resize(i + 1);
    death_.resize(i + 1);
  }
  slot_[i] = static_cast<std::int32_t>(alive_.size());
  death_[i] = kInf;
  alive_.push_back(node);
  if (keep_log_) records_.push_back({node, parent, t_, std::nullopt});
}

void EventParticleSystem::kill(std::size_t index) {
  const std::int32_t node = alive_[index];
  alive_[index] = alive_.back();
  slot_[static_cast<std::size_t>(alive_[index])] = static_cast<std::int32_t>(index);
  alive_.pop_back();
  death_[static_cast<std::size_t>(node)] = t_;
  if (keep_log_) records_[static_cast<std::size_t>(node)].death_time = t_;
  forest_.release(node);
}

void EventParticleSystem::advance_to(double t) {
  const double b = cfg_.params.beta();
  const double n = static_cast<double>(cfg_.n);
  const double split = b * n;
  const double die = b * n + cfg_.params.rate();
  const double per = split + die;
  const double split_share = split / per;
  const double immigration = cfg_.immigration ? 2.0 * b * n : 0.0;
  for (;;) {
    const double total = static_cast<double>(alive_.size()) * per + immigration;
    if (total <= 0.0) break;
    const double dt = rng_.exponential() / total;
    if (t_ + dt > t) break;
    t_ += dt;
    if (++events_ > cfg_.event_cap)
      throw ResourceError("particle: event cap of " + std::to_string(cfg_.event_cap) +
                          " reached at time " + std::to_string(t_));
    const double u = rng_.uniform() * total;
    if (u < immigration) {
      add_particle(-1);
      continue;
    }
    const double x = (u - immigration) / per;
    const auto idx = std::min(alive_.size() - 1, static_cast<std::size_t>(x));
    if (x - static_cast<double>(idx) < split_share)
      add_particle(alive_[idx]);
    else
      kill(idx);
  }
  t_ = std::max(t_, t);
}

void EventParticleSystem::observe(const ObservationSpec& spec, TreeSnapshot& out) {
  forest_.observe(alive_, t_, spec, out);
}

GenealogyLog EventParticleSystem::take_log() {
  if (!keep_log_) throw ConfigError("particle: log was not kept");
  GenealogyLog log;
  log.config = cfg_;
  log.window_start = cfg_.burn_in;
  log.window_end = cfg_.burn_in + cfg_.horizon;
  log.events = events_;
  log.records = std::move(records_);
  records_.clear();
  return log;
}

GenealogyLog EventParticleSystem::ancestral_log() const {
  std::vector<std::int32_t> marked(forest_.capacity(), -1);
  std::vector<std::int32_t> order;
  for (std::int32_t leaf : alive_) {
    std::int32_t node = leaf;
    while (node >= 0 && marked[static_cast<std::size_t>(node)] < 0) {
      marked[static_cast<std::size_t>(node)] = 0;
      order.push_back(node);
      node = forest_.parent(node);
    }
  }
  std::sort(order.begin(), order.end(), [this](std::int32_t a, std::int32_t b) {
    return forest_.start(a) < forest_.start(b) || (forest_.start(a) == forest_.start(b) && a < b);
  });
  GenealogyLog log;
  log.config = cfg_;
  log.window_start = cfg_.burn_in;
  log.window_end = cfg_.burn_in + cfg_.horizon;
  log.events = events_;
  for (std::size_t k = 0; k < order.size(); ++k)
    marked[static_cast<std::size_t>(order[k])] = static_cast<std::int32_t>(k);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::int32_t node = order[k];
    const std::int32_t up = forest_.parent(node);
    GenealogyRecord rec;
    rec.particle_id = static_cast<std::int64_t>(k);
    rec.parent_id = up < 0 ? -1 : marked[static_cast<std::size_t>(up)];
    rec.birth_time = forest_.start(node);
    const double d = death_[static_cast<std::size_t>(node)];
    if (std::isfinite(d)) rec.death_time = d;
    log.records.push_back(rec);
  }
  return log;
}

SkeletonParticleSystem::SkeletonParticleSystem(const ParticleConfig& cfg, RandomStream rng,
                                               double dt)
    : cfg_(cfg), rng_(rng), dt_(dt) {
  if (!(dt > 0.0)) throw ConfigError("particle: window must be positive");
  const double n = static_cast<double>(cfg_.n);
  lambda_ = cfg_.params.beta() * n;
  mu_ = lambda_ + cfg_.params.rate();
  r_ = cfg_.params.rate();
  const double decay = std::exp(-r_ * dt_);
  const double denom = mu_ - lambda_ * decay;
  laws_.survival = r_ * decay / denom;
  laws_.geometric = lambda_ * -std::expm1(-r_ * dt_) / denom;
  // Surviving immigrant families: intensity 2 beta n * P(survive u), which
  // integrates to (2 beta n / lambda) log W(dt), W(u) = (mu - lambda e^{-r u}) / r.
  laws_.immigrant_mean = cfg_.immigration ? 2.0 * std::log(denom / r_) : 0.0;
  for (std::int64_t i = 0; i < cfg_.initial_count; ++i) alive_.push_back(forest_.add(0.0, -1));
}

SkeletonParticleSystem::WindowLaws SkeletonParticleSystem::window_laws() const { return laws_; }

double SkeletonParticleSystem::sample_depth(double horizon) {
  // P(H <= t | H < h) = q(t) / q(h) with q(t) = lambda (1 - e^{-r t}) / (mu - lambda e^{-r t}).
  const double qh = lambda_ * -std::expm1(-r_ * horizon) / (mu_ - lambda_ * std::exp(-r_ * horizon));
  const double w = rng_.uniform() * qh;
  return -std::log1p(-w * r_ / (lambda_ * (1.0 - w))) / r_;
}

void SkeletonParticleSystem::grow_family(std::int32_t root, std::int64_t k, double horizon) {
  const double end = t_ + dt_;
  next_.push_back(root);
  stack_.clear();
  stack_.emplace_back(kInf, root);
  for (std::int64_t j = 1; j < k; ++j) {
    const double h = sample_depth(horizon);
    while (stack_.back().first <= h) stack_.pop_back();
    const std::int32_t leaf = forest_.add(end - h, stack_.back().second);
    next_.push_back(leaf);
    stack_.emplace_back(h, leaf);
  }
}

void SkeletonParticleSystem::step() {
  next_.clear();
  std::geometric_distribution<std::int64_t> extra(1.0 - laws_.geometric);
  for (std::int32_t node : alive_) {
    if (rng_.uniform() < laws_.survival)
      grow_family(node, 1 + extra(rng_), dt_);
    else
      forest_.release(node);
  }
  const std::int64_t families = poisson(rng_, laws_.immigrant_mean);
  const double log_w = laws_.immigrant_mean / 2.0;
  for (std::int64_t f = 0; f < families; ++f) {
    // W(u) = W(dt)^U inverts the cumulative intensity.
    const double u = -std::log1p(-r_ * std::expm1(rng_.uniform() * log_w) / lambda_) / r_;
    const double decay = std::exp(-r_ * u);
    const double q = lambda_ * -std::expm1(-r_ * u) / (mu_ - lambda_ * decay);
    const std::int64_t k = 1 + std::geometric_distribution<std::int64_t>(1.0 - q)(rng_);
    const std::int32_t root = forest_.add(t_ + dt_ - u, -1);
    grow_family(root, k, u);
  }
  alive_.swap(next_);
  t_ += dt_;
}

void SkeletonParticleSystem::advance_to(double t) {
  while (t_ + 0.5 * dt_ < t) step();
}

void SkeletonParticleSystem::observe(const ObservationSpec& spec, TreeSnapshot& out) {
  forest_.observe(alive_, t_, spec, out);
}

GenealogyLog run_particle_system(const ParticleConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  EventParticleSystem sys(cfg, RandomStream(seed, 0), true);
  sys.advance_to(cfg.burn_in + cfg.horizon);
  return sys.take_log();
}

TreeSnapshot observe_log(const GenealogyLog& log, double tau, const ObservationSpec& spec) {
  const std::size_t n = log.records.size();
  std::vector<double> start(n);
  std::vector<std::int32_t> parent(n);
  std::vector<std::int32_t> leaves;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = log.records[i];
    if (rec.particle_id != static_cast<std::int64_t>(i))
      throw ConfigError("particle: log ids must equal record positions");
    start[i] = rec.birth_time;
    parent[i] = static_cast<std::int32_t>(rec.parent_id);
    if (rec.birth_time <= tau && (!rec.death_time || *rec.death_time > tau))
      leaves.push_back(static_cast<std::int32_t>(i));
  }
  TreeSnapshot out;
  observe_genealogy(start, parent, leaves, tau, spec, out);
  return out;
}

namespace {

void require_window(const GenealogyLog& log, double from, double to, const char* what) {
  if (from < log.window_start - 1e-12)
    throw DomainError(what, from, "reaches before the post-burn-in window");
  if (to > log.window_end + 1e-12) throw DomainError(what, to, "reaches past the window end");
}

}  // namespace

std::pair<std::int64_t, std::int64_t> two_time_ancestor_counts(const GenealogyLog& log,
                                                               double tau0, double s, double r,
                                                               double q) {
  if (!(r > 0.0 && q > 0.0 && s >= 0.0))
    throw DomainError("two_time_ancestor_counts", s, "requires r, q > 0 and s >= 0");
  require_window(log, std::min(tau0 - r, tau0 + s - q), tau0 + s, "two_time_ancestor_counts");
  const TreeSnapshot a = observe_log(log, tau0, {{r}, {}});
  const TreeSnapshot b = observe_log(log, tau0 + s, {{q}, {}});
  return {a.ancestors[0], b.ancestors[0]};
}

std::pair<double, double> compensated_length_pair(const GenealogyLog& log, double tau0,
                                                  double s, double eps) {
  if (!(eps > 0.0 && s >= 0.0))
    throw DomainError("compensated_length_pair", eps, "requires eps > 0 and s >= 0");
  require_window(log, tau0, tau0 + s, "compensated_length_pair");
  const ObservationSpec spec{{}, {eps}};
  const TreeSnapshot a = observe_log(log, tau0, spec);
  const TreeSnapshot b = observe_log(log, tau0 + s, spec);
  const auto& p = log.config.params;
  return {compensated_from_snapshot(p, log.config.n, a, 0, eps),
          compensated_from_snapshot(p, log.config.n, b, 0, eps)};
}

double compensated_from_snapshot(const ModelParams& p, std::int64_t n, const TreeSnapshot& snap,
                                 std::size_t length_index, double eps) {
  const double z = static_cast<double>(snap.population) / static_cast<double>(n);
  return snap.lengths.at(length_index) + z / p.beta() * std::log(-std::expm1(-p.rate() * eps));
}

}  // namespace cbgen
