#include "cbgen/forest.hpp"

#include <algorithm>

namespace cbgen {

namespace {

// Marks every ancestor of the leaves and records for each the latest time
// at which it still carries a lineage of the sample.
struct Walker {
  std::vector<double>& end;
  std::vector<std::uint32_t>& stamp;
  std::vector<std::int32_t>& visited;
  std::uint32_t epoch;

  template <class StartFn, class ParentFn>
  void run(std::span<const std::int32_t> leaves, double tau, StartFn start, ParentFn parent) {
    visited.clear();
    for (std::int32_t leaf : leaves) {
      const auto i = static_cast<std::size_t>(leaf);
      if (stamp[i] == epoch) continue;
      stamp[i] = epoch;
      end[i] = tau;
      visited.push_back(leaf);
    }
    const std::size_t n_leaves = visited.size();
    for (std::size_t k = 0; k < n_leaves; ++k) {
      std::int32_t node = visited[k];
      for (;;) {
        const std::int32_t up = parent(node);
        if (up < 0) break;
        const auto u = static_cast<std::size_t>(up);
        const double split = start(node);
        if (stamp[u] == epoch) {
          end[u] = std::max(end[u], split);
          break;
        }
        stamp[u] = epoch;
        end[u] = split;
        visited.push_back(up);
        node = up;
      }
    }
  }

  template <class StartFn>
  void summarize(double tau, std::size_t population, const ObservationSpec& spec, StartFn start,
                 TreeSnapshot& out) const {
    out.time = tau;
    out.population = static_cast<std::int64_t>(population);
    out.ancestors.assign(spec.depths.size(), 0);
    out.lengths.assign(spec.lengths.size(), 0.0);
    for (std::int32_t node : visited) {
      const double s = start(node);
      const double e = end[static_cast<std::size_t>(node)];
      for (std::size_t j = 0; j < spec.depths.size(); ++j) {
        const double x = tau - spec.depths[j];
        if (s <= x && x < e) ++out.ancestors[j];
      }
      for (std::size_t j = 0; j < spec.lengths.size(); ++j) {
        const double hi = std::min(e, tau - spec.lengths[j]);
        if (hi > s) out.lengths[j] += hi - s;
      }
    }
  }
};

}  // namespace

std::int32_t LineageForest::add(double start, std::int32_t parent) {
  std::int32_t id;
  if (recycle_ && !free_.empty()) {
    id = free_.back();
    free_.pop_back();
    const auto i = static_cast<std::size_t>(id);
    start_[i] = start;
    parent_[i] = parent;
    holds_[i] = 1;
  } else {
    id = static_cast<std::int32_t>(start_.size());
    start_.push_back(start);
    parent_.push_back(parent);
    holds_.push_back(1);
    end_.push_back(0.0);
    stamp_.push_back(0);
  }
  if (parent >= 0) ++holds_[static_cast<std::size_t>(parent)];
  ++live_;
  return id;
}

void LineageForest::release(std::int32_t node) {
  while (node >= 0) {
    const auto i = static_cast<std::size_t>(node);
    if (--holds_[i] > 0) return;
    --live_;
    const std::int32_t up = parent_[i];
    if (recycle_) free_.push_back(node);
    node = up;
  }
}

void LineageForest::observe(std::span<const std::int32_t> leaves, double tau,
                            const ObservationSpec& spec, TreeSnapshot& out) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0u);
    epoch_ = 1;
  }
  Walker w{end_, stamp_, visited_, epoch_};
  auto start = [this](std::int32_t n) { return start_[static_cast<std::size_t>(n)]; };
  auto parent = [this](std::int32_t n) { return parent_[static_cast<std::size_t>(n)]; };
  w.run(leaves, tau, start, parent);
  w.summarize(tau, leaves.size(), spec, start, out);
}

void observe_genealogy(std::span<const double> start, std::span<const std::int32_t> parent,
                       std::span<const std::int32_t> leaves, double tau,
                       const ObservationSpec& spec, TreeSnapshot& out) {
  std::vector<double> end(start.size(), 0.0);
  std::vector<std::uint32_t> stamp(start.size(), 0u);
  std::vector<std::int32_t> visited;
  Walker w{end, stamp, visited, 1u};
  auto st = [&](std::int32_t n) { return start[static_cast<std::size_t>(n)]; };
  auto pa = [&](std::int32_t n) { return parent[static_cast<std::size_t>(n)]; };
  w.run(leaves, tau, st, pa);
  w.summarize(tau, leaves.size(), spec, st, out);
}

}  // namespace cbgen
