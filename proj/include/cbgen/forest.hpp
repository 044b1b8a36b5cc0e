#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cbgen {

// Depths and truncation levels at which a genealogy is summarized.
struct ObservationSpec {
  std::vector<double> depths;   // ancestor counts at tau - r
  std::vector<double> lengths;  // tree length below tau - eps
};

struct TreeSnapshot {
  double time = 0.0;
  std::int64_t population = 0;
  std::vector<std::int64_t> ancestors;  // one per ObservationSpec::depths
  std::vector<double> lengths;          // one per ObservationSpec::lengths
};

// Genealogy as a forest of segments. A segment starts when its lineage splits
// off its parent segment (or leaves the immortal line, parent -1) and extends
// as long as it has a living descendant. A segment is held by its living
// owner, if any, and by each held child; it is recycled when no hold remains.
class LineageForest {
 public:
  explicit LineageForest(bool recycle = true) : recycle_(recycle) {}

  // New segment held once by its owner; retains the parent.
  std::int32_t add(double start, std::int32_t parent);
  void release(std::int32_t node);

  double start(std::int32_t node) const { return start_[static_cast<std::size_t>(node)]; }
  std::int32_t parent(std::int32_t node) const { return parent_[static_cast<std::size_t>(node)]; }
  std::size_t live_segments() const { return live_; }
  std::size_t capacity() const { return start_.size(); }

  // Summary of the genealogy of `leaves` at time tau.
  void observe(std::span<const std::int32_t> leaves, double tau, const ObservationSpec& spec,
               TreeSnapshot& out);

 private:
  bool recycle_;
  std::vector<double> start_;
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> holds_;
  std::vector<std::int32_t> free_;
  std::size_t live_ = 0;

  std::vector<double> end_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<std::int32_t> visited_;
};

// Same summary for an arbitrary parent array; `start[i]` and `parent[i]`
// describe segment i, and `leaves` are the segments alive at tau.
void observe_genealogy(std::span<const double> start, std::span<const std::int32_t> parent,
                       std::span<const std::int32_t> leaves, double tau,
                       const ObservationSpec& spec, TreeSnapshot& out);

}  // namespace cbgen
