#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "tdo/graph.hpp"

namespace tdo {

/// Replacement summaries of one landmark over an absolute departure window.
struct TemporalSummaryPatch {
  std::uint64_t disruption = 0;
  VertexId landmark = kNoVertex;
  Seconds start = 0.0;
  Seconds end = 0.0;
  Seconds period = 0.0;  // when positive the window repeats with this period
  std::vector<VertexId> destinations;            // ascending
  std::vector<std::vector<Breakpoint>> points;   // absolute times spanning [start, end]

  bool covers(Seconds t) const { return t >= start && t <= end; }
  /// Value at t or at t shifted by whole periods into the window.
  std::optional<Seconds> eval(VertexId destination, Seconds t) const;
};

/// Immutable set of live patches. Where several patches cover the same
/// (landmark, destination, time) the largest value wins.
struct PatchSet {
  std::vector<TemporalSummaryPatch> patches;
  /// Graph with every live disruption applied; null means the base graph.
  std::shared_ptr<const TdGraph> graph;

  std::optional<Seconds> eval(VertexId landmark, VertexId destination, Seconds t) const;
  bool empty() const { return patches.empty(); }
};

/// Holder for the current patch set. Readers take a snapshot and keep it
/// for a whole query; writers publish a fresh set.
class PatchBoard {
 public:
  std::shared_ptr<const PatchSet> snapshot() const {
    std::lock_guard lock(mutex_);
    return current_;
  }
  void publish(std::shared_ptr<const PatchSet> next) {
    std::lock_guard lock(mutex_);
    current_ = std::move(next);
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const PatchSet> current_ = std::make_shared<const PatchSet>();
};

}  // namespace tdo
