#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdo/oracle.hpp"

namespace tdo {

class DisruptionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Extra delay on one arc over the absolute window [start, end]. With a
/// factor the arc's peak delay is scaled by `factor` inside the window;
/// a block holds traffic until the window closes.
struct Disruption {
  ArcId arc = kNoArc;
  Seconds start = 0.0;
  Seconds end = 0.0;
  double factor = 1.0;
  bool block = false;
};

/// Additive delay of a disruption as absolute breakpoints. Ramps outside
/// the window rise with slope 1 and fall with slope -1/2.
std::vector<Breakpoint> disruption_bump(const Ttf& base, const Disruption& d);
/// base plus the bump; throws DisruptionError when the result is not FIFO
/// or when it lowers any delay and decreases are not allowed.
Ttf disrupted_ttf(const Ttf& base, const Disruption& d, bool allow_decrease = false);

/// Landmarks within backward free-flow travel time `radius` of u.
std::vector<VertexId> affected_landmarks(const TdGraph& g, std::span<const VertexId> landmarks,
                                         VertexId u, Seconds radius);

struct DepartureWindow {
  Seconds start = 0.0;
  Seconds end = 0.0;
};

/// Departure times from l that may reach u inside [r_s, r_e]:
/// [r_s - full-congestion(l, u), r_e - free-flow(l, u)].
DepartureWindow compute_window(const TdGraph& g, VertexId l, VertexId u, Seconds r_s, Seconds r_e);

struct LiveOptions {
  bool allow_decrease = false;
};

struct UpdateReport {
  std::uint64_t id = 0;
  std::vector<VertexId> affected;
  std::size_t patches = 0;
  std::size_t destinations = 0;
  double seconds = 0.0;
};

/// Applies disruptions to an oracle as copy-on-write patch sets. The base
/// store is never touched; every change publishes a fresh snapshot.
class LiveTraffic {
 public:
  explicit LiveTraffic(OracleCore& core, LiveOptions options = {});

  UpdateReport apply(const Disruption& d);
  /// False when no live disruption has this id.
  bool expire(std::uint64_t id);

  struct Live {
    std::uint64_t id = 0;
    Disruption disruption;
    std::vector<TemporalSummaryPatch> patches;
  };
  std::vector<Live> live() const;
  /// Base graph with every live disruption applied.
  std::shared_ptr<const TdGraph> current_graph() const;

  void save(const std::string& path) const;
  /// Replaces the live disruptions with those stored in `path`.
  void load(const std::string& path);

 private:
  std::shared_ptr<const TdGraph> graph_with(const std::vector<Live>& live) const;
  void publish_locked();

  OracleCore& core_;
  LiveOptions options_;
  mutable std::mutex mutex_;
  std::vector<Live> live_;
  std::shared_ptr<const TdGraph> graph_;
  std::uint64_t next_id_ = 1;
};

}  // namespace tdo
