#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "tdo/graph.hpp"

namespace tdo {

struct Settled {
  VertexId vertex = kNoVertex;
  Seconds label = 0.0;  // arrival time (td) or distance (static)
};

enum class StopReason { target_settled, landmarks_settled, size_reached, radius_exceeded, exhausted };

const char* to_string(StopReason r);

/// Stop rules for a search; the first rule to fire ends it. An empty
/// criterion runs to exhaustion.
struct StopCriterion {
  std::optional<VertexId> target;
  std::size_t landmark_count = 0;  // 0 disables
  std::function<bool(VertexId)> is_landmark;
  std::optional<std::size_t> size;
  std::optional<Seconds> radius;  // on label minus start label, inclusive

  static StopCriterion to_target(VertexId d) {
    StopCriterion c;
    c.target = d;
    return c;
  }
  static StopCriterion with_size(std::size_t f) {
    StopCriterion c;
    c.size = f;
    return c;
  }
  static StopCriterion with_radius(Seconds r) {
    StopCriterion c;
    c.radius = r;
    return c;
  }
  static StopCriterion landmarks(std::size_t count, std::function<bool(VertexId)> pred) {
    StopCriterion c;
    c.landmark_count = count;
    c.is_landmark = std::move(pred);
    return c;
  }
};

struct SearchResult {
  std::vector<Settled> settled;  // settle order; labels non-decreasing
  StopReason reason = StopReason::exhausted;
  Seconds start = 0.0;
  std::vector<ArcId> pred;  // by vertex; kNoArc for the origin and unsettled
  std::vector<Seconds> labels;  // by vertex; infinity when unsettled

  std::size_t rank() const { return settled.size(); }
  std::optional<Seconds> label_of(VertexId v) const;
  bool settled_vertex(VertexId v) const { return label_of(v).has_value(); }
  /// Arc sequence from the origin to a settled vertex.
  std::vector<ArcId> path_to(const TdGraph& g, VertexId v, bool backward = false) const;
};

/// Incremental label-setting search. Each `next()` settles one vertex; ties
/// on the label are broken by the smaller vertex id. Works for the
/// time-dependent metric (labels are absolute arrival times) and for a
/// static metric in either direction (labels are distances).
class Dijkstra {
 public:
  /// Time-dependent search departing `origin` at absolute time `departure`.
  Dijkstra(const TdGraph& g, VertexId origin, Seconds departure);
  /// Static search over `metric`; backward follows reverse adjacency.
  Dijkstra(const TdGraph& g, const StaticMetric& metric, VertexId origin, bool backward = false);

  std::optional<Settled> next();
  /// Label and vertex that `next()` would settle, without settling it.
  std::optional<Settled> peek();

  bool is_settled(VertexId v) const { return state_[v] == State::settled; }
  Seconds label(VertexId v) const { return label_[v]; }
  ArcId pred(VertexId v) const { return pred_[v]; }
  std::size_t rank() const { return rank_; }
  Seconds start() const { return start_; }
  VertexId origin() const { return origin_; }
  const std::vector<Settled>& order() const { return order_; }
  std::vector<ArcId> path_to(VertexId v) const;

  /// Runs until a criterion fires.
  StopReason run(const StopCriterion& stop);
  SearchResult result(StopReason reason) const;

 private:
  enum class State : unsigned char { unreached, queued, settled };
  using Entry = std::pair<Seconds, VertexId>;

  void relax(VertexId u);
  void skip_stale();

  const TdGraph* g_;
  const StaticMetric* metric_ = nullptr;
  bool backward_ = false;
  VertexId origin_;
  Seconds start_;
  std::vector<Seconds> label_;
  std::vector<ArcId> pred_;
  std::vector<State> state_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
  std::vector<Settled> order_;
  std::size_t rank_ = 0;
  std::size_t landmarks_seen_ = 0;
};

/// Time-dependent Dijkstra; `departure` is absolute, labels are absolute.
SearchResult tdd(const TdGraph& g, VertexId origin, Seconds departure, const StopCriterion& stop);

/// Exact travel time o -> d departing at t, nullopt when unreachable.
std::optional<Seconds> td_distance(const TdGraph& g, VertexId o, VertexId d, Seconds t);

SearchResult static_dijkstra(const TdGraph& g, const StaticMetric& metric, VertexId origin,
                             bool backward, const StopCriterion& stop);

/// Full single-source static distances (infinity when unreachable).
std::vector<Seconds> static_distances(const TdGraph& g, const StaticMetric& metric, VertexId origin,
                                      bool backward = false);

struct NearestLandmark {
  VertexId landmark = kNoVertex;
  Seconds distance = 0.0;
  SearchResult search;
};

/// Grows a time-dependent ball from (o, t) until the first landmark
/// settles; nullopt when no landmark is reachable.
std::optional<NearestLandmark> grow_ball_to_nearest_landmark(
    const TdGraph& g, VertexId o, Seconds t, const std::function<bool(VertexId)>& is_landmark);

}  // namespace tdo
