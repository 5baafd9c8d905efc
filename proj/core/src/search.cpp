#include "tdo/search.hpp"

#include <algorithm>

namespace tdo {

namespace {
constexpr Seconds kInf = std::numeric_limits<Seconds>::infinity();
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::target_settled: return "target-settled";
    case StopReason::landmarks_settled: return "landmarks-settled";
    case StopReason::size_reached: return "size-reached";
    case StopReason::radius_exceeded: return "radius-exceeded";
    case StopReason::exhausted: return "exhausted";
  }
  return "unknown";
}

std::optional<Seconds> SearchResult::label_of(VertexId v) const {
  if (v >= labels.size() || labels[v] == kInf) return std::nullopt;
  return labels[v];
}

std::vector<ArcId> SearchResult::path_to(const TdGraph& g, VertexId v, bool backward) const {
  std::vector<ArcId> path;
  if (!settled_vertex(v)) return path;
  for (VertexId cur = v; pred[cur] != kNoArc;) {
    path.push_back(pred[cur]);
    cur = backward ? g.arc(pred[cur]).head : g.arc(pred[cur]).tail;
  }
  if (!backward) std::reverse(path.begin(), path.end());
  return path;
}

Dijkstra::Dijkstra(const TdGraph& g, VertexId origin, Seconds departure)
    : g_(&g),
      origin_(origin),
      start_(departure),
      label_(g.num_vertices(), kInf),
      pred_(g.num_vertices(), kNoArc),
      state_(g.num_vertices(), State::unreached) {
  label_[origin] = departure;
  state_[origin] = State::queued;
  heap_.push({departure, origin});
}

Dijkstra::Dijkstra(const TdGraph& g, const StaticMetric& metric, VertexId origin, bool backward)
    : Dijkstra(g, origin, 0.0) {
  metric_ = &metric;
  backward_ = backward;
}

void Dijkstra::skip_stale() {
  while (!heap_.empty()) {
    const auto [key, v] = heap_.top();
    if (state_[v] == State::settled || key != label_[v]) {
      heap_.pop();
      continue;
    }
    break;
  }
}

std::optional<Settled> Dijkstra::peek() {
  skip_stale();
  if (heap_.empty()) return std::nullopt;
  return Settled{heap_.top().second, heap_.top().first};
}

std::optional<Settled> Dijkstra::next() {
  skip_stale();
  if (heap_.empty()) return std::nullopt;
  const auto [key, v] = heap_.top();
  heap_.pop();
  state_[v] = State::settled;
  ++rank_;
  order_.push_back({v, key});
  relax(v);
  return Settled{v, key};
}

void Dijkstra::relax(VertexId u) {
  const Seconds lu = label_[u];
  auto arcs = backward_ ? g_->in_arcs(u) : g_->out_arcs(u);
  for (ArcId a : arcs) {
    const auto& arc = g_->arc(a);
    const VertexId w = backward_ ? arc.tail : arc.head;
    if (state_[w] == State::settled) continue;
    const Seconds cand = metric_ ? lu + metric_->weight[a] : g_->arrival(a, lu);
    if (cand < label_[w] || (cand == label_[w] && state_[w] == State::unreached)) {
      label_[w] = cand;
      pred_[w] = a;
      state_[w] = State::queued;
      heap_.push({cand, w});
    }
  }
}

std::vector<ArcId> Dijkstra::path_to(VertexId v) const {
  std::vector<ArcId> path;
  if (state_[v] != State::settled) return path;
  for (VertexId cur = v; pred_[cur] != kNoArc;) {
    path.push_back(pred_[cur]);
    cur = backward_ ? g_->arc(pred_[cur]).head : g_->arc(pred_[cur]).tail;
  }
  if (!backward_) std::reverse(path.begin(), path.end());
  return path;
}

StopReason Dijkstra::run(const StopCriterion& stop) {
  std::size_t landmarks = 0;
  for (;;) {
    if (stop.size && rank_ >= *stop.size) return StopReason::size_reached;
    auto top = peek();
    if (!top) return StopReason::exhausted;
    if (stop.radius && top->label - start_ > *stop.radius) return StopReason::radius_exceeded;
    const auto s = *next();
    if (stop.target && s.vertex == *stop.target) return StopReason::target_settled;
    if (stop.landmark_count && stop.is_landmark && stop.is_landmark(s.vertex) &&
        ++landmarks >= stop.landmark_count) {
      return StopReason::landmarks_settled;
    }
  }
}

SearchResult Dijkstra::result(StopReason reason) const {
  SearchResult r;
  r.settled = order_;
  r.reason = reason;
  r.start = start_;
  r.pred.assign(pred_.size(), kNoArc);
  r.labels.assign(label_.size(), kInf);
  for (const auto& s : order_) {
    r.pred[s.vertex] = pred_[s.vertex];
    r.labels[s.vertex] = s.label;
  }
  return r;
}

SearchResult tdd(const TdGraph& g, VertexId origin, Seconds departure, const StopCriterion& stop) {
  Dijkstra d(g, origin, departure);
  const auto reason = d.run(stop);
  return d.result(reason);
}

std::optional<Seconds> td_distance(const TdGraph& g, VertexId o, VertexId d, Seconds t) {
  Dijkstra search(g, o, t);
  if (search.run(StopCriterion::to_target(d)) != StopReason::target_settled) return std::nullopt;
  return search.label(d) - t;
}

SearchResult static_dijkstra(const TdGraph& g, const StaticMetric& metric, VertexId origin,
                             bool backward, const StopCriterion& stop) {
  Dijkstra d(g, metric, origin, backward);
  const auto reason = d.run(stop);
  return d.result(reason);
}

std::vector<Seconds> static_distances(const TdGraph& g, const StaticMetric& metric, VertexId origin,
                                      bool backward) {
  Dijkstra d(g, metric, origin, backward);
  d.run({});
  std::vector<Seconds> out(g.num_vertices(), kInf);
  for (const auto& s : d.order()) out[s.vertex] = s.label;
  return out;
}

std::optional<NearestLandmark> grow_ball_to_nearest_landmark(
    const TdGraph& g, VertexId o, Seconds t, const std::function<bool(VertexId)>& is_landmark) {
  Dijkstra d(g, o, t);
  const auto reason = d.run(StopCriterion::landmarks(1, is_landmark));
  if (reason != StopReason::landmarks_settled) return std::nullopt;
  const auto last = d.order().back();
  return NearestLandmark{last.vertex, last.label - t, d.result(reason)};
}

}  // namespace tdo
