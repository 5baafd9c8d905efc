#pragma once

// Reference implementations used as test oracles. They share no code with
// the library beyond the graph container.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "tdo/graph.hpp"

namespace tdo::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Periodic linear interpolation over raw breakpoints.
inline double naive_eval(const std::vector<Breakpoint>& pts, double period, double t) {
  if (pts.size() == 1) return pts[0].delay;
  double x = std::fmod(t, period);
  if (x < 0) x += period;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (x >= pts[i].time && x <= pts[i + 1].time) {
      const double w = (x - pts[i].time) / (pts[i + 1].time - pts[i].time);
      return pts[i].delay * (1 - w) + pts[i + 1].delay * w;
    }
  }
  // wrap segment from the last breakpoint to the first one a period later
  const auto& a = pts.back();
  Breakpoint b{pts.front().time + period, pts.front().delay};
  const double xx = x < pts.front().time ? x + period : x;
  const double w = (xx - a.time) / (b.time - a.time);
  return a.delay * (1 - w) + b.delay * w;
}

inline std::vector<Breakpoint> raw(const Ttf& f) { return {f.breakpoints().begin(), f.breakpoints().end()}; }

inline double arc_delay(const TdGraph& g, ArcId a, double t) {
  return naive_eval(raw(g.arc(a).ttf), g.period(), t);
}

/// Earliest arrival times from (o, t) by label correcting: a FIFO queue
/// relaxes until no label improves. Independent of any heap order.
inline std::vector<double> label_correcting(const TdGraph& g, VertexId o, double t) {
  std::vector<double> arr(g.num_vertices(), kInf);
  std::vector<bool> queued(g.num_vertices(), false);
  std::deque<VertexId> q;
  arr[o] = t;
  q.push_back(o);
  queued[o] = true;
  while (!q.empty()) {
    const VertexId u = q.front();
    q.pop_front();
    queued[u] = false;
    for (ArcId a : g.out_arcs(u)) {
      const auto& arc = g.arc(a);
      if (!g.is_active(arc.head)) continue;
      const double x = arr[u] + arc_delay(g, a, arr[u]);
      if (x < arr[arc.head] - 1e-12 * std::max(1.0, std::abs(x))) {
        arr[arc.head] = x;
        if (!queued[arc.head]) {
          queued[arc.head] = true;
          q.push_back(arc.head);
        }
      }
    }
  }
  return arr;
}

inline std::optional<double> lc_distance(const TdGraph& g, VertexId o, VertexId d, double t) {
  const auto arr = label_correcting(g, o, t);
  if (arr[d] == kInf) return std::nullopt;
  return arr[d] - t;
}

/// Minimum travel time over every simple path o -> d, each evaluated leg by
/// leg with the arc functions. Exponential; for tiny graphs only.
inline std::optional<double> enumerate_paths(const TdGraph& g, VertexId o, VertexId d, double t) {
  std::optional<double> best;
  std::vector<bool> on_path(g.num_vertices(), false);
  std::function<void(VertexId, double)> dfs = [&](VertexId u, double at) {
    if (u == d) {
      if (!best || at - t < *best) best = at - t;
      return;
    }
    on_path[u] = true;
    for (ArcId a : g.out_arcs(u)) {
      const auto& arc = g.arc(a);
      if (on_path[arc.head] || !g.is_active(arc.head)) continue;
      dfs(arc.head, at + arc.ttf.eval(at));
    }
    on_path[u] = false;
  };
  dfs(o, t);
  return best;
}

/// Static distances by Bellman-Ford over the given per-arc weights.
inline std::vector<double> bellman_ford(const TdGraph& g, const std::vector<double>& w, VertexId o,
                                        bool backward = false) {
  std::vector<double> dist(g.num_vertices(), kInf);
  dist[o] = 0;
  for (std::size_t round = 0; round < g.num_vertices(); ++round) {
    bool changed = false;
    for (ArcId a = 0; a < g.num_arcs(); ++a) {
      const auto& arc = g.arc(a);
      if (!arc.active) continue;
      const VertexId from = backward ? arc.head : arc.tail;
      const VertexId to = backward ? arc.tail : arc.head;
      if (dist[from] + w[a] < dist[to]) {
        dist[to] = dist[from] + w[a];
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

/// Min / max delay per arc, computed from the breakpoints.
inline std::vector<double> arc_extreme(const TdGraph& g, bool max) {
  std::vector<double> w(g.num_arcs());
  for (ArcId a = 0; a < g.num_arcs(); ++a) {
    double v = max ? -kInf : kInf;
    for (const auto& p : g.arc(a).ttf.breakpoints()) v = max ? std::max(v, p.delay) : std::min(v, p.delay);
    w[a] = v;
  }
  return w;
}

/// FIFO-valid random breakpoints: slopes stay within [-max_fall, max_rise].
inline std::vector<Breakpoint> random_points(std::mt19937_64& rng, double period, std::size_t k, double base,
                                             double max_rise = 0.2, double max_fall = 0.2) {
  std::vector<Breakpoint> pts;
  if (k <= 1) return {{0.0, base}};
  std::vector<double> times;
  std::uniform_real_distribution<double> u(0.0, period);
  times.push_back(0.0);
  while (times.size() < k) {
    const double x = std::floor(u(rng));
    if (std::find(times.begin(), times.end(), x) == times.end()) times.push_back(x);
  }
  std::sort(times.begin(), times.end());
  double v = base;
  std::uniform_real_distribution<double> s(-max_fall, max_rise);
  for (std::size_t i = 0; i < k; ++i) {
    pts.push_back({times[i], v});
    const double next_t = i + 1 < k ? times[i + 1] : period;
    v = std::max(1.0, v + s(rng) * (next_t - times[i]));
  }
  // lower the high end of any segment (wrap included) that is too steep;
  // values only decrease, so this settles
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < k; ++i) {
      auto& a = pts[i];
      auto& b = pts[(i + 1) % k];
      const double dt = (i + 1 < k ? b.time : b.time + period) - a.time;
      if (b.delay - a.delay > max_rise * dt * (1 - 1e-9)) {
        b.delay = std::max(1.0, a.delay + max_rise * dt * 0.999);
        changed = true;
      } else if (a.delay - b.delay > max_fall * dt * (1 - 1e-9)) {
        a.delay = std::max(1.0, b.delay + max_fall * dt * 0.999);
        changed = true;
      }
    }
  }
  return pts;
}

/// Strongly connected random graph: a bidirected spanning path plus extra
/// random arcs, a share of them time-dependent.
inline TdGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t extra, double td_share = 0.5,
                            double period = 86400.0) {
  TdGraph g(n, period);
  std::uniform_real_distribution<double> base(20.0, 300.0);
  std::bernoulli_distribution td(td_share);
  std::uniform_int_distribution<std::size_t> k(2, 8);
  auto ttf = [&] {
    const double b = std::round(base(rng));
    return td(rng) ? Ttf(period, random_points(rng, period, k(rng), b, 0.02, 0.02)) : Ttf(period, b);
  };
  for (VertexId v = 0; v + 1 < n; ++v) {
    g.add_arc(v, v + 1, ttf());
    g.add_arc(v + 1, v, ttf());
  }
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
  for (std::size_t i = 0; i < extra; ++i) {
    const VertexId a = pick(rng), b = pick(rng);
    if (a == b || g.find_arc(a, b)) continue;
    g.add_arc(a, b, ttf());
  }
  return g;
}

/// Subgraph induced by `keep`, vertices renumbered in the given order.
inline TdGraph induced(const TdGraph& g, const std::vector<VertexId>& keep) {
  std::vector<long> id(g.num_vertices(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) id[keep[i]] = static_cast<long>(i);
  TdGraph s(keep.size(), g.period());
  for (VertexId v : keep) {
    for (ArcId a : g.out_arcs(v)) {
      const auto& arc = g.arc(a);
      if (id[arc.head] < 0) continue;
      s.add_arc(static_cast<VertexId>(id[v]), static_cast<VertexId>(id[arc.head]), arc.ttf, arc.category);
    }
  }
  return s;
}

}  // namespace tdo::testing
