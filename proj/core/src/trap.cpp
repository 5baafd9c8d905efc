#include "tdo/trap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tdo/search.hpp"

namespace tdo {

void TrapConfig::validate(Seconds period) const {
  if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (max_refinement_depth < 0) throw std::invalid_argument("max_refinement_depth must be >= 0");
  const double ratio = period / tau;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw std::invalid_argument("tau " + std::to_string(tau) + " does not divide the period " +
                                std::to_string(period));
  }
  if (slope_cap && (slope_cap->lambda_min < 0 || slope_cap->lambda_min >= 1 ||
                    slope_cap->lambda_max < 0)) {
    throw std::invalid_argument("slope cap needs lambda_min in [0,1) and lambda_max >= 0");
  }
}

std::vector<Breakpoint> lower_envelope(std::span<const Line> lines, Seconds a, Seconds b) {
  std::vector<Breakpoint> out;
  if (lines.empty()) return out;
  std::size_t cur = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double vi = lines[i].at(a);
    const double vc = lines[cur].at(a);
    if (vi < vc || (vi == vc && lines[i].slope < lines[cur].slope)) cur = i;
  }
  out.push_back({a, lines[cur].at(a)});
  Seconds t = a;
  for (;;) {
    std::size_t next = lines.size();
    Seconds next_t = b;
    for (std::size_t j = 0; j < lines.size(); ++j) {
      if (!(lines[j].slope < lines[cur].slope)) continue;
      // lines[j] overtakes lines[cur] where their values meet
      const double x = (lines[j].y0 - lines[j].slope * lines[j].t0 - lines[cur].y0 +
                        lines[cur].slope * lines[cur].t0) /
                       (lines[cur].slope - lines[j].slope);
      if (x > t && x < next_t) {
        next_t = x;
        next = j;
      }
    }
    if (next == lines.size()) break;
    out.push_back({next_t, lines[next].at(next_t)});
    cur = next;
    t = next_t;
  }
  if (out.back().time < b) out.push_back({b, lines[cur].at(b)});
  return out;
}

std::vector<Breakpoint> trap_interval(Seconds d_ts, Seconds d_tf, Seconds t_s, Seconds t_f,
                                      SlopeBounds bounds) {
  const Line lines[] = {{t_s, d_ts, bounds.lambda_max}, {t_f, d_tf, -bounds.lambda_min}};
  return lower_envelope(lines, t_s, t_f);
}

Seconds trap_peak_overshoot(Seconds d_ts, Seconds d_tf, Seconds t_s, Seconds t_f,
                            SlopeBounds bounds) {
  const auto pts = trap_interval(d_ts, d_tf, t_s, t_f, bounds);
  Seconds peak = 0;
  for (const auto& p : pts) peak = std::max(peak, p.delay);
  return peak - std::min(d_ts, d_tf);
}

const Summary* SummarySet::find(VertexId destination) const {
  auto it = std::lower_bound(summaries.begin(), summaries.end(), destination,
                             [](const Summary& s, VertexId v) { return s.destination < v; });
  return (it != summaries.end() && it->destination == destination) ? &*it : nullptr;
}

namespace {

constexpr Seconds kNaN = std::numeric_limits<Seconds>::quiet_NaN();
constexpr std::uint32_t kNotCovered = std::numeric_limits<std::uint32_t>::max();

// Values of one sampled search, indexed by coverage position.
struct Sample {
  Seconds time = 0.0;
  std::vector<Seconds> dist;  // NaN when not sampled
  std::vector<double> up;     // slope bound of the tree path (rising)
  std::vector<double> down;   // slope bound of the tree path (falling)
  std::vector<VertexId> anchor;
  std::vector<Seconds> offset;
};

struct ArcSlopes {
  std::vector<double> up;    // 1 + rising slope bound
  std::vector<double> down;  // 1 - falling slope bound
  std::vector<bool> td;
};

class Builder {
 public:
  Builder(const TdGraph& g, VertexId landmark, std::span<const VertexId> coverage,
          const TrapConfig& cfg)
      : g_(g), landmark_(landmark), cfg_(cfg), pos_(g.num_vertices(), kNotCovered) {
    cfg.validate(g.period());
    if (landmark >= g.num_vertices() || !g.is_active(landmark)) {
      throw std::invalid_argument("landmark " + std::to_string(landmark) + " is not an active vertex");
    }
    for (VertexId v : coverage) {
      if (v < g.num_vertices() && g.is_active(v) && pos_[v] == kNotCovered) {
        pos_[v] = 0;
        cover_.push_back(v);
      }
    }
    std::sort(cover_.begin(), cover_.end());
    for (std::uint32_t i = 0; i < cover_.size(); ++i) pos_[cover_[i]] = i;
    slopes_.up.resize(g.num_arcs());
    slopes_.down.resize(g.num_arcs());
    slopes_.td.resize(g.num_arcs());
    for (ArcId a = 0; a < g.num_arcs(); ++a) {
      const auto& f = g.arc(a).ttf;
      const auto b = slope_range(f);
      slopes_.up[a] = 1.0 + b.lambda_max;
      slopes_.down[a] = 1.0 - b.lambda_min;
      slopes_.td[a] = !f.is_constant();
    }
    g_up_.resize(g.num_vertices());
    g_down_.resize(g.num_vertices());
    g_anchor_.resize(g.num_vertices());
    g_offset_.resize(g.num_vertices());
  }

  WindowSummaries run(Seconds w0, Seconds w1, bool periodic) {
    WindowSummaries out;
    out.landmark = landmark_;
    out.start = w0;
    out.end = w1;
    const std::size_t nc = cover_.size();
    points_.assign(nc, {});
    derived_from_.assign(nc, kNotCovered);
    ref_.assign(nc, std::nullopt);
    ref_ok_.assign(nc, true);

    const auto steps = static_cast<std::size_t>(std::llround((w1 - w0) / cfg_.tau));
    Sample first = sample_all(w0);
    reachable_.assign(nc, false);
    for (std::size_t i = 0; i < nc; ++i) reachable_[i] = !std::isnan(first.dist[i]);

    Sample left = first;
    for (std::size_t k = 0; k < steps; ++k) {
      const Seconds b = (k + 1 == steps) ? w1 : w0 + static_cast<Seconds>(k + 1) * cfg_.tau;
      Sample right;
      if (k + 1 == steps && periodic) {
        right = first;
        right.time = b;
      } else {
        right = sample_all(b);
      }
      process_interval(left, right);
      left = std::move(right);
    }
    // closing point at w1
    for (std::size_t i = 0; i < nc; ++i) {
      if (!reachable_[i]) continue;
      const auto src = derived_from_[i];
      const Seconds value = src == kNotCovered ? left.dist[i] : left.dist[src] + left.offset[i];
      points_[i].push_back({w1, value});
    }

    for (std::size_t i = 0; i < nc; ++i) {
      if (!reachable_[i]) continue;
      out.destinations.push_back(cover_[i]);
      out.points.push_back(std::move(points_[i]));
      out.refs.push_back(ref_ok_[i] ? ref_[i] : std::nullopt);
    }
    out.stats = stats_;
    return out;
  }

 private:
  struct Pending {
    std::uint32_t idx;
    Seconds d_left;
    Seconds d_right;
    std::vector<Line> lines;
  };

  // Runs one search from the landmark at absolute time t; `wanted` selects
  // coverage positions to sample (all when empty).
  Sample sample(Seconds t, const std::vector<std::uint32_t>* wanted) {
    const std::size_t nc = cover_.size();
    Sample s;
    s.time = t;
    s.dist.assign(nc, kNaN);
    s.up.assign(nc, 0.0);
    s.down.assign(nc, 0.0);
    s.anchor.assign(nc, kNoVertex);
    s.offset.assign(nc, 0.0);

    std::vector<bool> want;
    std::size_t remaining = nc;
    if (wanted) {
      want.assign(nc, false);
      for (auto i : *wanted) want[i] = true;
      remaining = wanted->size();
    }
    Dijkstra search(g_, landmark_, t);
    ++stats_.tdd_runs;
    while (remaining > 0) {
      auto next = search.next();
      if (!next) break;
      ++stats_.settled;
      const VertexId v = next->vertex;
      const ArcId a = search.pred(v);
      if (a == kNoArc) {
        g_up_[v] = 1.0;
        g_down_[v] = 1.0;
        g_anchor_[v] = v;
        g_offset_[v] = 0.0;
      } else {
        const VertexId u = g_.arc(a).tail;
        g_up_[v] = g_up_[u] * slopes_.up[a];
        g_down_[v] = g_down_[u] * slopes_.down[a];
        if (slopes_.td[a]) {
          g_anchor_[v] = v;
          g_offset_[v] = 0.0;
        } else {
          g_anchor_[v] = g_anchor_[u];
          g_offset_[v] = g_offset_[u] + g_.arc(a).ttf.breakpoints().front().delay;
        }
      }
      const auto i = pos_[v];
      if (i == kNotCovered || (wanted && !want[i])) continue;
      s.dist[i] = next->label - t;
      s.up[i] = g_up_[v] - 1.0;
      s.down[i] = 1.0 - g_down_[v];
      if (cfg_.slope_cap) {
        s.up[i] = std::min(s.up[i], cfg_.slope_cap->lambda_max);
        s.down[i] = std::min(s.down[i], cfg_.slope_cap->lambda_min);
      }
      s.anchor[i] = g_anchor_[v];
      s.offset[i] = g_offset_[v];
      --remaining;
    }
    return s;
  }

  Sample sample_all(Seconds t) { return sample(t, nullptr); }

  bool needs_refinement(Seconds peak, Seconds d_left, Seconds d_right) const {
    return peak > (1.0 + cfg_.epsilon) * std::min(d_left, d_right);
  }

  static Seconds peak_of(const std::vector<Breakpoint>& pts) {
    Seconds peak = 0;
    for (const auto& p : pts) peak = std::max(peak, p.delay);
    return peak;
  }

  void emit(std::uint32_t i, const std::vector<Breakpoint>& pts) {
    // the interval's closing point belongs to the next interval
    points_[i].insert(points_[i].end(), pts.begin(), pts.end() - 1);
  }

  void process_interval(const Sample& l, const Sample& r) {
    const std::size_t nc = cover_.size();
    std::vector<std::size_t> begin(nc, 0);
    std::vector<std::uint32_t> derived;
    std::vector<Pending> pending;

    for (std::uint32_t i = 0; i < nc; ++i) {
      if (!reachable_[i]) continue;
      begin[i] = points_[i].size();
      derived_from_[i] = kNotCovered;
      const VertexId a = l.anchor[i];
      const bool same_anchor = a == r.anchor[i] && a != cover_[i] && pos_[a] != kNotCovered &&
                               std::abs(l.offset[i] - r.offset[i]) <= 1e-9 * std::max(1.0, l.offset[i]);
      if (same_anchor) {
        derived_from_[i] = pos_[a];
        derived.push_back(i);
        SummaryRef ref{a, l.offset[i]};
        if (!ref_[i]) {
          ref_[i] = ref;
        } else if (ref_[i]->anchor != a || std::abs(ref_[i]->offset - ref.offset) > 1e-9 * std::max(1.0, ref.offset)) {
          ref_ok_[i] = false;
        }
        continue;
      }
      ref_ok_[i] = false;
      const Line lines[] = {{l.time, l.dist[i], l.up[i]}, {r.time, r.dist[i], -r.down[i]}};
      auto pts = lower_envelope(lines, l.time, r.time);
      if (cfg_.max_refinement_depth > 0 && needs_refinement(peak_of(pts), l.dist[i], r.dist[i])) {
        pending.push_back({i, l.dist[i], r.dist[i], {lines[0], lines[1]}});
      } else {
        emit(i, pts);
      }
    }
    if (!pending.empty()) refine(l.time, r.time, std::move(pending), 1);

    for (auto i : derived) {
      const auto src = derived_from_[i];
      const Seconds off = l.offset[i];
      const auto& sp = points_[src];
      for (std::size_t k = begin[src]; k < sp.size(); ++k) {
        points_[i].push_back({sp[k].time, sp[k].delay + off});
      }
    }
  }

  void refine(Seconds a, Seconds b, std::vector<Pending> pending, int depth) {
    ++stats_.refined_intervals;
    const Seconds mid = 0.5 * (a + b);
    std::vector<std::uint32_t> wanted;
    wanted.reserve(pending.size());
    for (const auto& p : pending) wanted.push_back(p.idx);
    const Sample m = sample(mid, &wanted);

    std::vector<Pending> left_next;
    std::vector<Pending> right_rest;
    for (auto& p : pending) {
      const auto i = p.idx;
      std::vector<Line> left = p.lines;
      left.push_back({mid, m.dist[i], -m.down[i]});
      std::vector<Line> right = std::move(p.lines);
      right.push_back({mid, m.dist[i], m.up[i]});
      auto lp = lower_envelope(left, a, mid);
      if (depth < cfg_.max_refinement_depth && needs_refinement(peak_of(lp), p.d_left, m.dist[i])) {
        left_next.push_back({i, p.d_left, m.dist[i], std::move(left)});
      } else {
        emit(i, lp);
      }
      right_rest.push_back({i, m.dist[i], p.d_right, std::move(right)});
    }
    if (!left_next.empty()) refine(a, mid, std::move(left_next), depth + 1);

    std::vector<Pending> right_next;
    for (auto& p : right_rest) {
      auto rp = lower_envelope(p.lines, mid, b);
      if (depth < cfg_.max_refinement_depth && needs_refinement(peak_of(rp), p.d_left, p.d_right)) {
        right_next.push_back(std::move(p));
      } else {
        emit(p.idx, rp);
      }
    }
    if (!right_next.empty()) refine(mid, b, std::move(right_next), depth + 1);
  }

  const TdGraph& g_;
  VertexId landmark_;
  TrapConfig cfg_;
  std::vector<std::uint32_t> pos_;
  std::vector<VertexId> cover_;
  ArcSlopes slopes_;
  std::vector<double> g_up_;
  std::vector<double> g_down_;
  std::vector<VertexId> g_anchor_;
  std::vector<Seconds> g_offset_;

  std::vector<bool> reachable_;
  std::vector<std::vector<Breakpoint>> points_;
  std::vector<std::uint32_t> derived_from_;
  std::vector<std::optional<SummaryRef>> ref_;
  std::vector<bool> ref_ok_;
  TrapStats stats_;
};

}  // namespace

WindowSummaries build_window_summaries(const TdGraph& g, VertexId landmark,
                                       std::span<const VertexId> coverage, const TrapConfig& cfg,
                                       Seconds from, Seconds to) {
  if (!(to >= from)) throw std::invalid_argument("window end precedes its start");
  Builder builder(g, landmark, coverage, cfg);
  const Seconds w0 = std::floor(from / cfg.tau) * cfg.tau;
  Seconds w1 = std::ceil(to / cfg.tau) * cfg.tau;
  if (w1 <= w0) w1 = w0 + cfg.tau;
  return builder.run(w0, w1, false);
}

SummarySet build_summaries(const TdGraph& g, VertexId landmark, std::span<const VertexId> coverage,
                           const TrapConfig& cfg) {
  Builder builder(g, landmark, coverage, cfg);
  auto w = builder.run(0.0, g.period(), true);
  SummarySet set;
  set.landmark = landmark;
  set.stats = w.stats;
  set.summaries.reserve(w.destinations.size());
  for (std::size_t i = 0; i < w.destinations.size(); ++i) {
    auto& pts = w.points[i];
    pts.pop_back();  // the point at the period equals the point at 0
    Summary s;
    s.landmark = landmark;
    s.destination = w.destinations[i];
    s.upper = Ttf(g.period(), std::move(pts)).simplified();
    s.ref = w.refs[i];
    set.summaries.push_back(std::move(s));
  }
  // a ref'd summary is its anchor's summary shifted, point for point
  for (auto& s : set.summaries) {
    if (!s.ref) continue;
    const Summary* anchor = set.find(s.ref->anchor);
    if (!anchor || anchor->ref) {
      s.ref.reset();
      continue;
    }
    s.upper = anchor->upper.shifted(s.ref->offset);
  }
  return set;
}

}  // namespace tdo
