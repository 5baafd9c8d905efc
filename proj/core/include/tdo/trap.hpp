#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tdo/graph.hpp"

namespace tdo {

struct TrapConfig {
  Seconds tau = 900.0;  // must divide the period
  double epsilon = 0.1;
  /// Optional global caps on the slope bounds derived from sampled paths.
  std::optional<SlopeBounds> slope_cap;
  int max_refinement_depth = 8;

  /// Throws std::invalid_argument when the config cannot be used with `period`.
  void validate(Seconds period) const;
};

/// Half-line y = y0 + slope * (t - t0).
struct Line {
  Seconds t0 = 0.0;
  Seconds y0 = 0.0;
  double slope = 0.0;

  Seconds at(Seconds t) const { return y0 + slope * (t - t0); }
};

/// Lower envelope of `lines` over [a, b]: breakpoints at a, at every
/// switch between lines, and at b.
std::vector<Breakpoint> lower_envelope(std::span<const Line> lines, Seconds a, Seconds b);

/// Trapezoid over [t_s, t_f]: min of the rising line through (t_s, d_ts)
/// with slope bounds.lambda_max and the falling line through (t_f, d_tf)
/// with slope -bounds.lambda_min.
std::vector<Breakpoint> trap_interval(Seconds d_ts, Seconds d_tf, Seconds t_s, Seconds t_f,
                                      SlopeBounds bounds);

/// Highest point of the trapezoid minus min(d_ts, d_tf).
Seconds trap_peak_overshoot(Seconds d_ts, Seconds d_tf, Seconds t_s, Seconds t_f,
                            SlopeBounds bounds);

/// v's summary equals the anchor's summary plus a constant offset.
struct SummaryRef {
  VertexId anchor = kNoVertex;
  Seconds offset = 0.0;
};

struct Summary {
  VertexId landmark = kNoVertex;
  VertexId destination = kNoVertex;
  Ttf upper;
  std::optional<SummaryRef> ref;
};

struct TrapStats {
  std::size_t tdd_runs = 0;
  std::size_t settled = 0;
  std::size_t refined_intervals = 0;
};

struct SummarySet {
  VertexId landmark = kNoVertex;
  std::vector<Summary> summaries;  // ascending destination
  TrapStats stats;

  const Summary* find(VertexId destination) const;
};

/// Upper-approximation pieces over an absolute window [start, end] whose
/// ends lie on the tau grid. Points carry absolute times, end included.
struct WindowSummaries {
  VertexId landmark = kNoVertex;
  Seconds start = 0.0;
  Seconds end = 0.0;
  std::vector<VertexId> destinations;  // ascending
  std::vector<std::vector<Breakpoint>> points;
  std::vector<std::optional<SummaryRef>> refs;
  TrapStats stats;
};

/// Summaries from `landmark` to every reachable vertex of `coverage`
/// (unreachable ones are omitted). The search runs on the whole graph and
/// stops once the coverage is settled.
SummarySet build_summaries(const TdGraph& g, VertexId landmark, std::span<const VertexId> coverage,
                           const TrapConfig& cfg);

/// Same construction restricted to the grid-aligned window containing
/// [from, to].
WindowSummaries build_window_summaries(const TdGraph& g, VertexId landmark,
                                       std::span<const VertexId> coverage, const TrapConfig& cfg,
                                       Seconds from, Seconds to);

}  // namespace tdo
