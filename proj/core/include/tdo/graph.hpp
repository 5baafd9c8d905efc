#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tdo/ttf.hpp"

namespace tdo {

using VertexId = std::uint32_t;
using ArcId = std::uint32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr ArcId kNoArc = std::numeric_limits<ArcId>::max();
inline constexpr int kNoCategory = std::numeric_limits<int>::max();

struct Arc {
  VertexId tail = kNoVertex;
  VertexId head = kNoVertex;
  Ttf ttf;
  int category = kNoCategory;
  bool active = true;
  bool shortcut = false;
};

struct NodeInfo {
  std::optional<double> lon;
  std::optional<double> lat;
  int category = kNoCategory;
  bool active = true;
};

/// Error raised while reading or validating an instance. `line` is the
/// 1-based line of the offending record, 0 when not tied to a line.
class InstanceError : public std::runtime_error {
 public:
  InstanceError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Directed graph with a periodic travel-time function per arc.
///
/// Arc ids are stable: contraction flags vertices and arcs inactive instead
/// of erasing them and appends shortcut arcs. Adjacency lists only ever hold
/// active arcs.
class TdGraph {
 public:
  TdGraph() = default;
  TdGraph(std::size_t num_vertices, Seconds period);

  std::size_t num_vertices() const { return nodes_.size(); }
  std::size_t num_arcs() const { return arcs_.size(); }
  std::size_t num_active_vertices() const;
  std::size_t num_active_arcs() const;
  Seconds period() const { return period_; }

  /// Adds an arc; the TTF must share the graph period and be FIFO.
  ArcId add_arc(VertexId tail, VertexId head, Ttf ttf, int category = kNoCategory);

  const Arc& arc(ArcId a) const { return arcs_[a]; }
  const NodeInfo& node(VertexId v) const { return nodes_[v]; }
  NodeInfo& node(VertexId v) { return nodes_[v]; }
  bool is_active(VertexId v) const { return nodes_[v].active; }

  std::span<const ArcId> out_arcs(VertexId v) const { return out_[v]; }
  std::span<const ArcId> in_arcs(VertexId v) const { return in_[v]; }

  std::vector<VertexId> active_vertices() const;

  /// Replaces an arc's TTF (used to build disrupted copies).
  void set_arc_ttf(ArcId a, Ttf ttf);

  void deactivate_vertex(VertexId v);
  void deactivate_arc(ArcId a);

  /// Arrival at the head when entering arc a at t. A shortcut is followed
  /// leg by leg along its chains, so contraction never changes a distance.
  Seconds arrival(ArcId a, Seconds t) const;

  /// Original arc sequences a shortcut stands for. A merged shortcut keeps
  /// one alternative per parallel chain.
  const std::vector<std::vector<ArcId>>* chains_of(ArcId shortcut) const;
  void add_chain(ArcId shortcut, std::vector<ArcId> chain);
  void merge_parallel_shortcut(ArcId shortcut, const Ttf& other, std::vector<ArcId> chain);

  /// Expands shortcuts of a path departing at `departure` into original arcs.
  std::vector<ArcId> unpack(std::span<const ArcId> path, Seconds departure) const;

  std::optional<ArcId> find_arc(VertexId tail, VertexId head) const;

 private:
  Seconds period_ = kDefaultPeriod;
  std::vector<NodeInfo> nodes_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<ArcId>> out_;
  std::vector<std::vector<ArcId>> in_;
  std::unordered_map<ArcId, std::vector<std::vector<ArcId>>> chains_;
};

TdGraph load_instance(std::istream& in);
TdGraph load_instance_file(const std::string& path);
void save_instance(const TdGraph& g, std::ostream& out);
void save_instance_file(const TdGraph& g, const std::string& path);

/// Replaces maximal chains of vertices with exactly two distinct neighbours
/// by shortcut arcs between the chain's junction endpoints.
TdGraph contract_degree2(const TdGraph& g);

enum class MetricKind { free_flow, full_congestion };

struct StaticMetric {
  MetricKind kind = MetricKind::free_flow;
  std::vector<Seconds> weight;  // indexed by ArcId; inactive arcs keep their value
};

StaticMetric static_metric(const TdGraph& g, MetricKind kind);

struct InstanceStats {
  std::size_t nodes = 0;
  std::size_t arcs = 0;
  std::size_t constant_arcs = 0;
  std::size_t pwl_arcs = 0;
  std::size_t min_breakpoints = 0;  // over time-dependent arcs
  double avg_breakpoints = 0.0;
  std::size_t max_breakpoints = 0;  // K_max, all arcs
  std::size_t total_breakpoints = 0;  // K
  std::size_t concavity_spoiling = 0;  // K*
  double lambda_max = 0.0;
  double lambda_min = 0.0;  // most negative arc slope (<= 0)
  Seconds max_delay = 0.0;  // M
};

InstanceStats instance_stats(const TdGraph& g);

/// Breakpoints of f (time > 0) at which the slope strictly increases.
std::size_t concavity_spoiling_breakpoints(const Ttf& f);

}  // namespace tdo
