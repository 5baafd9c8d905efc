#include "tdo/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tdo/search.hpp"

namespace tdo {

const char* to_string(LandmarkMethod m) {
  switch (m) {
    case LandmarkMethod::random: return "R";
    case LandmarkMethod::sparse_random: return "SR";
    case LandmarkMethod::important_random: return "IR";
    case LandmarkMethod::partition: return "K";
    case LandmarkMethod::sparse_partition: return "SK";
    case LandmarkMethod::hybrid: return "H";
  }
  return "?";
}

LandmarkMethod parse_landmark_method(const std::string& name) {
  if (name == "R") return LandmarkMethod::random;
  if (name == "SR") return LandmarkMethod::sparse_random;
  if (name == "IR") return LandmarkMethod::important_random;
  if (name == "K") return LandmarkMethod::partition;
  if (name == "SK") return LandmarkMethod::sparse_partition;
  if (name == "H") return LandmarkMethod::hybrid;
  throw std::invalid_argument("unknown landmark method '" + name + "' (expected R, SR, IR, K, SK or H)");
}

bool LandmarkSet::contains(VertexId v) const {
  return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

namespace {

constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

// Candidate pool with O(1) removal and uniform draws.
class Pool {
 public:
  Pool(std::size_t n, std::span<const VertexId> items) : pos_(n, kAbsent) {
    for (VertexId v : items) {
      if (pos_[v] != kAbsent) continue;
      pos_[v] = items_.size();
      items_.push_back(v);
    }
  }

  bool empty() const { return items_.empty(); }

  void remove(VertexId v) {
    const auto p = pos_[v];
    if (p == kAbsent) return;
    const VertexId last = items_.back();
    items_[p] = last;
    pos_[last] = p;
    items_.pop_back();
    pos_[v] = kAbsent;
  }

  VertexId draw(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    const VertexId v = items_[pick(rng)];
    remove(v);
    return v;
  }

 private:
  std::vector<std::size_t> pos_;
  std::vector<VertexId> items_;
};

std::vector<VertexId> free_flow_ball(const TdGraph& g, const StaticMetric& ff, VertexId v,
                                     std::size_t size) {
  auto r = static_dijkstra(g, ff, v, false, StopCriterion::with_size(size));
  std::vector<VertexId> out;
  out.reserve(r.settled.size());
  for (const auto& s : r.settled) out.push_back(s.vertex);
  return out;
}

LandmarkSet sequential_pick(const TdGraph& g, std::span<const VertexId> candidates, std::size_t k,
                            std::size_t exclusion, std::uint64_t seed, LandmarkMethod method) {
  LandmarkSet set;
  set.method = method;
  set.seed = seed;
  set.exclusion = exclusion;
  set.requested = k;
  std::mt19937_64 rng(seed);
  Pool pool(g.num_vertices(), candidates);
  StaticMetric ff;
  if (exclusion > 0) ff = static_metric(g, MetricKind::free_flow);
  while (set.vertices.size() < k && !pool.empty()) {
    const VertexId v = pool.draw(rng);
    set.vertices.push_back(v);
    if (exclusion > 0) {
      for (VertexId w : free_flow_ball(g, ff, v, exclusion + 1)) pool.remove(w);
    }
  }
  set.partial = set.vertices.size() < k;
  return set;
}

}  // namespace

Partition read_partition(std::istream& in, const TdGraph& g) {
  Partition cells(g.num_vertices(), -1);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    long long v = 0;
    long long cell = 0;
    if (!(ss >> v)) continue;  // blank
    if (!(ss >> cell) || v < 0 || static_cast<std::size_t>(v) >= g.num_vertices() || cell < 0) {
      throw InstanceError("bad partition record", lineno);
    }
    cells[static_cast<std::size_t>(v)] = cell;
  }
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (g.is_active(v) && cells[v] < 0) {
      throw InstanceError("partition file misses vertex " + std::to_string(v));
    }
  }
  return cells;
}

Partition load_partition(const std::string& path, const TdGraph& g) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open partition file " + path);
  return read_partition(in, g);
}

LandmarkSet select_random(const TdGraph& g, std::size_t k, std::uint64_t seed) {
  const auto active = g.active_vertices();
  return sequential_pick(g, active, k, 0, seed, LandmarkMethod::random);
}

LandmarkSet select_sparse_random(const TdGraph& g, std::size_t k, std::size_t exclusion,
                                 std::uint64_t seed) {
  const auto active = g.active_vertices();
  return sequential_pick(g, active, k, exclusion, seed, LandmarkMethod::sparse_random);
}

int vertex_category(const TdGraph& g, VertexId v) {
  int c = g.node(v).category;
  for (ArcId a : g.out_arcs(v)) c = std::min(c, g.arc(a).category);
  for (ArcId a : g.in_arcs(v)) c = std::min(c, g.arc(a).category);
  return c;
}

LandmarkSet select_important_random(const TdGraph& g, std::size_t k, std::uint64_t seed,
                                    int category_threshold, std::size_t ball_size) {
  LandmarkSet set;
  set.method = LandmarkMethod::important_random;
  set.seed = seed;
  set.requested = k;
  std::mt19937_64 rng(seed);
  const auto active = g.active_vertices();
  Pool pool(g.num_vertices(), active);
  const auto ff = static_metric(g, MetricKind::free_flow);
  std::vector<bool> chosen(g.num_vertices(), false);
  while (set.vertices.size() < k && !pool.empty()) {
    const VertexId center = pool.draw(rng);
    const auto ball = free_flow_ball(g, ff, center, std::max<std::size_t>(ball_size, 1));
    int best = kNoCategory;
    for (VertexId w : ball) best = std::min(best, vertex_category(g, w));
    VertexId pick = center;
    if (best <= category_threshold && vertex_category(g, center) != best) {
      pick = kNoVertex;
      for (VertexId w : ball) {
        if (vertex_category(g, w) == best) pick = std::min(pick, w);
      }
    }
    if (chosen[pick]) continue;  // redraw
    chosen[pick] = true;
    set.vertices.push_back(pick);
  }
  set.partial = set.vertices.size() < k;
  return set;
}

std::vector<VertexId> partition_boundary(const TdGraph& g, const Partition& cells) {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (!g.is_active(v)) continue;
    bool boundary = false;
    for (ArcId a : g.out_arcs(v)) boundary = boundary || cells[g.arc(a).head] != cells[v];
    for (ArcId a : g.in_arcs(v)) boundary = boundary || cells[g.arc(a).tail] != cells[v];
    if (boundary) out.push_back(v);
  }
  return out;
}

LandmarkSet select_partition_boundary(const TdGraph& g, const Partition& cells) {
  LandmarkSet set;
  set.method = LandmarkMethod::partition;
  set.vertices = partition_boundary(g, cells);
  set.requested = set.vertices.size();
  set.partial = set.vertices.empty();
  return set;
}

LandmarkSet select_sparse_partition(const TdGraph& g, const Partition& cells, std::size_t k,
                                    std::size_t exclusion, std::uint64_t seed) {
  const auto boundary = partition_boundary(g, cells);
  return sequential_pick(g, boundary, k, exclusion, seed, LandmarkMethod::sparse_partition);
}

LandmarkSet select_hybrid(const TdGraph& g, const Partition& cells, std::size_t k,
                          std::uint64_t seed) {
  LandmarkSet set;
  set.method = LandmarkMethod::hybrid;
  set.seed = seed;
  set.requested = k;
  std::mt19937_64 rng(seed);
  std::vector<bool> chosen(g.num_vertices(), false);

  const auto boundary = partition_boundary(g, cells);
  Pool bpool(g.num_vertices(), boundary);
  const std::size_t want_boundary = (k + 1) / 2;
  while (set.vertices.size() < want_boundary && !bpool.empty()) {
    const VertexId v = bpool.draw(rng);
    chosen[v] = true;
    set.vertices.push_back(v);
  }

  std::map<std::int64_t, std::vector<VertexId>> by_cell;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (g.is_active(v) && !chosen[v]) by_cell[cells[v]].push_back(v);
  }
  std::vector<Pool> pools;
  for (auto& [cell, members] : by_cell) pools.emplace_back(g.num_vertices(), members);
  bool progress = true;
  while (set.vertices.size() < k && progress) {
    progress = false;
    for (auto& p : pools) {
      if (set.vertices.size() >= k) break;
      if (p.empty()) continue;
      set.vertices.push_back(p.draw(rng));
      progress = true;
    }
  }
  set.partial = set.vertices.size() < k;
  return set;
}

HierarchySpec scaled_hierarchy_spec(std::size_t n, std::size_t top_size) {
  constexpr double kSizes[] = {7685, 1604, 697, 270};
  constexpr double kCoverage[] = {1274, 29243, 154847, 292356};
  constexpr double kExclusion[] = {35, 150, 350, 800};
  constexpr double kReferenceN = 292356;
  HierarchySpec spec;
  for (int i = 0; i < 4; ++i) {
    spec.level_sizes.push_back(std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(kSizes[i] / kSizes[3] * static_cast<double>(top_size)))));
    spec.coverage_sizes.push_back(std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(kCoverage[i] / kReferenceN * static_cast<double>(n)))));
    spec.exclusion_sizes.push_back(std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(kExclusion[i] * static_cast<double>(n) / kReferenceN))));
  }
  spec.coverage_sizes.back() = n;
  return spec;
}

const HierarchyLandmark* LandmarkHierarchy::find(VertexId id) const {
  auto it = std::lower_bound(landmarks.begin(), landmarks.end(), id,
                             [](const HierarchyLandmark& l, VertexId v) { return l.id < v; });
  return (it != landmarks.end() && it->id == id) ? &*it : nullptr;
}

std::vector<VertexId> LandmarkHierarchy::level(int lvl) const {
  std::vector<VertexId> out;
  for (const auto& l : landmarks) {
    if (l.level == lvl) out.push_back(l.id);
  }
  return out;
}

namespace {

std::vector<VertexId> extended_coverage(const TdGraph& g, const StaticMetric& ff,
                                        const StaticMetric& fc, VertexId l, std::size_t size) {
  auto ball = static_dijkstra(g, ff, l, false, StopCriterion::with_size(size));
  std::vector<bool> in_ball(g.num_vertices(), false);
  for (const auto& s : ball.settled) in_ball[s.vertex] = true;

  Dijkstra congested(g, fc, l);
  std::size_t remaining = ball.settled.size();
  Seconds radius = 0;
  while (remaining > 0) {
    auto s = congested.next();
    if (!s) break;
    if (in_ball[s->vertex]) {
      radius = std::max(radius, s->label);
      --remaining;
    }
  }
  auto wide = static_dijkstra(g, ff, l, false, StopCriterion::with_radius(radius));
  std::vector<VertexId> out;
  out.reserve(wide.settled.size());
  for (const auto& s : wide.settled) out.push_back(s.vertex);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<VertexId> extended_coverage(const TdGraph& g, VertexId l, std::size_t size) {
  return extended_coverage(g, static_metric(g, MetricKind::free_flow),
                           static_metric(g, MetricKind::full_congestion), l, size);
}

LandmarkHierarchy build_hierarchy(const TdGraph& g, const HierarchySpec& spec) {
  const auto levels = spec.level_sizes.size();
  if (levels == 0 || spec.coverage_sizes.size() != levels ||
      (spec.sparse && spec.exclusion_sizes.size() != levels)) {
    throw std::invalid_argument("hierarchy spec needs equally many level, coverage and exclusion sizes");
  }
  for (std::size_t i = 1; i < levels; ++i) {
    if (spec.coverage_sizes[i] < spec.coverage_sizes[i - 1]) {
      throw std::invalid_argument("coverage sizes must not decrease with the level");
    }
  }
  LandmarkHierarchy h;
  h.num_levels = static_cast<int>(levels);
  const auto active = g.active_vertices();
  const auto ff = static_metric(g, MetricKind::free_flow);
  const auto fc = static_metric(g, MetricKind::full_congestion);
  std::vector<bool> taken(g.num_vertices(), false);
  for (std::size_t li = levels; li-- > 0;) {
    std::vector<VertexId> candidates;
    for (VertexId v : active) {
      if (!taken[v]) candidates.push_back(v);
    }
    const std::size_t excl = spec.sparse ? spec.exclusion_sizes[li] : 0;
    auto set = sequential_pick(g, candidates, spec.level_sizes[li], excl, spec.seed + li,
                               spec.sparse ? LandmarkMethod::sparse_random : LandmarkMethod::random);
    const bool top = li + 1 == levels;
    const auto target = static_cast<std::size_t>(
        std::ceil(static_cast<double>(spec.coverage_sizes[li]) * (1.0 + spec.xi)));
    for (VertexId l : set.vertices) {
      taken[l] = true;
      HierarchyLandmark hl;
      hl.id = l;
      hl.level = static_cast<int>(li) + 1;
      hl.coverage = top ? active : extended_coverage(g, ff, fc, l, target);
      h.landmarks.push_back(std::move(hl));
    }
  }
  h.coverage_targets = spec.coverage_sizes;
  std::sort(h.landmarks.begin(), h.landmarks.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return h;
}

}  // namespace tdo
