#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdo/graph.hpp"

namespace tdo {

enum class LandmarkMethod { random, sparse_random, important_random, partition, sparse_partition, hybrid };

const char* to_string(LandmarkMethod m);
LandmarkMethod parse_landmark_method(const std::string& name);  // "R", "SR", "IR", "K", "SK", "H"

struct LandmarkSet {
  LandmarkMethod method = LandmarkMethod::random;
  std::vector<VertexId> vertices;  // selection order
  std::uint64_t seed = 0;
  std::size_t exclusion = 0;
  std::size_t requested = 0;
  bool partial = false;  // fewer than requested could be selected

  bool contains(VertexId v) const;
};

/// Cell id per vertex; -1 marks vertices absent from the file.
using Partition = std::vector<std::int64_t>;

/// Reads "<vertex> <cell>" lines; every active vertex needs a cell.
Partition read_partition(std::istream& in, const TdGraph& g);
Partition load_partition(const std::string& path, const TdGraph& g);

LandmarkSet select_random(const TdGraph& g, std::size_t k, std::uint64_t seed);

/// Sequential random picks; each pick removes itself and its `exclusion`
/// closest vertices (forward free-flow) from the pool.
LandmarkSet select_sparse_random(const TdGraph& g, std::size_t k, std::size_t exclusion,
                                 std::uint64_t seed);

/// Random picks moved to the most important vertex of a free-flow ball of
/// `ball_size` vertices around them. A vertex's importance is the lowest
/// category among itself and its incident arcs; relocation happens only
/// when that category is at most `category_threshold`.
LandmarkSet select_important_random(const TdGraph& g, std::size_t k, std::uint64_t seed,
                                    int category_threshold = 3, std::size_t ball_size = 30);

std::vector<VertexId> partition_boundary(const TdGraph& g, const Partition& cells);

LandmarkSet select_partition_boundary(const TdGraph& g, const Partition& cells);

LandmarkSet select_sparse_partition(const TdGraph& g, const Partition& cells, std::size_t k,
                                    std::size_t exclusion, std::uint64_t seed);

/// ceil(k/2) boundary vertices plus floor(k/2) picks spread round-robin
/// over the cells.
LandmarkSet select_hybrid(const TdGraph& g, const Partition& cells, std::size_t k,
                          std::uint64_t seed);

/// Lowest category among v and its incident active arcs.
int vertex_category(const TdGraph& g, VertexId v);

struct HierarchySpec {
  // index 0 is the lowest level; the last level covers the whole graph
  std::vector<std::size_t> level_sizes;
  std::vector<std::size_t> coverage_sizes;
  std::vector<std::size_t> exclusion_sizes;
  bool sparse = true;  // HSR when true, HR otherwise
  double xi = 0.1;
  std::uint64_t seed = 1;
};

/// Four levels scaled from the reference road network: level sizes in
/// proportion to 7685/1604/697/270 with `top_size` on top, coverage and
/// exclusion sizes in proportion to the vertex count.
HierarchySpec scaled_hierarchy_spec(std::size_t n, std::size_t top_size);

struct HierarchyLandmark {
  VertexId id = kNoVertex;
  int level = 0;  // 1-based
  std::vector<VertexId> coverage;  // ascending
};

struct LandmarkHierarchy {
  std::vector<HierarchyLandmark> landmarks;  // ascending id
  int num_levels = 0;
  std::vector<std::size_t> coverage_targets;  // per level, before extension

  const HierarchyLandmark* find(VertexId id) const;
  std::vector<VertexId> level(int level) const;
};

LandmarkHierarchy build_hierarchy(const TdGraph& g, const HierarchySpec& spec);

/// Free-flow ball of `size` vertices around l, widened to the free-flow
/// radius equal to the largest full-congestion distance from l to the
/// ball's members.
std::vector<VertexId> extended_coverage(const TdGraph& g, VertexId l, std::size_t size);

}  // namespace tdo
