#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdo/codec.hpp"
#include "tdo/patch.hpp"
#include "tdo/search.hpp"
#include "tdo/store.hpp"
#include "tdo/trap.hpp"

namespace tdo {

enum class Exactness { exact, via_landmark, unreachable };
enum class Guarantee { exact, eps_psi, sigma, none };

const char* to_string(Exactness e);
const char* to_string(Guarantee g);

/// Stretch bound of the recursive query for budget r:
/// eps * q^(r+1) / (q^(r+1) - 1) with q = 1 + eps / psi.
double rqa_sigma(double epsilon, double psi, int r);

struct QueryResult {
  std::optional<Seconds> value;  // travel time; empty when unreachable
  Exactness exactness = Exactness::unreachable;
  Guarantee guarantee = Guarantee::none;
  std::size_t rank = 0;  // vertices settled over all balls
  /// Landmark of the returned value; kNoVertex when a recursion sub-ball
  /// reached d, and the value is the travel time of `path`.
  VertexId landmark = kNoVertex;
  std::vector<VertexId> landmarks;  // informed landmarks that produced candidates
  /// Exact answers: the full path. Via-landmark answers: the path to the
  /// landmark (or to the sub-ball centre and on to it).
  std::vector<ArcId> path;
  std::string exit;  // which rule ended the query
};

struct OracleConfig {
  TrapConfig trap;
  CodecConfig codec;
  unsigned threads = 0;  // 0 picks the hardware concurrency
};

struct PreprocessStats {
  std::size_t landmarks = 0;
  std::size_t tdd_runs = 0;
  std::size_t settled = 0;
  std::size_t refined_intervals = 0;
  double seconds = 0.0;
};

/// State shared by the flat and the hierarchical oracle: graph, encoded
/// summaries and the live patch board.
class OracleCore {
 public:
  OracleCore(const TdGraph& g, std::shared_ptr<const SummaryStore> store, TrapConfig trap);

  const TdGraph& graph() const { return *g_; }
  const SummaryStore& store() const { return *store_; }
  std::shared_ptr<const SummaryStore> store_ptr() const { return store_; }
  const TrapConfig& trap() const { return trap_; }
  double epsilon() const { return trap_.epsilon; }

  bool is_landmark(VertexId v) const { return v < slot_.size() && slot_[v] >= 0; }
  int level(VertexId v) const;
  std::vector<VertexId> landmarks() const;

  /// Whether l stores a summary for d.
  bool informed(VertexId l, VertexId d) const;
  /// Summary of l -> d evaluated at the absolute arrival time at l; patches
  /// covering that time take precedence.
  std::optional<Seconds> summary_value(const PatchSet* patches, VertexId l, VertexId d, Seconds at) const;

  std::shared_ptr<const PatchSet> patches() const { return board_->snapshot(); }
  void publish_patches(std::shared_ptr<const PatchSet> next) { board_->publish(std::move(next)); }

 private:
  const TdGraph* g_;
  std::shared_ptr<const SummaryStore> store_;
  TrapConfig trap_;
  std::vector<long> slot_;  // -1 for non-landmarks
  std::shared_ptr<PatchBoard> board_;
};

/// Encodes the summaries of each landmark over `coverage(i)` into a store.
/// Landmarks are processed by a pool of worker threads.
SummaryStore build_store(const TdGraph& g, std::span<const VertexId> landmarks,
                         const std::vector<std::vector<VertexId>>* coverage,
                         const std::vector<int>* levels, const OracleConfig& cfg, bool horn,
                         PreprocessStats* stats = nullptr);

class FlatOracle {
 public:
  /// Builds summaries from every landmark to every reachable active vertex.
  static FlatOracle preprocess(const TdGraph& g, std::span<const VertexId> landmarks,
                               const OracleConfig& cfg, PreprocessStats* stats = nullptr);

  FlatOracle(const TdGraph& g, std::shared_ptr<const SummaryStore> store, TrapConfig trap);

  QueryResult fca(VertexId o, VertexId d, Seconds t) const;
  QueryResult fca_plus(VertexId o, VertexId d, Seconds t, std::size_t n = 6) const;
  QueryResult rqa(VertexId o, VertexId d, Seconds t, int r = 1) const;

  const OracleCore& core() const { return core_; }
  OracleCore& core() { return core_; }

 private:
  OracleCore core_;
};

}  // namespace tdo
