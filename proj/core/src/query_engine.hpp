#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "tdo/oracle.hpp"

namespace tdo::detail {

/// Landmarks a query may use for its destination.
using Usable = std::function<bool(VertexId)>;

/// One query: the origin ball plus the candidate via-landmark values found
/// so far. The origin ball can be resumed at any point.
class QueryRun {
 public:
  QueryRun(const OracleCore& core, VertexId o, VertexId d, Seconds t);

  /// Settles the next origin-ball vertex; sets `exact()` when it is d.
  std::optional<Settled> settle();
  bool exact() const { return exact_; }
  bool has_candidate() const { return best_ != kNone; }
  std::size_t candidates() const { return landmarks_.size(); }
  Seconds radius() const { return radius_; }
  std::size_t ball_rank() const { return ball_.rank(); }

  /// Adds the via-landmark value of l reached at absolute time `arrival`
  /// (origin-ball landmarks only). False when l is unusable or seen.
  bool offer(VertexId l, Seconds arrival, const Usable& usable);
  /// Smallest origin-to-landmark travel time among candidates.
  std::optional<Seconds> nearest_candidate_distance() const { return nearest_; }

  /// Spends the recursion budget: each unit settles the next boundary
  /// vertex w of the origin ball and grows a ball from (w, arrival at w)
  /// to the closest usable landmark not yet used. Returns true when the
  /// origin ball settles d.
  bool expand(int budget, const Usable& usable);

  QueryResult result(Guarantee via_guarantee, const char* exit) const;

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  struct Candidate {
    Seconds value;
    VertexId landmark;
    std::vector<ArcId> path;
  };

  void add_candidate(Seconds value, VertexId landmark, std::vector<ArcId> path, Seconds to_landmark);
  bool seen(VertexId l) const;

  const OracleCore& core_;
  VertexId o_;
  VertexId d_;
  Seconds t_;
  std::shared_ptr<const PatchSet> patches_;
  const TdGraph* g_;
  Dijkstra ball_;
  bool exact_ = false;
  bool exhausted_ = false;
  Seconds radius_ = 0.0;
  std::size_t extra_rank_ = 0;
  std::vector<Candidate> cands_;
  std::vector<VertexId> landmarks_;
  std::size_t best_ = kNone;
  std::optional<Seconds> nearest_;
};

}  // namespace tdo::detail
