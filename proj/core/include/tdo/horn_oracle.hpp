#pragma once

#include <memory>
#include <vector>

#include "tdo/landmarks.hpp"
#include "tdo/oracle.hpp"

namespace tdo {

struct HornParams {
  double a = 1.0;       // sublinearity degree of the rank guess
  double beta = 1.0;    // early-stopping control
  double gamma = 1.88;  // guess escalation factor
  double xi = 0.1;      // coverage slackness
  int budget = 1;       // recursion budget of the level query

  void validate() const;
};

class HornOracle {
 public:
  /// Builds summaries of every landmark over its area of coverage.
  static HornOracle preprocess(const TdGraph& g, const LandmarkHierarchy& hierarchy,
                               const OracleConfig& cfg, const HornParams& params = {},
                               PreprocessStats* stats = nullptr);

  HornOracle(const TdGraph& g, std::shared_ptr<const SummaryStore> store, TrapConfig trap,
             HornParams params = {});

  /// One ball from (o, t) until d settles, early stopping fires, or an
  /// informed landmark of the appropriate level is met; the latter
  /// continues as a recursive query over landmarks of that level and above.
  QueryResult hqa(VertexId o, VertexId d, Seconds t) const;

  /// Level whose coverage suits a query with the given rank guess.
  int appropriate_level(double guess) const;
  int num_levels() const { return static_cast<int>(level_coverage_.size()); }
  /// Smallest stored coverage per level (1-based level at index level-1).
  const std::vector<std::size_t>& level_coverage() const { return level_coverage_; }

  const HornParams& params() const { return params_; }
  const OracleCore& core() const { return core_; }
  OracleCore& core() { return core_; }

 private:
  OracleCore core_;
  HornParams params_;
  std::vector<std::size_t> level_coverage_;
};

}  // namespace tdo
