#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tdo/graph.hpp"
#include "tdo/oracle.hpp"

namespace tdo {

enum class InstanceKind { grid, ring, random_planar };
const char* to_string(InstanceKind k);
InstanceKind parse_instance_kind(const std::string& s);

struct GeneratorSpec {
  InstanceKind kind = InstanceKind::grid;
  std::size_t n = 100;
  double td_fraction = 0.12;  // share of road segments with a time-dependent profile
  std::size_t breakpoints = 8;  // per time-dependent arc
  std::uint64_t seed = 1;
  Seconds period = kDefaultPeriod;
  bool symmetric = false;  // both directions of a segment share one profile
};

/// Connected road-like instance. Delays and breakpoint times are whole
/// seconds so that sums of constant delays stay exact.
TdGraph generate_instance(const GeneratorSpec& spec);

struct AssumptionReport {
  std::size_t samples = 0;
  double zeta_avg = 1.0;
  double zeta_max = 1.0;
  double lambda_max = 0.0;      // steepest rise of a sampled travel-time profile
  double neg_lambda_min = 0.0;  // steepest fall, as a non-negative number
};

/// Samples random (o, d, t): zeta is the ratio of the two directions'
/// travel times; slopes are finite differences of D[o, d] over `step`.
AssumptionReport validate_assumptions(const TdGraph& g, std::size_t samples, std::uint64_t seed,
                                      Seconds step = 900.0);

struct BlowupRow {
  std::size_t f = 0;
  double avg_size = 0.0;
  std::size_t max_size = 0;
  double avg_ratio = 0.0;
  double max_ratio = 0.0;
};

/// Free-flow balls of F vertices extended until the free-flow radius
/// reaches the largest full-congestion distance to their members.
std::vector<BlowupRow> freeflow_blowup(const TdGraph& g, std::span<const VertexId> origins,
                                       std::span<const std::size_t> f_values);

enum class RangeClass { any, short_range, mid_range, long_range };
const char* to_string(RangeClass r);

struct Query {
  VertexId origin = kNoVertex;
  VertexId destination = kNoVertex;
  Seconds departure = 0.0;
  RangeClass range = RangeClass::any;
};

struct QuerySpec {
  std::size_t count = 1000;
  Seconds from = 9 * 3600.0;
  Seconds to = 20 * 3600.0;
  std::uint64_t seed = 1;
  RangeClass range = RangeClass::any;
};

/// Random queries; a range class draws d from the matching band of the
/// Dijkstra rank of (o, t): short up to n/100, mid up to n/10, long beyond.
std::vector<Query> make_queries(const TdGraph& g, const QuerySpec& spec);
/// Equal thirds of short, mid and long queries.
std::vector<Query> make_mixed_queries(const TdGraph& g, QuerySpec spec);

struct Algorithm {
  std::string name;
  std::function<QueryResult(const Query&)> run;
};

struct BenchRow {
  std::size_t query = 0;
  std::string algorithm;
  double value = 0.0;  // NaN when unanswered
  double truth = 0.0;  // NaN without ground truth or when unreachable
  double error = 0.0;  // relative error against the truth
  std::size_t rank = 0;
  std::size_t truth_rank = 0;
  bool exact = false;
  double micros = 0.0;
};

struct AlgorithmSummary {
  std::string name;
  std::size_t queries = 0;
  std::size_t answered = 0;
  std::size_t exact = 0;
  std::size_t underestimates = 0;
  double mean_error = 0.0;
  double max_error = 0.0;
  double mean_rank = 0.0;
  double median_rank = 0.0;
  double mean_truth_rank = 0.0;
  double speedup = 0.0;  // mean truth rank / mean rank
  double mean_micros = 0.0;
};

struct BenchReport {
  std::vector<AlgorithmSummary> summaries;
  std::vector<BenchRow> rows;
};

/// Runs every algorithm on every query, optionally against time-dependent
/// Dijkstra on `g`. Queries run on `threads` workers (0: hardware count).
BenchReport run_benchmark(const TdGraph& g, std::span<const Query> queries,
                          std::span<const Algorithm> algorithms, bool ground_truth, unsigned threads = 0);

void write_rows_csv(const BenchReport& r, std::ostream& out);
void write_summary_csv(const BenchReport& r, std::ostream& out);

}  // namespace tdo
