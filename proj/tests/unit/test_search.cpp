#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "tdo/search.hpp"

using namespace tdo;
namespace tt = tdo::testing;

TEST(SearchProperty, TddMatchesLabelCorrecting) {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 30; ++it) {
    const auto g = tt::random_graph(rng, 80, 200);
    std::uniform_int_distribution<VertexId> pick(0, 79);
    std::uniform_real_distribution<double> when(0, 2 * 86400.0);
    const VertexId o = pick(rng);
    const double t = when(rng);
    const auto ref = tt::label_correcting(g, o, t);
    Dijkstra dj(g, o, t);
    while (dj.next()) {
    }
    for (VertexId v = 0; v < g.num_vertices(); ++v) EXPECT_NEAR(dj.label(v), ref[v], 1e-6 * ref[v]);
  }
}

TEST(SearchProperty, TddMatchesPathEnumerationOnTinyGraphs) {
  std::mt19937_64 rng(32);
  for (int it = 0; it < 40; ++it) {
    const auto g = tt::random_graph(rng, 7, 12);
    std::uniform_int_distribution<VertexId> pick(0, 6);
    std::uniform_real_distribution<double> when(0, 86400.0);
    const VertexId o = pick(rng), d = pick(rng);
    const double t = when(rng);
    EXPECT_EQ(td_distance(g, o, d, t), tt::enumerate_paths(g, o, d, t));
  }
}

TEST(SearchProperty, SettleOrderIsNonDecreasingAndPathsRealiseLabels) {
  std::mt19937_64 rng(33);
  const auto g = tt::random_graph(rng, 120, 300);
  const auto res = tdd(g, 5, 30000.0, StopCriterion{});
  EXPECT_EQ(res.rank(), 120u);
  for (std::size_t i = 1; i < res.settled.size(); ++i) {
    EXPECT_LE(res.settled[i - 1].label, res.settled[i].label);
  }
  for (VertexId v : {VertexId(0), VertexId(60), VertexId(119)}) {
    double t = 30000.0;
    VertexId at = 5;
    for (ArcId a : res.path_to(g, v)) {
      EXPECT_EQ(g.arc(a).tail, at);
      t = g.arrival(a, t);
      at = g.arc(a).head;
    }
    EXPECT_EQ(at, v);
    EXPECT_EQ(t, *res.label_of(v));
  }
}

TEST(SearchProperty, StaticDistancesMatchBellmanFord) {
  std::mt19937_64 rng(34);
  for (int it = 0; it < 20; ++it) {
    const auto g = tt::random_graph(rng, 60, 150);
    for (auto kind : {MetricKind::free_flow, MetricKind::full_congestion}) {
      const auto m = static_metric(g, kind);
      for (bool backward : {false, true}) {
        const auto got = static_distances(g, m, 3, backward);
        const auto want = tt::bellman_ford(g, m.weight, 3, backward);
        for (VertexId v = 0; v < 60; ++v) EXPECT_NEAR(got[v], want[v], 1e-9);
      }
    }
  }
}

TEST(Search, StopCriteria) {
  std::mt19937_64 rng(35);
  const auto g = tt::random_graph(rng, 100, 200);
  auto r = tdd(g, 0, 0.0, StopCriterion::with_size(10));
  EXPECT_EQ(r.rank(), 10u);
  EXPECT_EQ(r.reason, StopReason::size_reached);

  r = tdd(g, 0, 0.0, StopCriterion::to_target(42));
  EXPECT_EQ(r.reason, StopReason::target_settled);
  EXPECT_EQ(r.settled.back().vertex, 42u);

  r = tdd(g, 0, 1000.0, StopCriterion::with_radius(500.0));
  EXPECT_EQ(r.reason, StopReason::radius_exceeded);
  for (const auto& s : r.settled) EXPECT_LE(s.label - 1000.0, 500.0);
  const auto full = tdd(g, 0, 1000.0, StopCriterion{});
  for (const auto& s : full.settled) {
    if (s.label - 1000.0 <= 500.0) EXPECT_TRUE(r.settled_vertex(s.vertex));
  }

  auto odd = [](VertexId v) { return v % 2 == 1; };
  r = tdd(g, 0, 0.0, StopCriterion::landmarks(3, odd));
  EXPECT_EQ(r.reason, StopReason::landmarks_settled);
  std::size_t seen = 0;
  for (const auto& s : r.settled) seen += odd(s.vertex);
  EXPECT_EQ(seen, 3u);
  EXPECT_TRUE(odd(r.settled.back().vertex));
}

TEST(Search, UnreachableTargetExhausts) {
  TdGraph g(3, 86400);
  g.add_arc(0, 1, Ttf(86400, 10));
  EXPECT_FALSE(td_distance(g, 0, 2, 0).has_value());
  const auto r = tdd(g, 0, 0, StopCriterion::to_target(2));
  EXPECT_EQ(r.reason, StopReason::exhausted);
  EXPECT_EQ(r.rank(), 2u);
}

TEST(Search, NearestLandmarkBall) {
  std::mt19937_64 rng(36);
  const auto g = tt::random_graph(rng, 50, 100);
  auto is_l = [](VertexId v) { return v == 17 || v == 33; };
  const auto nl = grow_ball_to_nearest_landmark(g, 0, 0.0, is_l);
  ASSERT_TRUE(nl.has_value());
  const auto d17 = *td_distance(g, 0, 17, 0.0), d33 = *td_distance(g, 0, 33, 0.0);
  EXPECT_EQ(nl->landmark, d17 <= d33 ? 17u : 33u);
  EXPECT_DOUBLE_EQ(nl->distance, std::min(d17, d33));
  EXPECT_FALSE(grow_ball_to_nearest_landmark(g, 0, 0.0, [](VertexId) { return false; }).has_value());
}
