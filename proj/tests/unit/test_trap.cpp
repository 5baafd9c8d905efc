#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "tdo/search.hpp"
#include "tdo/trap.hpp"

using namespace tdo;
namespace tt = tdo::testing;

TEST(Trap, ConfigValidation) {
  TrapConfig c;
  EXPECT_NO_THROW(c.validate(86400));
  c.tau = 1000;
  EXPECT_THROW(c.validate(86400), std::invalid_argument);
  c.tau = 900;
  c.epsilon = 0;
  EXPECT_THROW(c.validate(86400), std::invalid_argument);
}

TEST(Trap, LowerEnvelopeOfCrossingLines) {
  const std::vector<Line> lines{{0, 100, 0.1}, {100, 100, -0.1}};
  const auto env = lower_envelope(lines, 0, 100);
  ASSERT_EQ(env.size(), 3u);
  EXPECT_DOUBLE_EQ(env[0].delay, 100);
  EXPECT_DOUBLE_EQ(env[1].time, 50);
  EXPECT_DOUBLE_EQ(env[1].delay, 105);
  EXPECT_DOUBLE_EQ(env[2].delay, 100);
}

TEST(Trap, TrapezoidPeakMatchesLineIntersection) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> d(50, 500), s(0, 0.3);
  for (int it = 0; it < 200; ++it) {
    const double ds = d(rng), df = d(rng), up = s(rng), down = s(rng);
    const double ts = 900, tf = 1800;
    // rising line ds + up (t - ts) meets falling line df - down (t - tf)
    double peak;
    if (up + down == 0) {
      peak = std::min(ds, df);
    } else {
      const double x = (df - ds + up * ts + down * tf) / (up + down);
      const double xc = std::clamp(x, ts, tf);
      peak = std::min(ds + up * (xc - ts), df - down * (xc - tf));
    }
    EXPECT_NEAR(trap_peak_overshoot(ds, df, ts, tf, {down, up}), peak - std::min(ds, df), 1e-9);
    for (const auto& p : trap_interval(ds, df, ts, tf, {down, up})) {
      EXPECT_LE(p.delay, std::max(ds, df) + (tf - ts) * std::max(up, down) + 1e-9);
    }
  }
}

namespace {

void check_set(const TdGraph& g, const SummarySet& set, double& worst_ratio) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> when(0, g.period());
  for (int k = 0; k < 60; ++k) {
    const double t = when(rng);
    const auto arr = tt::label_correcting(g, set.landmark, t);
    for (const auto& s : set.summaries) {
      const double D = arr[s.destination] - t;
      const double up = s.upper.eval(t);
      ASSERT_GE(up, D - 1e-6) << "destination " << s.destination << " at " << t;
      if (D > 0) worst_ratio = std::max(worst_ratio, up / D);
    }
  }
}

}  // namespace

TEST(TrapProperty, SummariesUpperBoundTravelTimes) {
  std::mt19937_64 rng(42);
  double worst = 1.0;
  for (int it = 0; it < 6; ++it) {
    const auto g = tt::random_graph(rng, 80, 160, 0.6);
    const auto cov = g.active_vertices();
    TrapConfig cfg;
    const auto set = build_summaries(g, static_cast<VertexId>(it), cov, cfg);
    EXPECT_EQ(set.summaries.size(), 80u);
    check_set(g, set, worst);
  }
  EXPECT_LE(worst, 1.1 + 1e-9);
}

TEST(TrapProperty, SteepProfilesForceRefinementAndStaySound) {
  std::mt19937_64 rng(43);
  TdGraph g(30, 86400);
  for (VertexId v = 0; v + 1 < 30; ++v) {
    g.add_arc(v, v + 1, Ttf(86400, tt::random_points(rng, 86400, 12, 600, 0.4, 0.4)));
    g.add_arc(v + 1, v, Ttf(86400, 300));
  }
  const auto set = build_summaries(g, 0, g.active_vertices(), TrapConfig{});
  EXPECT_GT(set.stats.refined_intervals, 0u);
  double worst = 1.0;
  check_set(g, set, worst);
  EXPECT_LE(worst, 1.1 + 1e-9);
}

TEST(Trap, ConstantGraphSummariesAreExact) {
  std::mt19937_64 rng(44);
  const auto g = tt::random_graph(rng, 40, 80, 0.0);
  const auto set = build_summaries(g, 0, g.active_vertices(), TrapConfig{});
  const auto dist = tt::bellman_ford(g, tt::arc_extreme(g, false), 0);
  for (const auto& s : set.summaries) {
    EXPECT_TRUE(s.upper.is_constant());
    EXPECT_DOUBLE_EQ(s.upper.eval(0), dist[s.destination]);
  }
}

TEST(Trap, RefsAreAnchorShifts) {
  std::mt19937_64 rng(45);
  const auto g = tt::random_graph(rng, 100, 150, 0.3);
  const auto set = build_summaries(g, 0, g.active_vertices(), TrapConfig{});
  std::size_t refs = 0;
  for (const auto& s : set.summaries) {
    if (!s.ref) continue;
    ++refs;
    const auto* a = set.find(s.ref->anchor);
    ASSERT_NE(a, nullptr);
    EXPECT_FALSE(a->ref.has_value());
    EXPECT_NE(s.ref->anchor, s.destination);
    EXPECT_EQ(s.upper, a->upper.shifted(s.ref->offset));
  }
  EXPECT_GT(refs, 0u);
}

TEST(Trap, CoverageRestrictsDestinations) {
  std::mt19937_64 rng(46);
  const auto g = tt::random_graph(rng, 50, 80);
  const std::vector<VertexId> cov{0, 3, 7, 20};
  const auto set = build_summaries(g, 3, cov, TrapConfig{});
  ASSERT_EQ(set.summaries.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(set.summaries[i].destination, cov[i]);
}

TEST(Trap, WindowSummariesMatchFullBuildInsideTheWindow) {
  std::mt19937_64 rng(47);
  const auto g = tt::random_graph(rng, 60, 120, 0.6);
  const auto cov = g.active_vertices();
  const auto full = build_summaries(g, 2, cov, TrapConfig{});
  const auto w = build_window_summaries(g, 2, cov, TrapConfig{}, 30000, 34000);
  EXPECT_LE(w.start, 30000);
  EXPECT_GE(w.end, 34000);
  EXPECT_EQ(std::fmod(w.start, 900.0), 0.0);
  ASSERT_EQ(w.destinations.size(), full.summaries.size());
  for (std::size_t i = 0; i < w.destinations.size(); ++i) {
    const auto& pts = w.points[i];
    EXPECT_EQ(pts.front().time, w.start);
    EXPECT_EQ(pts.back().time, w.end);
    for (const auto& p : pts) EXPECT_NEAR(p.delay, full.summaries[i].upper.eval(p.time), 1e-6);
  }
}
