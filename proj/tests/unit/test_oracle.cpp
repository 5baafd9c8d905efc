#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <memory>
#include <random>

#include "support/oracles.hpp"
#include "tdo/landmarks.hpp"
#include "tdo/oracle.hpp"

using namespace tdo;
namespace tt = tdo::testing;

namespace {

constexpr double kPeriod = 86400.0;

struct Instance {
  std::unique_ptr<TdGraph> graph;  // the oracle points into it
  const TdGraph& g;
  std::vector<VertexId> landmarks;
  FlatOracle oracle;
};

Instance make(std::uint64_t seed, std::size_t n, std::size_t k, std::size_t isolated = 0) {
  std::mt19937_64 rng(seed);
  const auto base = tt::random_graph(rng, n, 2 * n, 0.5, kPeriod);
  auto g = std::make_unique<TdGraph>(n + isolated, kPeriod);
  for (ArcId a = 0; a < base.num_arcs(); ++a) g->add_arc(base.arc(a).tail, base.arc(a).head, base.arc(a).ttf);
  // isolated vertices are entered by a single one-way arc
  for (std::size_t i = 0; i < isolated; ++i) g->add_arc(static_cast<VertexId>(n + i), 0, Ttf(kPeriod, 60));
  const auto lm = select_random(*g, k, seed).vertices;
  OracleConfig cfg;
  cfg.threads = 2;
  auto oracle = FlatOracle::preprocess(*g, lm, cfg);
  const TdGraph& ref = *g;
  return {std::move(g), ref, lm, std::move(oracle)};
}

/// Travel time of `path` from (o, t), arc by arc.
double walk(const TdGraph& g, const std::vector<ArcId>& path, double t, VertexId* end) {
  double now = t;
  for (auto a : path) {
    now += tt::arc_delay(g, a, now);
    *end = g.arc(a).head;
  }
  return now;
}

}  // namespace

TEST(Oracle, SigmaOfTheRecursiveQuery) {
  // q = 1.1: 0.1 * 1.21 / 0.21
  EXPECT_NEAR(rqa_sigma(0.1, 1.0, 1), 0.1 * 1.21 / 0.21, 1e-12);
  EXPECT_NEAR(rqa_sigma(0.1, 1.0, 0), 0.1 * 1.1 / 0.1, 1e-12);
  EXPECT_LT(rqa_sigma(0.1, 1.0, 3), rqa_sigma(0.1, 1.0, 2));
}

TEST(OracleProperty, AnswersNeverUnderestimate) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto inst = make(seed, 150, 8);
    std::mt19937_64 rng(seed * 17);
    std::uniform_int_distribution<VertexId> pick(0, 149);
    std::uniform_real_distribution<double> when(0, 2 * kPeriod);
    for (int q = 0; q < 60; ++q) {
      const VertexId o = pick(rng), d = pick(rng);
      const double t = when(rng);
      const auto truth = tt::lc_distance(inst.g, o, d, t);
      ASSERT_TRUE(truth);
      for (const auto& r : {inst.oracle.fca(o, d, t), inst.oracle.fca_plus(o, d, t, 3), inst.oracle.rqa(o, d, t, 1),
                            inst.oracle.rqa(o, d, t, 3)}) {
        ASSERT_TRUE(r.value);
        EXPECT_GE(*r.value, *truth - 1e-6) << o << "->" << d << " exit " << r.exit;
        if (r.exactness == Exactness::exact) {
          EXPECT_NEAR(*r.value, *truth, 1e-6);
          EXPECT_EQ(r.guarantee, Guarantee::exact);
        }
      }
    }
  }
}

TEST(OracleProperty, ValuesFollowTheirPaths) {
  auto inst = make(4, 120, 6);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<VertexId> pick(0, 119);
  for (int q = 0; q < 80; ++q) {
    const VertexId o = pick(rng), d = pick(rng);
    const double t = 3600.0 * (q % 24);
    for (const auto& r : {inst.oracle.fca(o, d, t), inst.oracle.rqa(o, d, t, 2)}) {
      VertexId end = o;
      const double arrive = walk(inst.g, r.path, t, &end);
      if (r.exactness == Exactness::exact) {
        EXPECT_EQ(end, d);
        EXPECT_NEAR(arrive - t, *r.value, 1e-6);
      } else {
        ASSERT_EQ(r.exactness, Exactness::via_landmark);
        if (r.landmark == kNoVertex) {
          EXPECT_EQ(end, d);
          EXPECT_NEAR(*r.value, arrive - t, 1e-6);
          continue;
        }
        EXPECT_EQ(end, r.landmark);
        const auto summary = inst.oracle.core().store().summary(r.landmark, d);
        ASSERT_TRUE(summary);
        EXPECT_NEAR(*r.value, arrive - t + summary->eval(arrive), 1e-6);
      }
    }
  }
}

TEST(OracleProperty, MoreWorkNeverHurts) {
  auto inst = make(5, 150, 10);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<VertexId> pick(0, 149);
  for (int q = 0; q < 60; ++q) {
    const VertexId o = pick(rng), d = pick(rng);
    const double t = 1800.0 * q;
    const auto f = inst.oracle.fca(o, d, t);
    const auto f1 = inst.oracle.fca_plus(o, d, t, 1);
    EXPECT_EQ(f1.value, f.value);
    EXPECT_EQ(f1.rank, f.rank);
    EXPECT_EQ(f1.landmark, f.landmark);
    double prev = *f.value;
    for (std::size_t n = 2; n <= 6; ++n) {
      const auto fp = inst.oracle.fca_plus(o, d, t, n);
      EXPECT_LE(*fp.value, prev + 1e-9);
      prev = *fp.value;
    }
    const auto r = inst.oracle.rqa(o, d, t, 1);
    EXPECT_LE(*r.value, *f.value + 1e-9);
    EXPECT_GE(r.rank, f.rank);
  }
}

TEST(Oracle, ExactWhenDestinationIsInsideTheBall) {
  auto inst = make(6, 100, 4);
  for (VertexId o = 0; o < 100; o += 7) {
    const auto r = inst.oracle.fca(o, o, 500);
    EXPECT_EQ(r.exactness, Exactness::exact);
    EXPECT_EQ(*r.value, 0.0);
  }
  // a landmark as the origin: the ball settles it first, so the answer is
  // exact only if d is settled before it, otherwise via the landmark itself
  const VertexId l = inst.landmarks[0];
  const auto r = inst.oracle.fca(l, (l + 50) % 100, 0);
  EXPECT_EQ(r.landmark == l, r.exactness == Exactness::via_landmark);
}

TEST(Oracle, UnreachableDestination) {
  auto inst = make(7, 50, 3, 1);
  const auto r = inst.oracle.fca(0, 50, 0);
  EXPECT_FALSE(r.value);
  EXPECT_EQ(r.exactness, Exactness::unreachable);
  EXPECT_EQ(r.exit, "exhausted");
  EXPECT_FALSE(inst.oracle.rqa(0, 50, 0, 2).value);
  const auto back = inst.oracle.fca(50, 0, 0);
  EXPECT_EQ(back.exactness, Exactness::exact);
  EXPECT_EQ(*back.value, 60.0);
}

TEST(Oracle, InvalidEndpointsThrow) {
  auto inst = make(8, 30, 2);
  EXPECT_THROW(inst.oracle.fca(30, 0, 0), std::exception);
  EXPECT_THROW(inst.oracle.rqa(0, 99, 0, 1), std::exception);
}

TEST(Oracle, StoreRoundTripGivesIdenticalAnswers) {
  auto inst = make(9, 100, 5);
  const auto path = (std::filesystem::temp_directory_path() / "tdo_oracle_store").string();
  inst.oracle.core().store().save(path);
  const FlatOracle again(inst.g, std::make_shared<const SummaryStore>(SummaryStore::load(path)), TrapConfig{});
  std::filesystem::remove(path);
  for (VertexId o = 0; o < 100; o += 9) {
    for (VertexId d = 0; d < 100; d += 11) {
      const auto a = inst.oracle.rqa(o, d, 40000, 1), b = again.rqa(o, d, 40000, 1);
      EXPECT_EQ(a.value, b.value);
      EXPECT_EQ(a.rank, b.rank);
    }
  }
}

TEST(Oracle, PreprocessStatsCountEveryLandmark) {
  std::mt19937_64 rng(10);
  const auto g = tt::random_graph(rng, 80, 80, 0.5, kPeriod);
  PreprocessStats stats;
  OracleConfig cfg;
  cfg.threads = 3;
  const std::vector<VertexId> lm{1, 2, 3, 50};
  const auto o = FlatOracle::preprocess(g, lm, cfg, &stats);
  EXPECT_EQ(stats.landmarks, 4u);
  EXPECT_GE(stats.tdd_runs, 4u * 96u);
  EXPECT_EQ(o.core().landmarks(), lm);
  for (auto l : lm) EXPECT_TRUE(o.core().informed(l, 79));
  EXPECT_FALSE(o.core().informed(0, 79));
}
