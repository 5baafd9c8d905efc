#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <set>

#include "support/oracles.hpp"
#include "tdo/bench.hpp"
#include "tdo/horn_oracle.hpp"

using namespace tdo;
namespace tt = tdo::testing;

namespace {

TdGraph grid(std::size_t n, std::uint64_t seed) {
  GeneratorSpec s;
  s.n = n;
  s.seed = seed;
  return generate_instance(s);
}

OracleConfig config() {
  OracleConfig c;
  c.threads = 2;
  return c;
}

}  // namespace

TEST(Horn, DefaultParameters) {
  const HornParams p;
  EXPECT_EQ(p.a, 1.0);
  EXPECT_EQ(p.beta, 1.0);
  EXPECT_EQ(p.gamma, 1.88);
  EXPECT_EQ(p.xi, 0.1);
  EXPECT_NO_THROW(p.validate());
  auto bad = p;
  bad.gamma = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.beta = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Horn, SingleLevelMatchesTheRecursiveQuery) {
  const auto g = grid(400, 11);
  const auto lm = select_sparse_random(g, 12, 10, 3).vertices;
  LandmarkHierarchy h;
  h.num_levels = 1;
  for (auto l : lm) h.landmarks.push_back({l, 1, g.active_vertices()});
  std::sort(h.landmarks.begin(), h.landmarks.end(), [](auto& a, auto& b) { return a.id < b.id; });
  const auto horn = HornOracle::preprocess(g, h, config());
  const auto flat = FlatOracle::preprocess(g, lm, config());
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<VertexId> pick(0, 399);
  for (int q = 0; q < 150; ++q) {
    const VertexId o = pick(rng), d = pick(rng);
    const double t = 600.0 * q;
    const auto a = horn.hqa(o, d, t);
    const auto b = flat.rqa(o, d, t, 1);
    ASSERT_EQ(a.value, b.value) << o << "->" << d;
    EXPECT_EQ(a.rank, b.rank);
    EXPECT_EQ(a.landmark, b.landmark);
    EXPECT_EQ(a.path, b.path);
    EXPECT_EQ(a.exactness, b.exactness);
  }
}

class HornHierarchy : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    g_ = new TdGraph(grid(900, 12));
    auto spec = scaled_hierarchy_spec(900, 6);
    h_ = new LandmarkHierarchy(build_hierarchy(*g_, spec));
    oracle_ = new HornOracle(HornOracle::preprocess(*g_, *h_, config()));
  }
  static void TearDownTestSuite() {
    delete oracle_;
    delete h_;
    delete g_;
  }
  static TdGraph* g_;
  static LandmarkHierarchy* h_;
  static HornOracle* oracle_;
};
TdGraph* HornHierarchy::g_ = nullptr;
LandmarkHierarchy* HornHierarchy::h_ = nullptr;
HornOracle* HornHierarchy::oracle_ = nullptr;

TEST_F(HornHierarchy, IndexListsAscendAndIncludeTheTop) {
  const auto& s = oracle_->core().store();
  EXPECT_TRUE(s.is_horn());
  for (VertexId v = 0; v < g_->num_vertices(); ++v) {
    const auto refs = s.horn_index_lookup(v);
    bool top = false;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (i) EXPECT_LT(refs[i - 1].landmark, refs[i].landmark);
      top |= oracle_->core().level(refs[i].landmark) == 4;
      const auto* hl = h_->find(refs[i].landmark);
      ASSERT_NE(hl, nullptr);
      EXPECT_TRUE(std::binary_search(hl->coverage.begin(), hl->coverage.end(), v));
    }
    EXPECT_TRUE(top) << v;
  }
}

TEST_F(HornHierarchy, AppropriateLevelIsMonotone) {
  EXPECT_EQ(oracle_->num_levels(), 4);
  const auto& cov = oracle_->level_coverage();
  ASSERT_EQ(cov.size(), 4u);
  EXPECT_EQ(cov.back(), 900u);
  int prev = 1;
  for (double guess = 1; guess < 5000; guess *= 1.3) {
    const int l = oracle_->appropriate_level(guess);
    EXPECT_GE(l, prev);
    EXPECT_GE(l, 1);
    EXPECT_LE(l, 4);
    if (l < 4) EXPECT_GE(static_cast<double>(cov[l - 1]), guess);
    prev = l;
  }
  EXPECT_EQ(oracle_->appropriate_level(1e9), 4);
}

TEST_F(HornHierarchy, AnswersNeverUnderestimate) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<VertexId> pick(0, 899);
  std::set<std::string> exits;
  for (int q = 0; q < 120; ++q) {
    const VertexId o = pick(rng), d = pick(rng);
    const double t = 7 * 3600.0 + 300.0 * q;
    const auto r = oracle_->hqa(o, d, t);
    const auto truth = tt::lc_distance(*g_, o, d, t);
    ASSERT_TRUE(truth && r.value);
    EXPECT_GE(*r.value, *truth - 1e-6);
    exits.insert(r.exit);
    if (r.exit == "target") EXPECT_NEAR(*r.value, *truth, 1e-6);
    if (r.exit == "alh") EXPECT_EQ(r.guarantee, Guarantee::sigma);
    if (r.exit == "esc") EXPECT_EQ(r.guarantee, Guarantee::eps_psi);
    if (r.landmark != kNoVertex) EXPECT_TRUE(oracle_->core().informed(r.landmark, d));
  }
  for (const auto& e : exits) EXPECT_TRUE(e == "target" || e == "alh" || e == "esc" || e == "exhausted") << e;
}

TEST_F(HornHierarchy, ReloadedStoreGivesTheSameAnswers) {
  const auto path = (std::filesystem::temp_directory_path() / "tdo_horn_store").string();
  oracle_->core().store().save(path);
  const HornOracle again(*g_, std::make_shared<const SummaryStore>(SummaryStore::load(path)), TrapConfig{});
  std::filesystem::remove(path);
  EXPECT_EQ(again.level_coverage(), oracle_->level_coverage());
  for (VertexId o = 0; o < 900; o += 97) {
    for (VertexId d = 5; d < 900; d += 89) {
      const auto a = oracle_->hqa(o, d, 30000), b = again.hqa(o, d, 30000);
      EXPECT_EQ(a.value, b.value);
      EXPECT_EQ(a.rank, b.rank);
      EXPECT_EQ(a.exit, b.exit);
    }
  }
}

TEST_F(HornHierarchy, StoreKindsAreNotInterchangeable) {
  EXPECT_THROW(FlatOracle(*g_, oracle_->core().store_ptr(), TrapConfig{}), std::invalid_argument);
  const auto flat = FlatOracle::preprocess(*g_, std::vector<VertexId>{1, 2}, config());
  EXPECT_THROW(HornOracle(*g_, flat.core().store_ptr(), TrapConfig{}), std::invalid_argument);
}
