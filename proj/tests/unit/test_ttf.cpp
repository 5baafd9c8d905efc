#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "tdo/ttf.hpp"

using namespace tdo;
using tdo::testing::naive_eval;
using tdo::testing::random_points;

namespace {

constexpr double T = 86400.0;

std::vector<double> sample_times(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, T);
  std::vector<double> out{0.0, T - 1e-6};
  while (out.size() < n) out.push_back(u(rng));
  return out;
}

}  // namespace

TEST(Ttf, RejectsMalformedBreakpoints) {
  EXPECT_THROW(Ttf(0.0, 5.0), TtfError);
  EXPECT_THROW(Ttf(T, std::vector<Breakpoint>{}), TtfError);
  EXPECT_THROW(Ttf(T, {{0, 5}, {0, 6}}), TtfError);
  EXPECT_THROW(Ttf(T, {{10, 5}, {5, 6}}), TtfError);
  EXPECT_THROW(Ttf(T, {{0, 5}, {T, 6}}), TtfError);
  EXPECT_THROW(Ttf(T, {{0, -1}}), TtfError);
}

TEST(Ttf, ConstantEvaluatesEverywhere) {
  const Ttf f(T, 42.0);
  EXPECT_TRUE(f.is_constant());
  EXPECT_EQ(f.eval(0), 42.0);
  EXPECT_EQ(f.eval(12345.5), 42.0);
  EXPECT_EQ(f.eval(3 * T + 7), 42.0);
  EXPECT_EQ(f.min_delay(), 42.0);
  EXPECT_EQ(f.max_delay(), 42.0);
}

TEST(Ttf, WrapSegmentInterpolatesToFirstBreakpoint) {
  const Ttf f(T, {{3600, 100}, {T - 3600, 300}});
  // halfway through the wrap segment from T-3600 to T+3600
  EXPECT_DOUBLE_EQ(f.eval(0), 200.0);
  EXPECT_DOUBLE_EQ(f.eval(T), 200.0);
  EXPECT_DOUBLE_EQ(f.eval(-1800), 250.0);
}

TEST(TtfProperty, EvalMatchesNaiveInterpolation) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    const auto pts = random_points(rng, T, 2 + it % 20, 100.0);
    const Ttf f(T, pts);
    for (double t : sample_times(rng, 50)) EXPECT_NEAR(f.eval(t), naive_eval(pts, T, t), 1e-9);
  }
}

TEST(TtfProperty, LinkIsLegByLegComposition) {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 150; ++it) {
    const auto a = random_points(rng, T, 2 + it % 9, 80.0);
    const auto b = random_points(rng, T, 1 + it % 7, 120.0);
    const Ttf h = link(Ttf(T, a), Ttf(T, b));
    for (double t : sample_times(rng, 60)) {
      const double leg = naive_eval(a, T, t);
      EXPECT_NEAR(h.eval(t), leg + naive_eval(b, T, t + leg), 1e-6);
    }
  }
}

TEST(TtfProperty, MinimumIsPointwise) {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 150; ++it) {
    const auto a = random_points(rng, T, 2 + it % 11, 100.0);
    const auto b = random_points(rng, T, 2 + it % 5, 100.0);
    const Ttf m = minimum(Ttf(T, a), Ttf(T, b));
    for (double t : sample_times(rng, 60)) {
      EXPECT_NEAR(m.eval(t), std::min(naive_eval(a, T, t), naive_eval(b, T, t)), 1e-6);
    }
  }
}

TEST(TtfProperty, LinkPreservesFifo) {
  std::mt19937_64 rng(14);
  for (int it = 0; it < 100; ++it) {
    const Ttf f(T, random_points(rng, T, 6, 100.0, 0.5, 0.5));
    const Ttf g(T, random_points(rng, T, 6, 100.0, 0.5, 0.5));
    ASSERT_TRUE(fifo_check(f));
    ASSERT_TRUE(fifo_check(g));
    EXPECT_TRUE(fifo_check(link(f, g)));
    EXPECT_TRUE(fifo_check(minimum(f, g)));
  }
}

TEST(Ttf, FifoCheckDetectsSteepFalls) {
  EXPECT_TRUE(fifo_check(Ttf(T, {{0, 100}, {100, 1.0 + 1e-6}})));
  EXPECT_FALSE(fifo_check(Ttf(T, {{0, 200}, {100, 50}})));
  // the wrap segment counts too: it falls 500 over 100 seconds
  EXPECT_FALSE(fifo_check(Ttf(T, {{0, 100}, {T - 100, 600}})));
}

TEST(Ttf, SlopeRangeAndSegmentSlopes) {
  const Ttf f(T, {{0, 100}, {100, 150}, {200, 100}});
  const auto s = segment_slopes(f);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s[0], 0.5);
  EXPECT_DOUBLE_EQ(s[1], -0.5);
  EXPECT_DOUBLE_EQ(s[2], 0.0);
  const auto r = slope_range(f);
  EXPECT_DOUBLE_EQ(r.lambda_max, 0.5);
  EXPECT_DOUBLE_EQ(r.lambda_min, 0.5);
}

TEST(TtfProperty, ShiftAndSimplifyKeepValues) {
  std::mt19937_64 rng(15);
  for (int it = 0; it < 100; ++it) {
    auto pts = random_points(rng, T, 10, 100.0);
    // insert a collinear midpoint that simplification may drop
    const Breakpoint mid{(pts[0].time + pts[1].time) / 2, (pts[0].delay + pts[1].delay) / 2};
    if (mid.time != pts[0].time && mid.time != pts[1].time) pts.insert(pts.begin() + 1, mid);
    const Ttf f(T, pts);
    const Ttf s = f.simplified();
    const Ttf up = f.shifted(17.5);
    EXPECT_LE(s.size(), f.size());
    for (double t : sample_times(rng, 40)) {
      EXPECT_NEAR(s.eval(t), f.eval(t), 1e-6);
      EXPECT_DOUBLE_EQ(up.eval(t), f.eval(t) + 17.5);
    }
  }
}

TEST(Ttf, ReduceTime) {
  EXPECT_DOUBLE_EQ(reduce_time(90000, T), 3600);
  EXPECT_DOUBLE_EQ(reduce_time(-3600, T), T - 3600);
  EXPECT_DOUBLE_EQ(reduce_time(0, T), 0);
}
