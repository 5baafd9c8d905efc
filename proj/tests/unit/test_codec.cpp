#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "support/oracles.hpp"
#include "tdo/codec.hpp"
#include "tdo/trap.hpp"

using namespace tdo;
namespace tt = tdo::testing;

namespace {

constexpr double kPeriod = 86400.0;

/// Dense check that g >= f, breakpoints of both plus a uniform grid.
void expect_above(const Ttf& f, const Ttf& g, double tol = 1e-6) {
  std::vector<double> ts;
  for (auto p : f.breakpoints()) ts.push_back(p.time);
  for (auto p : g.breakpoints()) ts.push_back(p.time);
  for (double t = 0; t < kPeriod; t += 97.3) ts.push_back(t);
  for (double t : ts) ASSERT_GE(g.eval(t), f.eval(t) - tol) << "t=" << t;
}

}  // namespace

TEST(Codec, TimeRoundTripWithinOneUnit) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, kPeriod);
  for (double s : {0.5, 1.0, 1.32, 2.0}) {
    for (int i = 0; i < 1000; ++i) {
      const double t = u(rng);
      const double back = decode_time(encode_time(t, s), s);
      EXPECT_GE(back, t - 1e-9);
      EXPECT_LT(back - t, s + 1e-9);
      EXPECT_LE(back - t, 2.0);
    }
  }
}

TEST(Codec, ReferenceScaleFitsADayInSixteenBits) {
  // s = 1.32 s per unit: a full day is 65455 units, resolution 2.64 s
  EXPECT_LE(encode_time(kPeriod, 1.32), std::numeric_limits<std::uint16_t>::max());
  EXPECT_GT(encode_time(kPeriod, 1.31), std::numeric_limits<std::uint16_t>::max() - 1000);
  EXPECT_NEAR(2 * 1.32, 2.64, 1e-12);
}

TEST(Codec, ConfigValidation) {
  CodecConfig c;
  EXPECT_NO_THROW(c.validate());
  c.scale = 0;
  EXPECT_THROW(c.validate(), CodecError);
  c.scale = 1;
  c.bucket = -1;
  EXPECT_THROW(c.validate(), CodecError);
}

TEST(Codec, VarintAndZigzagRoundTrip) {
  std::vector<std::uint64_t> us{0, 1, 127, 128, 300, 1u << 20, std::numeric_limits<std::uint64_t>::max()};
  std::vector<std::int64_t> ss{0, -1, 1, -64, 64, -1000000, std::numeric_limits<std::int64_t>::min(),
                               std::numeric_limits<std::int64_t>::max()};
  std::vector<std::uint8_t> buf;
  for (auto v : us) put_varint(buf, v);
  for (auto v : ss) put_zigzag(buf, v);
  std::size_t pos = 0;
  for (auto v : us) EXPECT_EQ(get_varint(buf, pos), v);
  for (auto v : ss) EXPECT_EQ(get_zigzag(buf, pos), v);
  EXPECT_EQ(pos, buf.size());
  EXPECT_THROW(get_varint(buf, pos), CodecError);
}

TEST(CodecProperty, QuantizeIsAnUpperBound) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> k(1, 40);
  for (int it = 0; it < 300; ++it) {
    const Ttf f(kPeriod, tt::random_points(rng, kPeriod, k(rng), 200 + it, 0.3, 0.3));
    for (double s : {1.0, 1.32, 7.5}) {
      const auto q = quantize(f, s);
      expect_above(f, q);
      EXPECT_EQ(max_deficit(f, q), 0.0);
      EXPECT_LE(q.max_delay(), f.max_delay() + 40 * s);
    }
  }
}

TEST(CodecProperty, BucketingNeverLowersAndShrinks) {
  std::mt19937_64 rng(6);
  for (int it = 0; it < 300; ++it) {
    const Ttf f(kPeriod, tt::random_points(rng, kPeriod, 30, 300, 0.05, 0.05));
    for (double c : {0.0, 5.0, 60.0}) {
      const auto b = bucket(f, c);
      expect_above(f, b);
      EXPECT_LE(b.size(), f.size());
    }
    EXPECT_EQ(bucket(f, 0.0).size(), f.size());
  }
}

TEST(Codec, MaxDeficitIsTheUniformRaise) {
  const Ttf f(kPeriod, {{0, 100}, {1000, 200}});
  const Ttf g(kPeriod, 150);
  EXPECT_DOUBLE_EQ(max_deficit(f, g), 50);
  EXPECT_DOUBLE_EQ(max_deficit(g, f), 50);
  EXPECT_DOUBLE_EQ(max_deficit(Ttf(kPeriod, 90), f), 0);
}

TEST(CodecProperty, CompressionIsLossless) {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 100; ++it) {
    std::vector<std::uint8_t> raw(std::uniform_int_distribution<std::size_t>(0, 5000)(rng));
    const int alphabet = it % 2 ? 4 : 256;
    for (auto& b : raw) b = static_cast<std::uint8_t>(rng() % alphabet);
    const auto packed = compress_block(raw);
    EXPECT_EQ(decompress_block(packed, raw.size()), raw);
  }
}

TEST(Codec, CorruptCompressedInputThrows) {
  std::vector<std::uint8_t> raw(1000, 7);
  auto packed = compress_block(raw);
  EXPECT_THROW(decompress_block(packed, raw.size() + 1), CodecError);
  packed[packed.size() / 2] ^= 0x5a;
  packed.resize(packed.size() - 3);
  EXPECT_THROW(decompress_block(packed, raw.size()), CodecError);
}

TEST(CodecProperty, EncodedBlockDecodesAboveEverySummary) {
  std::mt19937_64 rng(8);
  TrapConfig trap;
  for (int it = 0; it < 6; ++it) {
    const auto g = tt::random_graph(rng, 60, 100, 0.4, kPeriod);
    std::vector<VertexId> all(g.num_vertices());
    for (VertexId v = 0; v < all.size(); ++v) all[v] = v;
    const auto set = build_summaries(g, static_cast<VertexId>(it), all, trap);
    for (double c : {0.0, 10.0}) {
      CodecConfig cfg;
      cfg.bucket = c;
      const auto block = encode_block(set, cfg, kPeriod);
      const BlockView view(block.bytes, cfg.scale, kPeriod);
      ASSERT_EQ(view.size(), set.summaries.size());
      EXPECT_EQ(block.stats.records, set.summaries.size());
      EXPECT_EQ(block.stats.refs + block.stats.narrow + block.stats.wide, block.stats.records);
      for (const auto& s : set.summaries) {
        const auto off = view.offset_of(s.destination);
        ASSERT_TRUE(off);
        EXPECT_EQ(view.kind_at(*off) == RecordKind::ref, s.ref.has_value());
        const auto stored = view.decode(s.destination);
        ASSERT_TRUE(stored);
        expect_above(s.upper, *stored);
      }
      EXPECT_FALSE(view.decode(static_cast<VertexId>(g.num_vertices() + 5)));
    }
  }
}

TEST(Codec, TruncatedBlockIsRejected) {
  std::mt19937_64 rng(9);
  const auto g = tt::random_graph(rng, 20, 20, 0.5, kPeriod);
  std::vector<VertexId> all(20);
  for (VertexId v = 0; v < 20; ++v) all[v] = v;
  const auto block = encode_block(build_summaries(g, 0, all, TrapConfig{}), CodecConfig{}, kPeriod);
  const std::span<const std::uint8_t> cut(block.bytes.data(), 3);
  EXPECT_THROW(BlockView(cut, 1.32, kPeriod), CodecError);
}

TEST(Codec, QuantizedWindowSpansAndBoundsTheInput) {
  const std::vector<Breakpoint> pts{{900, 100.4}, {1350, 180.2}, {1800, 90.9}};
  const auto q = quantize_window(pts, 1.32);
  ASSERT_FALSE(q.empty());
  EXPECT_LE(q.front().time, 900);
  EXPECT_GE(q.back().time, 1800);
  auto at = [](const std::vector<Breakpoint>& p, double t) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      if (t >= p[i].time && t <= p[i + 1].time) {
        const double w = (t - p[i].time) / (p[i + 1].time - p[i].time);
        return p[i].delay + w * (p[i + 1].delay - p[i].delay);
      }
    }
    return p.back().delay;
  };
  for (double t = 900; t <= 1800; t += 3.7) EXPECT_GE(at(q, t), at(pts, t) - 1e-9) << t;
}
