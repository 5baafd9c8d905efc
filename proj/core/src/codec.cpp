#include "tdo/codec.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace tdo {

void CodecConfig::validate() const {
  if (!(scale > 0) || !std::isfinite(scale)) throw CodecError("codec scale must be positive");
  if (!(bucket >= 0)) throw CodecError("bucket threshold must be >= 0");
}

std::int64_t encode_time(Seconds t, double scale) {
  return static_cast<std::int64_t>(std::ceil(t / scale));
}

Seconds decode_time(std::int64_t units, double scale) { return static_cast<Seconds>(units) * scale; }

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t get_varint(std::span<const std::uint8_t> in, std::size_t& pos) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (pos >= in.size()) throw CodecError("truncated varint");
    const std::uint8_t b = in[pos++];
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if (!(b & 0x80)) return v;
  }
  throw CodecError("overlong varint");
}

void put_zigzag(std::vector<std::uint8_t>& out, std::int64_t v) {
  put_varint(out, (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63));
}

std::int64_t get_zigzag(std::span<const std::uint8_t> in, std::size_t& pos) {
  const auto u = get_varint(in, pos);
  return static_cast<std::int64_t>(u >> 1) ^ -static_cast<std::int64_t>(u & 1);
}

namespace {

constexpr double kDeficitTolerance = 1e-12;

// Per-point raise that lifts every segment of g above f. Segment i runs
// from point i to point i+1 (cyclic when `periodic`).
template <typename EvalF, typename EvalG>
std::vector<Seconds> segment_raise(std::span<const Breakpoint> f_pts, std::span<const Breakpoint> g_pts,
                                   bool periodic, Seconds period, EvalF f, EvalG g) {
  const std::size_t k = g_pts.size();
  std::vector<Seconds> seg(k, 0.0);
  auto segment_of = [&](Seconds t) -> std::size_t {
    auto it = std::upper_bound(g_pts.begin(), g_pts.end(), t,
                               [](Seconds v, const Breakpoint& p) { return v < p.time; });
    if (it == g_pts.begin()) return periodic ? k - 1 : 0;
    return static_cast<std::size_t>(it - g_pts.begin()) - 1;
  };
  for (const auto& p : f_pts) {
    const auto i = segment_of(p.time);
    seg[i] = std::max(seg[i], f(p.time) - g(p.time));
  }
  for (std::size_t i = 0; i < k; ++i) {
    const Seconds d = f(g_pts[i].time) - g_pts[i].delay;
    seg[i] = std::max(seg[i], d);
    const std::size_t prev = i == 0 ? (periodic ? k - 1 : 0) : i - 1;
    seg[prev] = std::max(seg[prev], d);
  }
  if (periodic) {
    // closing end of the wrap segment
    const Seconds d = f(period) - g(period);
    seg[k - 1] = std::max(seg[k - 1], d);
  }
  std::vector<Seconds> raise(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t prev = i == 0 ? (periodic ? k - 1 : 0) : i - 1;
    raise[i] = std::max({0.0, seg[i], seg[prev]});
  }
  if (!periodic && k > 0) raise[k - 1] = std::max(raise[k - 1], seg[k - 1]);
  return raise;
}

Seconds interpolate_window(std::span<const Breakpoint> pts, Seconds t) {
  if (t <= pts.front().time) return pts.front().delay;
  if (t >= pts.back().time) return pts.back().delay;
  auto it = std::upper_bound(pts.begin(), pts.end(), t,
                             [](Seconds v, const Breakpoint& p) { return v < p.time; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  return a.delay + (b.delay - a.delay) * (t - a.time) / (b.time - a.time);
}

// Rounds times to the nearest unit and delays up, merging collisions.
std::vector<std::pair<std::int64_t, std::int64_t>> round_points(std::span<const Breakpoint> pts,
                                                                double scale,
                                                                std::optional<std::int64_t> max_time) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& p : pts) {
    auto tu = static_cast<std::int64_t>(std::llround(p.time / scale));
    if (max_time) tu = std::min(tu, *max_time);
    const auto du = static_cast<std::int64_t>(std::ceil(p.delay / scale));
    if (!out.empty() && out.back().first >= tu) {
      out.back().second = std::max(out.back().second, du);
    } else {
      out.emplace_back(tu, du);
    }
  }
  return out;
}

std::int64_t raise_units(Seconds raise, double scale) {
  return raise > kDeficitTolerance ? static_cast<std::int64_t>(std::ceil(raise / scale)) : 0;
}

std::vector<std::pair<std::int64_t, std::int64_t>> quantized_units(const Ttf& f, double scale) {
  const Seconds period = f.period();
  auto max_time = static_cast<std::int64_t>(std::ceil(period / scale)) - 1;
  while (max_time > 0 && static_cast<Seconds>(max_time) * scale >= period) --max_time;
  auto units = round_points(f.breakpoints(), scale, max_time);
  std::vector<Breakpoint> g_pts;
  for (auto [t, d] : units) g_pts.push_back({decode_time(t, scale), decode_time(d, scale)});
  const Ttf g(period, g_pts);
  const auto raise = segment_raise(f.breakpoints(), g.breakpoints(), true, period,
                                   [&](Seconds t) { return f.eval(t); },
                                   [&](Seconds t) { return g.eval(t); });
  for (std::size_t i = 0; i < units.size(); ++i) units[i].second += raise_units(raise[i], scale);
  return units;
}

}  // namespace

Seconds max_deficit(const Ttf& f, const Ttf& g) {
  Seconds worst = 0;
  for (const auto& p : f.breakpoints()) worst = std::max(worst, f.eval(p.time) - g.eval(p.time));
  for (const auto& p : g.breakpoints()) worst = std::max(worst, f.eval(p.time) - g.eval(p.time));
  return worst;
}

Ttf bucket(const Ttf& f, Seconds threshold) {
  if (threshold <= 0 || f.size() < 2) return f;
  const auto pts = f.breakpoints();
  std::vector<Breakpoint> merged;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!merged.empty() && std::abs(pts[i].delay - pts[i - 1].delay) < threshold) {
      merged.back().delay = std::max(merged.back().delay, pts[i].delay);
    } else {
      merged.push_back(pts[i]);
    }
  }
  if (merged.size() == pts.size()) return f;
  const Ttf g(f.period(), merged);
  const auto raise = segment_raise(pts, g.breakpoints(), true, f.period(),
                                   [&](Seconds t) { return f.eval(t); },
                                   [&](Seconds t) { return g.eval(t); });
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (raise[i] > kDeficitTolerance) merged[i].delay += raise[i];
  }
  return Ttf(f.period(), std::move(merged));
}

Ttf quantize(const Ttf& f, double scale) {
  std::vector<Breakpoint> pts;
  for (auto [t, d] : quantized_units(f, scale)) pts.push_back({decode_time(t, scale), decode_time(d, scale)});
  return Ttf(f.period(), std::move(pts));
}

std::vector<Breakpoint> quantize_window(std::span<const Breakpoint> pts, double scale) {
  if (pts.empty()) return {};
  auto units = round_points(pts, scale, std::nullopt);
  std::vector<Breakpoint> g;
  for (auto [t, d] : units) g.push_back({decode_time(t, scale), decode_time(d, scale)});
  // the stored window must still span the original one
  if (g.front().time > pts.front().time) g.front().time = std::floor(pts.front().time / scale) * scale;
  if (g.back().time < pts.back().time) g.back().time = std::ceil(pts.back().time / scale) * scale;
  const auto raise = segment_raise(pts, g, false, 0.0,
                                   [&](Seconds t) { return interpolate_window(pts, t); },
                                   [&](Seconds t) { return interpolate_window(g, t); });
  for (std::size_t i = 0; i < g.size(); ++i) g[i].delay += decode_time(raise_units(raise[i], scale), scale);
  return g;
}

std::vector<std::uint8_t> compress_block(std::span<const std::uint8_t> raw) {
  if (raw.empty()) return {};
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> out(bound);
  const int rc = compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), Z_BEST_COMPRESSION);
  if (rc != Z_OK) throw CodecError("zlib compression failed with code " + std::to_string(rc));
  out.resize(bound);
  return out;
}

std::vector<std::uint8_t> decompress_block(std::span<const std::uint8_t> packed, std::size_t raw_size) {
  if (raw_size == 0) return {};
  std::vector<std::uint8_t> out(raw_size);
  uLongf len = static_cast<uLongf>(raw_size);
  const int rc = uncompress(out.data(), &len, packed.data(), static_cast<uLong>(packed.size()));
  if (rc != Z_OK || len != raw_size) throw CodecError("corrupt compressed block");
  return out;
}

EncodedBlock encode_block(const SummarySet& set, const CodecConfig& cfg, Seconds period) {
  cfg.validate();
  const double s = cfg.scale;
  EncodedBlock block;
  block.landmark = set.landmark;
  std::vector<std::uint8_t> records;
  std::vector<std::uint32_t> rel;
  for (const auto& sum : set.summaries) {
    if (sum.upper.period() != period) throw CodecError("summary period differs from store period");
    block.destinations.push_back(sum.destination);
    rel.push_back(static_cast<std::uint32_t>(records.size()));
    ++block.stats.records;
    block.stats.breakpoints_in += sum.upper.size();
    if (sum.ref) {
      if (sum.ref->anchor == sum.destination) throw CodecError("summary refers to itself");
      records.push_back(static_cast<std::uint8_t>(RecordKind::ref));
      put_varint(records, sum.ref->anchor);
      put_varint(records, static_cast<std::uint64_t>(encode_time(sum.ref->offset, s)));
      ++block.stats.refs;
      continue;
    }
    const Ttf bucketed = bucket(sum.upper, cfg.bucket);
    block.stats.breakpoints_bucketed += bucketed.size();
    const auto units = quantized_units(bucketed, s);
    block.stats.breakpoints_stored += units.size();
    std::int64_t base = units.front().second;
    std::int64_t top = base;
    for (auto [t, d] : units) {
      base = std::min(base, d);
      top = std::max(top, d);
    }
    const bool narrow = top - base <= 0xff;
    records.push_back(static_cast<std::uint8_t>(narrow ? RecordKind::narrow : RecordKind::wide));
    put_varint(records, units.size());
    put_varint(records, static_cast<std::uint64_t>(base));
    std::int64_t prev = 0;
    for (auto [t, d] : units) {
      put_varint(records, static_cast<std::uint64_t>(t - prev));
      prev = t;
    }
    for (auto [t, d] : units) {
      const auto shift = static_cast<std::uint64_t>(d - base);
      if (narrow) records.push_back(static_cast<std::uint8_t>(shift));
      else put_varint(records, shift);
    }
    ++(narrow ? block.stats.narrow : block.stats.wide);
  }
  // cycle check over predecessor references
  for (const auto& sum : set.summaries) {
    if (!sum.ref) continue;
    const Summary* anchor = set.find(sum.ref->anchor);
    if (!anchor) throw CodecError("summary refers to a destination outside the block");
    if (anchor->ref) throw CodecError("chained predecessor references are not supported");
  }

  std::vector<std::uint8_t> table;
  put_varint(table, block.destinations.size());
  VertexId prev = 0;
  for (std::size_t i = 0; i < block.destinations.size(); ++i) {
    put_varint(table, block.destinations[i] - prev);
    prev = block.destinations[i];
    put_varint(table, rel[i]);
  }
  const auto start = static_cast<std::uint32_t>(table.size());
  block.bytes = std::move(table);
  block.bytes.insert(block.bytes.end(), records.begin(), records.end());
  for (auto r : rel) block.offsets.push_back(start + r);
  return block;
}

BlockView::BlockView(std::span<const std::uint8_t> bytes, double scale, Seconds period)
    : bytes_(bytes), scale_(scale), period_(period) {
  if (bytes.empty()) return;
  std::size_t pos = 0;
  const auto count = get_varint(bytes, pos);
  if (count > bytes.size()) throw CodecError("corrupt block table");
  destinations_.reserve(count);
  std::vector<std::uint64_t> rel;
  rel.reserve(count);
  VertexId prev = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    prev += static_cast<VertexId>(get_varint(bytes, pos));
    destinations_.push_back(prev);
    rel.push_back(get_varint(bytes, pos));
  }
  for (auto r : rel) {
    if (pos + r >= bytes.size()) throw CodecError("record offset outside block");
    offsets_.push_back(static_cast<std::uint32_t>(pos + r));
  }
}

std::optional<std::uint32_t> BlockView::offset_of(VertexId v) const {
  auto it = std::lower_bound(destinations_.begin(), destinations_.end(), v);
  if (it == destinations_.end() || *it != v) return std::nullopt;
  return offsets_[static_cast<std::size_t>(it - destinations_.begin())];
}

std::optional<Ttf> BlockView::decode(VertexId v) const {
  auto off = offset_of(v);
  if (!off) return std::nullopt;
  return decode_at(*off);
}

RecordKind BlockView::kind_at(std::uint32_t offset) const {
  if (offset >= bytes_.size()) throw CodecError("record offset outside block");
  return static_cast<RecordKind>(bytes_[offset]);
}

Ttf BlockView::decode_at(std::uint32_t offset) const { return decode_at(offset, 0); }

Ttf BlockView::decode_at(std::uint32_t offset, int depth) const {
  if (depth > 1) throw CodecError("cyclic or chained predecessor reference");
  std::size_t pos = offset;
  const auto kind = kind_at(offset);
  ++pos;
  switch (kind) {
    case RecordKind::ref: {
      const auto anchor = static_cast<VertexId>(get_varint(bytes_, pos));
      const auto units = static_cast<std::int64_t>(get_varint(bytes_, pos));
      auto target = offset_of(anchor);
      if (!target) throw CodecError("reference to a missing destination");
      return decode_at(*target, depth + 1).shifted(decode_time(units, scale_));
    }
    case RecordKind::narrow:
    case RecordKind::wide: {
      const auto k = get_varint(bytes_, pos);
      if (k == 0 || k > bytes_.size()) throw CodecError("corrupt breakpoint count");
      const auto base = static_cast<std::int64_t>(get_varint(bytes_, pos));
      std::vector<Breakpoint> pts(k);
      std::int64_t t = 0;
      for (auto& p : pts) {
        t += static_cast<std::int64_t>(get_varint(bytes_, pos));
        p.time = decode_time(t, scale_);
      }
      for (auto& p : pts) {
        std::int64_t shift = 0;
        if (kind == RecordKind::narrow) {
          if (pos >= bytes_.size()) throw CodecError("truncated record");
          shift = bytes_[pos++];
        } else {
          shift = static_cast<std::int64_t>(get_varint(bytes_, pos));
        }
        p.delay = decode_time(base + shift, scale_);
      }
      return Ttf(period_, std::move(pts));
    }
    case RecordKind::absent:
      break;
  }
  throw CodecError("unknown record kind " + std::to_string(static_cast<int>(kind)));
}

}  // namespace tdo
