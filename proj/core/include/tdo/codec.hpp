#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tdo/trap.hpp"

namespace tdo {

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CodecConfig {
  double scale = 1.32;   // seconds per stored unit
  Seconds bucket = 0.0;  // merge threshold for consecutive delays
  bool compress = true;

  void validate() const;
};

/// Fixed-range integer encoding, ceil(t / s).
std::int64_t encode_time(Seconds t, double scale);
Seconds decode_time(std::int64_t units, double scale);

/// Merges runs of consecutive breakpoints whose delays differ by less than
/// `threshold`; a run becomes one breakpoint at its first time carrying the
/// run's largest delay. Points are then raised as needed so the result
/// never lies below f.
Ttf bucket(const Ttf& f, Seconds threshold);

/// Smallest uniform raise making g >= f everywhere (0 when already above).
Seconds max_deficit(const Ttf& f, const Ttf& g);

std::vector<std::uint8_t> compress_block(std::span<const std::uint8_t> raw);
std::vector<std::uint8_t> decompress_block(std::span<const std::uint8_t> packed, std::size_t raw_size);

enum class RecordKind : std::uint8_t { absent = 0, ref = 1, narrow = 2, wide = 3 };

struct BlockStats {
  std::size_t records = 0;
  std::size_t refs = 0;
  std::size_t narrow = 0;
  std::size_t wide = 0;
  std::size_t breakpoints_in = 0;
  std::size_t breakpoints_bucketed = 0;
  std::size_t breakpoints_stored = 0;
};

/// One landmark's summaries in stored form. `bytes` is self-describing: a
/// destination table followed by the records it points to.
struct EncodedBlock {
  VertexId landmark = kNoVertex;
  std::vector<std::uint8_t> bytes;
  std::vector<VertexId> destinations;    // ascending
  std::vector<std::uint32_t> offsets;    // record offset per destination
  BlockStats stats;
};

EncodedBlock encode_block(const SummarySet& summaries, const CodecConfig& cfg, Seconds period);

/// Quantized upper bound of f as it would be stored (no bucketing).
Ttf quantize(const Ttf& f, double scale);

/// Read access to an uncompressed block.
class BlockView {
 public:
  BlockView(std::span<const std::uint8_t> bytes, double scale, Seconds period);

  std::size_t size() const { return destinations_.size(); }
  std::span<const VertexId> destinations() const { return destinations_; }
  std::optional<std::uint32_t> offset_of(VertexId v) const;
  std::optional<Ttf> decode(VertexId v) const;
  Ttf decode_at(std::uint32_t offset) const;
  RecordKind kind_at(std::uint32_t offset) const;

 private:
  Ttf decode_at(std::uint32_t offset, int depth) const;

  std::span<const std::uint8_t> bytes_;
  double scale_;
  Seconds period_;
  std::vector<VertexId> destinations_;
  std::vector<std::uint32_t> offsets_;
};

/// Stored form of breakpoints over an absolute window (live-traffic patches).
std::vector<Breakpoint> quantize_window(std::span<const Breakpoint> pts, double scale);

// little-endian and varint helpers shared with the store
void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v);
std::uint64_t get_varint(std::span<const std::uint8_t> in, std::size_t& pos);
void put_zigzag(std::vector<std::uint8_t>& out, std::int64_t v);
std::int64_t get_zigzag(std::span<const std::uint8_t> in, std::size_t& pos);

}  // namespace tdo
