#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdo/codec.hpp"

namespace tdo {

inline constexpr std::uint32_t kAbsentOffset = 0xffffffffu;

struct StoreEntry {
  VertexId landmark = kNoVertex;
  std::uint64_t offset = 0;  // within the store file, filled on save/load
  std::uint64_t packed_size = 0;
  std::uint64_t raw_size = 0;
  std::uint8_t level = 1;
  std::uint32_t coverage = 0;
};

struct HornRef {
  VertexId landmark = kNoVertex;
  std::uint32_t offset = 0;
};

/// Encoded summaries of all landmarks plus the flat or horn index.
///
/// Blocks stay compressed in memory and are inflated on first access, once
/// per block, safely under concurrent readers. `add_block` may be called
/// from several threads; `finalize` must run before any read.
class SummaryStore {
 public:
  SummaryStore(CodecConfig cfg, Seconds period, std::size_t num_vertices, bool horn);
  SummaryStore(SummaryStore&&) noexcept;
  SummaryStore& operator=(SummaryStore&&) noexcept;
  ~SummaryStore();

  void add_block(EncodedBlock block, int level = 1);
  void finalize();

  void save(const std::string& path) const;
  static SummaryStore load(const std::string& path);

  const CodecConfig& codec() const { return cfg_; }
  Seconds period() const { return period_; }
  std::size_t num_vertices() const { return n_; }
  bool is_horn() const { return is_horn_; }
  std::size_t num_landmarks() const { return entries_.size(); }
  const StoreEntry& entry(std::size_t slot) const { return entries_[slot]; }
  std::optional<std::size_t> slot_of(VertexId landmark) const;

  /// Decoded view of a block, inflating it on first use.
  const BlockView& view(std::size_t slot) const;
  std::span<const std::uint8_t> raw_block(std::size_t slot) const;

  /// O(1) record offset of (landmark slot, destination), flat stores only.
  std::optional<std::uint32_t> flat_index_lookup(std::size_t slot, VertexId v) const;
  /// Landmarks holding a summary for v, ascending id, horn stores only.
  std::span<const HornRef> horn_index_lookup(VertexId v) const;
  /// Binary search in the horn list of v.
  std::optional<std::uint32_t> horn_offset(VertexId landmark, VertexId v) const;

  /// Decoded summary, nullopt when the landmark does not cover v.
  std::optional<Ttf> summary(VertexId landmark, VertexId v) const;
  std::optional<Ttf> summary_at_slot(std::size_t slot, VertexId v) const;

  std::uint64_t packed_bytes() const;
  std::uint64_t raw_bytes() const;
  BlockStats stats() const { return stats_; }

 private:
  struct Slot;

  CodecConfig cfg_;
  Seconds period_;
  std::size_t n_;
  bool is_horn_;
  bool finalized_ = false;
  std::vector<StoreEntry> entries_;
  std::vector<std::unique_ptr<Slot>> slots_;
  std::vector<std::uint32_t> slot_by_landmark_;  // kAbsentOffset when not a landmark
  std::vector<std::vector<std::uint32_t>> flat_;  // slot -> destination -> offset
  std::vector<std::vector<HornRef>> horn_;  // vertex -> refs
  BlockStats stats_;
  std::unique_ptr<std::mutex> add_mutex_;
};

}  // namespace tdo
