#include "tdo/store.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

namespace tdo {

namespace {

constexpr char kStoreMagic[5] = {'T', 'D', 'O', 'R', '1'};
constexpr char kFlatMagic[5] = {'T', 'D', 'F', 'X', '1'};
constexpr char kHornMagic[5] = {'T', 'D', 'H', 'X', '1'};
constexpr std::uint32_t kFlagCompressed = 1u;
constexpr std::uint32_t kFlagHorn = 2u;

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw CodecError("cannot write " + path);
  }
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  template <typename T>
  void le(T v) {
    std::uint8_t buf[sizeof(T)];
    std::uint64_t u = 0;
    if constexpr (std::is_floating_point_v<T>) {
      u = std::bit_cast<std::uint64_t>(static_cast<double>(v));
    } else {
      u = static_cast<std::uint64_t>(v);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<std::uint8_t>(u >> (8 * i));
    bytes(buf, sizeof(T));
  }
  void close() {
    out_.close();
    if (!out_) throw CodecError("write failed for " + path_);
  }

 private:
  std::ofstream out_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw CodecError("cannot open " + path);
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw CodecError("truncated file " + path_);
  }
  template <typename T>
  T le() {
    std::uint8_t buf[sizeof(T)];
    bytes(buf, sizeof(T));
    std::uint64_t u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    if constexpr (std::is_floating_point_v<T>) {
      return static_cast<T>(std::bit_cast<double>(u));
    } else {
      return static_cast<T>(u);
    }
  }
  void magic(const char (&expected)[5]) {
    char got[5];
    bytes(got, 5);
    if (std::memcmp(got, expected, 5) != 0) throw CodecError("bad magic in " + path_);
  }
  void seek(std::uint64_t pos) { in_.seekg(static_cast<std::streamoff>(pos)); }

 private:
  std::ifstream in_;
  std::string path_;
};

}  // namespace

struct SummaryStore::Slot {
  std::vector<std::uint8_t> packed;
  mutable std::once_flag once;
  mutable std::vector<std::uint8_t> raw;
  mutable std::unique_ptr<BlockView> view;
  bool compressed = false;
  std::vector<VertexId> destinations;  // build-time only
  std::vector<std::uint32_t> offsets;
};

SummaryStore::SummaryStore(CodecConfig cfg, Seconds period, std::size_t num_vertices, bool horn)
    : cfg_(cfg), period_(period), n_(num_vertices), is_horn_(horn), add_mutex_(std::make_unique<std::mutex>()) {
  cfg_.validate();
}

SummaryStore::SummaryStore(SummaryStore&&) noexcept = default;
SummaryStore& SummaryStore::operator=(SummaryStore&&) noexcept = default;
SummaryStore::~SummaryStore() = default;

void SummaryStore::add_block(EncodedBlock block, int level) {
  auto slot = std::make_unique<Slot>();
  StoreEntry e;
  e.landmark = block.landmark;
  e.raw_size = block.bytes.size();
  e.level = static_cast<std::uint8_t>(level);
  e.coverage = static_cast<std::uint32_t>(block.destinations.size());
  if (cfg_.compress) {
    slot->packed = compress_block(block.bytes);
    slot->compressed = true;
  } else {
    slot->packed = std::move(block.bytes);
  }
  e.packed_size = slot->packed.size();
  slot->destinations = std::move(block.destinations);
  slot->offsets = std::move(block.offsets);

  std::lock_guard lock(*add_mutex_);
  if (finalized_) throw CodecError("store already finalized");
  stats_.records += block.stats.records;
  stats_.refs += block.stats.refs;
  stats_.narrow += block.stats.narrow;
  stats_.wide += block.stats.wide;
  stats_.breakpoints_in += block.stats.breakpoints_in;
  stats_.breakpoints_bucketed += block.stats.breakpoints_bucketed;
  stats_.breakpoints_stored += block.stats.breakpoints_stored;
  entries_.push_back(e);
  slots_.push_back(std::move(slot));
}

void SummaryStore::finalize() {
  std::vector<std::size_t> order(entries_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return entries_[a].landmark < entries_[b].landmark; });
  std::vector<StoreEntry> entries;
  std::vector<std::unique_ptr<Slot>> slots;
  for (auto i : order) {
    if (!entries.empty() && entries.back().landmark == entries_[i].landmark) {
      throw CodecError("duplicate landmark block " + std::to_string(entries_[i].landmark));
    }
    entries.push_back(entries_[i]);
    slots.push_back(std::move(slots_[i]));
  }
  entries_ = std::move(entries);
  slots_ = std::move(slots);

  slot_by_landmark_.assign(n_, kAbsentOffset);
  for (std::size_t s = 0; s < entries_.size(); ++s) {
    if (entries_[s].landmark >= n_) throw CodecError("landmark id outside the graph");
    slot_by_landmark_[entries_[s].landmark] = static_cast<std::uint32_t>(s);
  }
  if (is_horn_) {
    horn_.assign(n_, {});
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const auto& slot = *slots_[s];
      for (std::size_t i = 0; i < slot.destinations.size(); ++i) {
        horn_[slot.destinations[i]].push_back({entries_[s].landmark, slot.offsets[i]});
      }
    }
    // slots are in ascending landmark order, so every list is sorted
  } else {
    flat_.assign(slots_.size(), {});
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const auto& slot = *slots_[s];
      flat_[s].assign(n_, kAbsentOffset);
      for (std::size_t i = 0; i < slot.destinations.size(); ++i) {
        flat_[s][slot.destinations[i]] = slot.offsets[i];
      }
    }
  }
  for (auto& slot : slots_) {
    slot->destinations = {};
    slot->offsets = {};
  }
  finalized_ = true;
}

std::optional<std::size_t> SummaryStore::slot_of(VertexId landmark) const {
  if (landmark >= slot_by_landmark_.size() || slot_by_landmark_[landmark] == kAbsentOffset) {
    return std::nullopt;
  }
  return slot_by_landmark_[landmark];
}

std::span<const std::uint8_t> SummaryStore::raw_block(std::size_t slot) const {
  view(slot);  // inflates on first use
  const auto& s = *slots_[slot];
  return s.compressed ? std::span<const std::uint8_t>(s.raw) : std::span<const std::uint8_t>(s.packed);
}

const BlockView& SummaryStore::view(std::size_t slot) const {
  const auto& s = *slots_[slot];
  std::call_once(s.once, [&] {
    if (s.compressed) s.raw = decompress_block(s.packed, entries_[slot].raw_size);
    const std::span<const std::uint8_t> bytes = s.compressed ? std::span<const std::uint8_t>(s.raw)
                                                             : std::span<const std::uint8_t>(s.packed);
    s.view = std::make_unique<BlockView>(bytes, cfg_.scale, period_);
  });
  return *s.view;
}

std::optional<std::uint32_t> SummaryStore::flat_index_lookup(std::size_t slot, VertexId v) const {
  if (is_horn_ || slot >= flat_.size() || v >= n_) return std::nullopt;
  const auto off = flat_[slot][v];
  if (off == kAbsentOffset) return std::nullopt;
  return off;
}

std::span<const HornRef> SummaryStore::horn_index_lookup(VertexId v) const {
  if (!is_horn_ || v >= horn_.size()) return {};
  return horn_[v];
}

std::optional<std::uint32_t> SummaryStore::horn_offset(VertexId landmark, VertexId v) const {
  const auto refs = horn_index_lookup(v);
  auto it = std::lower_bound(refs.begin(), refs.end(), landmark,
                             [](const HornRef& r, VertexId l) { return r.landmark < l; });
  if (it == refs.end() || it->landmark != landmark) return std::nullopt;
  return it->offset;
}

std::optional<Ttf> SummaryStore::summary_at_slot(std::size_t slot, VertexId v) const {
  const auto off = is_horn_ ? horn_offset(entries_[slot].landmark, v) : flat_index_lookup(slot, v);
  if (!off) return std::nullopt;
  return view(slot).decode_at(*off);
}

std::optional<Ttf> SummaryStore::summary(VertexId landmark, VertexId v) const {
  const auto slot = slot_of(landmark);
  if (!slot) return std::nullopt;
  return summary_at_slot(*slot, v);
}

std::uint64_t SummaryStore::packed_bytes() const {
  std::uint64_t total = 0;
  for (const auto& e : entries_) total += e.packed_size;
  return total;
}

std::uint64_t SummaryStore::raw_bytes() const {
  std::uint64_t total = 0;
  for (const auto& e : entries_) total += e.raw_size;
  return total;
}

void SummaryStore::save(const std::string& path) const {
  if (!finalized_) throw CodecError("store must be finalized before saving");
  {
    Writer w(path);
    w.bytes(kStoreMagic, 5);
    w.le<double>(cfg_.scale);
    w.le<double>(cfg_.bucket);
    w.le<std::uint32_t>((cfg_.compress ? kFlagCompressed : 0u) | (is_horn_ ? kFlagHorn : 0u));
    w.le<double>(period_);
    w.le<std::uint32_t>(static_cast<std::uint32_t>(n_));
    w.le<std::uint32_t>(static_cast<std::uint32_t>(entries_.size()));
    constexpr std::uint64_t kHeader = 5 + 8 + 8 + 4 + 8 + 4 + 4;
    constexpr std::uint64_t kDirEntry = 4 + 8 + 8 + 8 + 1 + 4;
    std::uint64_t offset = kHeader + kDirEntry * entries_.size();
    for (const auto& e : entries_) {
      w.le<std::uint32_t>(e.landmark);
      w.le<std::uint64_t>(offset);
      w.le<std::uint64_t>(e.packed_size);
      w.le<std::uint64_t>(e.raw_size);
      w.le<std::uint8_t>(e.level);
      w.le<std::uint32_t>(e.coverage);
      offset += e.packed_size;
    }
    for (const auto& s : slots_) w.bytes(s->packed.data(), s->packed.size());
    w.close();
  }
  if (is_horn_) {
    Writer w(path + ".hidx");
    w.bytes(kHornMagic, 5);
    w.le<std::uint32_t>(static_cast<std::uint32_t>(n_));
    for (const auto& refs : horn_) {
      w.le<std::uint32_t>(static_cast<std::uint32_t>(refs.size()));
      for (const auto& r : refs) {
        w.le<std::uint32_t>(r.landmark);
        w.le<std::uint32_t>(r.offset);
      }
    }
    w.close();
  } else {
    Writer w(path + ".fidx");
    w.bytes(kFlatMagic, 5);
    w.le<std::uint32_t>(static_cast<std::uint32_t>(flat_.size()));
    w.le<std::uint32_t>(static_cast<std::uint32_t>(n_));
    for (const auto& per : flat_) {
      for (auto off : per) w.le<std::uint32_t>(off);
    }
    w.close();
  }
}

SummaryStore SummaryStore::load(const std::string& path) {
  Reader r(path);
  r.magic(kStoreMagic);
  CodecConfig cfg;
  cfg.scale = r.le<double>();
  cfg.bucket = r.le<double>();
  const auto flags = r.le<std::uint32_t>();
  cfg.compress = flags & kFlagCompressed;
  const auto period = r.le<double>();
  const auto n = r.le<std::uint32_t>();
  const auto count = r.le<std::uint32_t>();
  SummaryStore store(cfg, period, n, flags & kFlagHorn);
  for (std::uint32_t i = 0; i < count; ++i) {
    StoreEntry e;
    e.landmark = r.le<std::uint32_t>();
    e.offset = r.le<std::uint64_t>();
    e.packed_size = r.le<std::uint64_t>();
    e.raw_size = r.le<std::uint64_t>();
    e.level = r.le<std::uint8_t>();
    e.coverage = r.le<std::uint32_t>();
    store.entries_.push_back(e);
  }
  for (const auto& e : store.entries_) {
    auto slot = std::make_unique<Slot>();
    slot->compressed = cfg.compress;
    slot->packed.resize(e.packed_size);
    r.seek(e.offset);
    r.bytes(slot->packed.data(), slot->packed.size());
    store.slots_.push_back(std::move(slot));
  }
  store.slot_by_landmark_.assign(n, kAbsentOffset);
  for (std::size_t s = 0; s < store.entries_.size(); ++s) {
    store.slot_by_landmark_[store.entries_[s].landmark] = static_cast<std::uint32_t>(s);
  }
  if (store.is_horn_) {
    Reader h(path + ".hidx");
    h.magic(kHornMagic);
    if (h.le<std::uint32_t>() != n) throw CodecError("horn index size mismatch");
    store.horn_.assign(n, {});
    for (auto& refs : store.horn_) {
      refs.resize(h.le<std::uint32_t>());
      for (auto& ref : refs) {
        ref.landmark = h.le<std::uint32_t>();
        ref.offset = h.le<std::uint32_t>();
      }
    }
  } else {
    Reader f(path + ".fidx");
    f.magic(kFlatMagic);
    if (f.le<std::uint32_t>() != count || f.le<std::uint32_t>() != n) {
      throw CodecError("flat index size mismatch");
    }
    store.flat_.assign(count, std::vector<std::uint32_t>(n));
    for (auto& per : store.flat_) {
      for (auto& off : per) off = f.le<std::uint32_t>();
    }
  }
  store.finalized_ = true;
  return store;
}

}  // namespace tdo
