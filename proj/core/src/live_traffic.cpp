#include "tdo/live_traffic.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "tdo/search.hpp"

namespace tdo {

namespace {

Seconds bump_at(std::span<const Breakpoint> bump, Seconds x) {
  if (bump.empty() || x <= bump.front().time || x >= bump.back().time) return 0.0;
  auto hi = std::upper_bound(bump.begin(), bump.end(), x,
                             [](Seconds v, const Breakpoint& p) { return v < p.time; });
  const auto& b = *hi;
  const auto& a = *(hi - 1);
  return a.delay + (b.delay - a.delay) * (x - a.time) / (b.time - a.time);
}

}  // namespace

std::vector<Breakpoint> disruption_bump(const Ttf& base, const Disruption& d) {
  if (!(d.start < d.end)) throw DisruptionError("disruption window must satisfy start < end");
  std::vector<Breakpoint> bump;
  if (d.block) {
    const Seconds h = 0.9 * (d.end - d.start);
    bump = {{d.start - h, 0.0}, {d.start, h}, {d.end, 0.0}};
  } else {
    if (!(d.factor > 0)) throw DisruptionError("delay factor must be positive");
    const Seconds h = (d.factor - 1.0) * base.max_delay();
    if (h == 0.0) return {};
    // every falling ramp has slope -1/2, every rising ramp slope 1
    const Seconds m = std::abs(h);
    bump = h > 0 ? std::vector<Breakpoint>{{d.start - m, 0.0}, {d.start, h}, {d.end, h}, {d.end + 2.0 * m, 0.0}}
                 : std::vector<Breakpoint>{{d.start - 2.0 * m, 0.0}, {d.start, h}, {d.end, h}, {d.end + m, 0.0}};
  }
  if (bump.back().time - bump.front().time >= base.period()) {
    throw DisruptionError("disruption and its ramps must last less than one period");
  }
  return bump;
}

Ttf disrupted_ttf(const Ttf& base, const Disruption& d, bool allow_decrease) {
  const auto bump = disruption_bump(base, d);
  if (bump.empty()) return base;
  if (!allow_decrease && std::any_of(bump.begin(), bump.end(), [](const Breakpoint& p) { return p.delay < 0; })) {
    throw DisruptionError("delay-decreasing disruptions are disabled");
  }
  const Seconds T = base.period();
  std::vector<Seconds> times{0.0};
  for (const auto& p : base.breakpoints()) times.push_back(p.time);
  for (const auto& p : bump) times.push_back(reduce_time(p.time, T));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<Breakpoint> pts;
  for (Seconds t : times) {
    if (t >= T) continue;
    Seconds v = base.eval(t);
    for (int k = -2; k <= 2; ++k) v += bump_at(bump, t + k * T);
    if (v < 1.0 && !allow_decrease) v = 1.0;
    if (v <= 0) throw DisruptionError("disruption leaves a non-positive delay");
    pts.push_back({t, v});
  }
  Ttf out = Ttf(T, std::move(pts)).simplified();
  if (!fifo_check(out)) throw DisruptionError("disrupted arc would violate FIFO");
  return out;
}

std::vector<VertexId> affected_landmarks(const TdGraph& g, std::span<const VertexId> landmarks, VertexId u,
                                         Seconds radius) {
  const auto metric = static_metric(g, MetricKind::free_flow);
  const auto dist = static_distances(g, metric, u, true);
  std::vector<VertexId> out;
  for (VertexId l : landmarks) {
    if (dist[l] <= radius) out.push_back(l);
  }
  std::sort(out.begin(), out.end());
  return out;
}

DepartureWindow compute_window(const TdGraph& g, VertexId l, VertexId u, Seconds r_s, Seconds r_e) {
  auto distance = [&](MetricKind kind) {
    const auto metric = static_metric(g, kind);
    const auto res = static_dijkstra(g, metric, l, false, StopCriterion::to_target(u));
    auto v = res.label_of(u);
    if (!v) throw std::invalid_argument("vertex is not reachable from the landmark");
    return *v;
  };
  const Seconds congested = distance(MetricKind::full_congestion);
  const Seconds free = distance(MetricKind::free_flow);
  DepartureWindow w{r_s - congested, r_e - free};
  if (w.end < w.start) w.end = w.start;
  return w;
}

LiveTraffic::LiveTraffic(OracleCore& core, LiveOptions options) : core_(core), options_(options) {}

std::shared_ptr<const TdGraph> LiveTraffic::graph_with(const std::vector<Live>& live) const {
  if (live.empty()) return nullptr;
  auto g = std::make_shared<TdGraph>(core_.graph());
  for (const auto& l : live) {
    const auto a = l.disruption.arc;
    g->set_arc_ttf(a, disrupted_ttf(g->arc(a).ttf, l.disruption, options_.allow_decrease));
  }
  return g;
}

void LiveTraffic::publish_locked() {
  auto set = std::make_shared<PatchSet>();
  set->graph = graph_;
  for (const auto& l : live_) set->patches.insert(set->patches.end(), l.patches.begin(), l.patches.end());
  core_.publish_patches(std::move(set));
}

UpdateReport LiveTraffic::apply(const Disruption& d) {
  const auto started = std::chrono::steady_clock::now();
  std::lock_guard lock(mutex_);
  const auto& base = core_.graph();
  if (d.arc >= base.num_arcs() || !base.arc(d.arc).active) {
    throw DisruptionError("unknown or inactive arc " + std::to_string(d.arc));
  }
  const TdGraph& before = graph_ ? *graph_ : base;
  const auto bump = disruption_bump(before.arc(d.arc).ttf, d);

  Live entry;
  entry.id = next_id_;
  entry.disruption = d;
  auto next = live_;
  next.push_back(entry);
  auto g2 = graph_with(next);

  UpdateReport report;
  report.id = entry.id;
  if (!bump.empty()) {
    const Seconds r_s = bump.front().time;
    const Seconds r_e = bump.back().time;
    const VertexId u = base.arc(d.arc).tail;
    report.affected = affected_landmarks(*g2, core_.landmarks(), u, r_e - r_s);
    const double scale = core_.store().codec().scale;
    for (VertexId l : report.affected) {
      const auto w = compute_window(*g2, l, u, r_s, r_e);
      const auto& view = core_.store().view(*core_.store().slot_of(l));
      const std::vector<VertexId> coverage(view.destinations().begin(), view.destinations().end());
      auto ws = build_window_summaries(*g2, l, coverage, core_.trap(), w.start, w.end);
      TemporalSummaryPatch p;
      p.disruption = entry.id;
      p.landmark = l;
      p.start = ws.start;
      p.end = ws.end;
      p.period = base.period();
      p.destinations = std::move(ws.destinations);
      p.points.reserve(ws.points.size());
      for (const auto& pts : ws.points) p.points.push_back(quantize_window(pts, scale));
      report.destinations += p.destinations.size();
      next.back().patches.push_back(std::move(p));
    }
    report.patches = next.back().patches.size();
  }
  live_ = std::move(next);
  graph_ = std::move(g2);
  ++next_id_;
  publish_locked();
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

bool LiveTraffic::expire(std::uint64_t id) {
  std::lock_guard lock(mutex_);
  auto it = std::find_if(live_.begin(), live_.end(), [&](const Live& l) { return l.id == id; });
  if (it == live_.end()) return false;
  auto next = live_;
  next.erase(next.begin() + (it - live_.begin()));
  graph_ = graph_with(next);
  live_ = std::move(next);
  publish_locked();
  return true;
}

std::vector<LiveTraffic::Live> LiveTraffic::live() const {
  std::lock_guard lock(mutex_);
  return live_;
}

std::shared_ptr<const TdGraph> LiveTraffic::current_graph() const {
  std::lock_guard lock(mutex_);
  return graph_;
}

namespace {

constexpr char kMagic[5] = {'T', 'D', 'P', 'T', '1'};

template <class T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "patch files are little-endian");
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("truncated patch file");
  return v;
}

}  // namespace

void LiveTraffic::save(const std::string& path) const {
  std::lock_guard lock(mutex_);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, next_id_);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(live_.size()));
  for (const auto& l : live_) {
    put<std::uint64_t>(out, l.id);
    put<std::uint32_t>(out, l.disruption.arc);
    put<double>(out, l.disruption.start);
    put<double>(out, l.disruption.end);
    put<double>(out, l.disruption.factor);
    put<std::uint8_t>(out, l.disruption.block ? 1 : 0);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(l.patches.size()));
    for (const auto& p : l.patches) {
      put<std::uint32_t>(out, p.landmark);
      put<double>(out, p.start);
      put<double>(out, p.end);
      put<double>(out, p.period);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(p.destinations.size()));
      for (std::size_t i = 0; i < p.destinations.size(); ++i) {
        put<std::uint32_t>(out, p.destinations[i]);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(p.points[i].size()));
        for (const auto& b : p.points[i]) {
          put<double>(out, b.time);
          put<double>(out, b.delay);
        }
      }
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

void LiveTraffic::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error(path + " is not a patch file");
  }
  const auto next_id = get<std::uint64_t>(in);
  std::vector<Live> live(get<std::uint32_t>(in));
  const auto n = core_.graph().num_vertices();
  for (auto& l : live) {
    l.id = get<std::uint64_t>(in);
    l.disruption.arc = get<std::uint32_t>(in);
    l.disruption.start = get<double>(in);
    l.disruption.end = get<double>(in);
    l.disruption.factor = get<double>(in);
    l.disruption.block = get<std::uint8_t>(in) != 0;
    if (l.disruption.arc >= core_.graph().num_arcs()) throw std::runtime_error("patch file names an unknown arc");
    l.patches.resize(get<std::uint32_t>(in));
    for (auto& p : l.patches) {
      p.disruption = l.id;
      p.landmark = get<std::uint32_t>(in);
      if (!core_.is_landmark(p.landmark)) throw std::runtime_error("patch file names a non-landmark");
      p.start = get<double>(in);
      p.end = get<double>(in);
      p.period = get<double>(in);
      const auto k = get<std::uint32_t>(in);
      if (k > n) throw std::runtime_error("patch file lists too many destinations");
      p.destinations.resize(k);
      p.points.resize(k);
      for (std::uint32_t i = 0; i < k; ++i) {
        p.destinations[i] = get<std::uint32_t>(in);
        const auto count = get<std::uint32_t>(in);
        if (count > (1u << 24)) throw std::runtime_error("patch file lists too many breakpoints");
        p.points[i].resize(count);
        for (auto& b : p.points[i]) {
          b.time = get<double>(in);
          b.delay = get<double>(in);
        }
      }
    }
  }
  auto g = graph_with(live);
  std::lock_guard lock(mutex_);
  live_ = std::move(live);
  graph_ = std::move(g);
  next_id_ = next_id;
  publish_locked();
}

}  // namespace tdo
