#include "tdo/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace tdo {

TdGraph::TdGraph(std::size_t num_vertices, Seconds period)
    : period_(period), nodes_(num_vertices), out_(num_vertices), in_(num_vertices) {
  if (!(period > 0)) throw InstanceError("period must be positive");
}

std::size_t TdGraph::num_active_vertices() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const NodeInfo& n) { return n.active; }));
}

std::size_t TdGraph::num_active_arcs() const {
  return static_cast<std::size_t>(
      std::count_if(arcs_.begin(), arcs_.end(), [](const Arc& a) { return a.active; }));
}

ArcId TdGraph::add_arc(VertexId tail, VertexId head, Ttf ttf, int category) {
  if (tail >= nodes_.size() || head >= nodes_.size()) {
    throw InstanceError("arc endpoint out of range: " + std::to_string(tail) + " -> " +
                        std::to_string(head));
  }
  if (ttf.period() != period_) throw InstanceError("arc period differs from graph period");
  const auto id = static_cast<ArcId>(arcs_.size());
  if (!fifo_check(ttf)) {
    throw InstanceError("FIFO violation on arc " + std::to_string(id) + " (" +
                        std::to_string(tail) + " -> " + std::to_string(head) + ")");
  }
  arcs_.push_back(Arc{tail, head, std::move(ttf), category, true, false});
  out_[tail].push_back(id);
  in_[head].push_back(id);
  return id;
}

std::vector<VertexId> TdGraph::active_vertices() const {
  std::vector<VertexId> out;
  out.reserve(nodes_.size());
  for (VertexId v = 0; v < nodes_.size(); ++v) {
    if (nodes_[v].active) out.push_back(v);
  }
  return out;
}

void TdGraph::set_arc_ttf(ArcId a, Ttf ttf) {
  if (ttf.period() != period_) throw InstanceError("arc period differs from graph period");
  if (!fifo_check(ttf)) throw InstanceError("FIFO violation on arc " + std::to_string(a));
  arcs_[a].ttf = std::move(ttf);
  // a replaced shortcut no longer stands for its chains
  if (arcs_[a].shortcut) {
    arcs_[a].shortcut = false;
    chains_.erase(a);
  }
}

Seconds TdGraph::arrival(ArcId a, Seconds t) const {
  if (arcs_[a].shortcut) {
    if (const auto* chains = chains_of(a)) {
      Seconds best = std::numeric_limits<Seconds>::infinity();
      for (const auto& chain : *chains) {
        Seconds s = t;
        for (ArcId c : chain) s = arrival(c, s);
        best = std::min(best, s);
      }
      return best;
    }
  }
  return arcs_[a].ttf.arrival(t);
}

void TdGraph::deactivate_arc(ArcId a) {
  auto& arc = arcs_[a];
  if (!arc.active) return;
  arc.active = false;
  std::erase(out_[arc.tail], a);
  std::erase(in_[arc.head], a);
}

void TdGraph::deactivate_vertex(VertexId v) {
  auto outs = out_[v];
  auto ins = in_[v];
  for (ArcId a : outs) deactivate_arc(a);
  for (ArcId a : ins) deactivate_arc(a);
  nodes_[v].active = false;
}

const std::vector<std::vector<ArcId>>* TdGraph::chains_of(ArcId shortcut) const {
  auto it = chains_.find(shortcut);
  return it == chains_.end() ? nullptr : &it->second;
}

void TdGraph::add_chain(ArcId shortcut, std::vector<ArcId> chain) {
  arcs_[shortcut].shortcut = true;
  chains_[shortcut].push_back(std::move(chain));
}

void TdGraph::merge_parallel_shortcut(ArcId shortcut, const Ttf& other, std::vector<ArcId> chain) {
  arcs_[shortcut].ttf = minimum(arcs_[shortcut].ttf, other);
  add_chain(shortcut, std::move(chain));
}

std::optional<ArcId> TdGraph::find_arc(VertexId tail, VertexId head) const {
  for (ArcId a : out_[tail]) {
    if (arcs_[a].head == head) return a;
  }
  return std::nullopt;
}

std::vector<ArcId> TdGraph::unpack(std::span<const ArcId> path, Seconds departure) const {
  std::vector<ArcId> out;
  Seconds t = departure;
  for (ArcId a : path) {
    const auto* chains = chains_of(a);
    if (!chains) {
      out.push_back(a);
      t = arrival(a, t);
      continue;
    }
    // the alternative realising the merged minimum at this departure
    const std::vector<ArcId>* best = nullptr;
    Seconds best_arrival = 0;
    for (const auto& chain : *chains) {
      Seconds s = t;
      for (ArcId c : chain) s = arrival(c, s);
      if (!best || s < best_arrival) {
        best = &chain;
        best_arrival = s;
      }
    }
    auto inner = unpack(*best, t);
    out.insert(out.end(), inner.begin(), inner.end());
    t = best_arrival;
  }
  return out;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

template <typename T>
T parse_number(const std::string& tok, std::size_t line, const char* what) {
  T value{};
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw InstanceError(std::string("cannot parse ") + what + " '" + tok + "'", line);
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

TdGraph load_instance(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_record = [&]() -> std::optional<std::vector<std::string>> {
    while (std::getline(in, line)) {
      ++lineno;
      auto toks = split_ws(line);
      if (toks.empty() || toks.front().starts_with('#')) continue;
      return toks;
    }
    return std::nullopt;
  };

  auto header = next_record();
  if (!header || header->size() != 5 || (*header)[0] != "TDGRAPH" || (*header)[1] != "v1") {
    throw InstanceError("expected header 'TDGRAPH v1 <n> <m> <T>'", lineno);
  }
  const auto n = parse_number<std::size_t>((*header)[2], lineno, "node count");
  const auto m = parse_number<std::size_t>((*header)[3], lineno, "arc count");
  const auto period = parse_number<double>((*header)[4], lineno, "period");
  if (!(period > 0)) throw InstanceError("period must be positive", lineno);

  TdGraph g(n, period);
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    auto rec = next_record();
    if (!rec) throw InstanceError("unexpected end of file: missing node records", lineno);
    const auto& t = *rec;
    if (t[0] != "node" || t.size() < 2 || t.size() > 5) {
      throw InstanceError("expected 'node <id> [<lon> <lat>] [<category>]'", lineno);
    }
    const auto id = parse_number<std::size_t>(t[1], lineno, "node id");
    if (id >= n) throw InstanceError("node id " + t[1] + " out of range", lineno);
    if (seen[id]) throw InstanceError("duplicate node " + t[1], lineno);
    seen[id] = true;
    auto& info = g.node(static_cast<VertexId>(id));
    if (t.size() >= 4) {
      info.lon = parse_number<double>(t[2], lineno, "longitude");
      info.lat = parse_number<double>(t[3], lineno, "latitude");
    }
    if (t.size() == 3 || t.size() == 5) {
      info.category = parse_number<int>(t.back(), lineno, "category");
    }
  }

  std::set<std::pair<VertexId, VertexId>> arcs_seen;
  for (std::size_t i = 0; i < m; ++i) {
    auto rec = next_record();
    if (!rec) throw InstanceError("unexpected end of file: missing arc records", lineno);
    const auto& t = *rec;
    if (t[0] != "arc" || t.size() < 6) {
      throw InstanceError("expected 'arc <tail> <head> <k> <t1> <d1> ...'", lineno);
    }
    const auto tail = parse_number<std::size_t>(t[1], lineno, "tail");
    const auto head = parse_number<std::size_t>(t[2], lineno, "head");
    if (tail >= n || head >= n) throw InstanceError("dangling arc endpoint", lineno);
    const auto k = parse_number<std::size_t>(t[3], lineno, "breakpoint count");
    if (k == 0) throw InstanceError("arc needs at least one breakpoint", lineno);
    if (t.size() != 4 + 2 * k && t.size() != 5 + 2 * k) {
      throw InstanceError("arc record has " + std::to_string(t.size() - 4) +
                              " values, expected " + std::to_string(2 * k),
                          lineno);
    }
    std::vector<Breakpoint> pts;
    pts.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double time = parse_number<double>(t[4 + 2 * j], lineno, "time");
      const double delay = parse_number<double>(t[5 + 2 * j], lineno, "delay");
      if (delay < 1.0) throw InstanceError("arc " + std::to_string(i) + ": delay below 1", lineno);
      pts.push_back({time, delay});
    }
    int category = kNoCategory;
    if (t.size() == 5 + 2 * k) category = parse_number<int>(t.back(), lineno, "category");
    const auto key = std::make_pair(static_cast<VertexId>(tail), static_cast<VertexId>(head));
    if (!arcs_seen.insert(key).second) {
      throw InstanceError("duplicate arc " + t[1] + " -> " + t[2], lineno);
    }
    try {
      g.add_arc(key.first, key.second, Ttf(period, std::move(pts)), category);
    } catch (const TtfError& e) {
      throw InstanceError("arc " + std::to_string(i) + ": " + e.what(), lineno);
    } catch (const InstanceError& e) {
      throw InstanceError(e.what(), lineno);
    }
  }
  if (next_record()) throw InstanceError("trailing records after declared arcs", lineno);
  return g;
}

TdGraph load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open instance file " + path);
  return load_instance(in);
}

void save_instance(const TdGraph& g, std::ostream& out) {
  out << "TDGRAPH v1 " << g.num_vertices() << ' ' << g.num_active_arcs() << ' '
      << format_double(g.period()) << '\n';
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    const auto& info = g.node(v);
    out << "node " << v;
    if (info.lon && info.lat) out << ' ' << format_double(*info.lon) << ' ' << format_double(*info.lat);
    if (info.category != kNoCategory) out << ' ' << info.category;
    out << '\n';
  }
  for (ArcId a = 0; a < g.num_arcs(); ++a) {
    const auto& arc = g.arc(a);
    if (!arc.active) continue;
    out << "arc " << arc.tail << ' ' << arc.head << ' ' << arc.ttf.size();
    for (const auto& p : arc.ttf.breakpoints()) {
      out << ' ' << format_double(p.time) << ' ' << format_double(p.delay);
    }
    if (arc.category != kNoCategory) out << ' ' << arc.category;
    out << '\n';
  }
}

void save_instance_file(const TdGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InstanceError("cannot write instance file " + path);
  save_instance(g, out);
  if (!out) throw InstanceError("write failed for " + path);
}

namespace {

std::vector<VertexId> undirected_neighbours(const TdGraph& g, VertexId v) {
  std::vector<VertexId> nb;
  for (ArcId a : g.out_arcs(v)) nb.push_back(g.arc(a).head);
  for (ArcId a : g.in_arcs(v)) nb.push_back(g.arc(a).tail);
  std::sort(nb.begin(), nb.end());
  nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  std::erase(nb, v);
  return nb;
}

// Adds or merges a shortcut tail -> head standing for `chain`.
void install_shortcut(TdGraph& g, VertexId tail, VertexId head, const Ttf& ttf,
                      std::vector<ArcId> chain, int category) {
  if (auto existing = g.find_arc(tail, head)) {
    if (g.arc(*existing).shortcut) {
      g.merge_parallel_shortcut(*existing, ttf, std::move(chain));
      return;
    }
    const ArcId orig = *existing;
    const Arc copy = g.arc(orig);
    g.deactivate_arc(orig);
    const ArcId sc = g.add_arc(tail, head, minimum(copy.ttf, ttf), std::min(copy.category, category));
    g.add_chain(sc, {orig});
    g.add_chain(sc, std::move(chain));
    return;
  }
  const ArcId sc = g.add_arc(tail, head, ttf, category);
  g.add_chain(sc, std::move(chain));
}

}  // namespace

TdGraph contract_degree2(const TdGraph& input) {
  TdGraph g = input;
  const auto n = g.num_vertices();
  std::vector<bool> contractible(n, false);
  for (VertexId v = 0; v < n; ++v) {
    contractible[v] = g.is_active(v) && undirected_neighbours(g, v).size() == 2;
  }
  std::vector<bool> visited(n, false);

  // Walks from junction `start` through neighbour `first` until a junction.
  auto walk = [&](VertexId start, VertexId first) {
    std::vector<VertexId> seq{start};
    VertexId prev = start;
    VertexId cur = first;
    while (contractible[cur] && !visited[cur]) {
      visited[cur] = true;
      seq.push_back(cur);
      auto nb = undirected_neighbours(g, cur);
      VertexId next = nb[0] == prev ? nb[1] : nb[0];
      prev = cur;
      cur = next;
    }
    seq.push_back(cur);
    return seq;
  };

  struct Chain {
    std::vector<VertexId> seq;  // junction, interior..., junction
  };
  std::vector<Chain> chains;
  for (VertexId v = 0; v < n; ++v) {
    if (!g.is_active(v) || contractible[v]) continue;
    for (VertexId w : undirected_neighbours(g, v)) {
      if (!contractible[w] || visited[w]) continue;
      chains.push_back({walk(v, w)});
    }
  }
  // pure cycles: the lowest unvisited id becomes a junction
  for (VertexId v = 0; v < n; ++v) {
    if (!contractible[v] || visited[v]) continue;
    contractible[v] = false;
    for (VertexId w : undirected_neighbours(g, v)) {
      if (contractible[w] && !visited[w]) chains.push_back({walk(v, w)});
    }
  }

  for (const auto& c : chains) {
    const auto& seq = c.seq;
    std::vector<std::pair<std::vector<ArcId>, VertexId>> directed;
    for (int dir = 0; dir < 2; ++dir) {
      std::vector<ArcId> arcs;
      bool ok = true;
      for (std::size_t i = 0; i + 1 < seq.size() && ok; ++i) {
        const VertexId a = dir == 0 ? seq[i] : seq[seq.size() - 1 - i];
        const VertexId b = dir == 0 ? seq[i + 1] : seq[seq.size() - 2 - i];
        auto arc = g.find_arc(a, b);
        if (arc) arcs.push_back(*arc);
        else ok = false;
      }
      if (ok) directed.emplace_back(std::move(arcs), dir == 0 ? seq.front() : seq.back());
    }
    std::vector<std::tuple<VertexId, VertexId, Ttf, std::vector<ArcId>, int>> shortcuts;
    for (auto& [arcs, tail] : directed) {
      const VertexId head = g.arc(arcs.back()).head;
      if (tail == head) continue;  // loop chains never lie on a shortest path
      Ttf ttf = g.arc(arcs.front()).ttf;
      int category = g.arc(arcs.front()).category;
      for (std::size_t i = 1; i < arcs.size(); ++i) {
        ttf = link(ttf, g.arc(arcs[i]).ttf);
        category = std::min(category, g.arc(arcs[i]).category);
      }
      shortcuts.emplace_back(tail, head, std::move(ttf), arcs, category);
    }
    for (std::size_t i = 1; i + 1 < seq.size(); ++i) g.deactivate_vertex(seq[i]);
    for (auto& [tail, head, ttf, arcs, category] : shortcuts) {
      install_shortcut(g, tail, head, ttf, std::move(arcs), category);
    }
  }
  return g;
}

StaticMetric static_metric(const TdGraph& g, MetricKind kind) {
  StaticMetric m;
  m.kind = kind;
  m.weight.resize(g.num_arcs());
  for (ArcId a = 0; a < g.num_arcs(); ++a) {
    const auto& f = g.arc(a).ttf;
    m.weight[a] = kind == MetricKind::free_flow ? f.min_delay() : f.max_delay();
  }
  return m;
}

std::size_t concavity_spoiling_breakpoints(const Ttf& f) {
  if (f.size() < 2) return 0;
  const auto slopes = segment_slopes(f);
  const auto pts = f.breakpoints();
  std::size_t count = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].time <= 0.0) continue;
    const double in = slopes[(i + slopes.size() - 1) % slopes.size()];
    const double out = slopes[i];
    if (out > in + 1e-12) ++count;
  }
  return count;
}

InstanceStats instance_stats(const TdGraph& g) {
  InstanceStats s;
  s.nodes = g.num_active_vertices();
  std::size_t td_breakpoints = 0;
  bool first_td = true;
  for (ArcId a = 0; a < g.num_arcs(); ++a) {
    const auto& arc = g.arc(a);
    if (!arc.active) continue;
    ++s.arcs;
    const auto& f = arc.ttf;
    const std::size_t k = f.size();
    s.total_breakpoints += k;
    s.max_breakpoints = std::max(s.max_breakpoints, k);
    s.max_delay = std::max(s.max_delay, f.max_delay());
    if (f.is_constant()) {
      ++s.constant_arcs;
    } else {
      ++s.pwl_arcs;
      td_breakpoints += k;
      s.min_breakpoints = first_td ? k : std::min(s.min_breakpoints, k);
      first_td = false;
    }
    s.concavity_spoiling += concavity_spoiling_breakpoints(f);
    const auto b = slope_range(f);
    s.lambda_max = std::max(s.lambda_max, b.lambda_max);
    s.lambda_min = std::min(s.lambda_min, -b.lambda_min);
  }
  if (s.pwl_arcs) s.avg_breakpoints = static_cast<double>(td_breakpoints) / s.pwl_arcs;
  return s;
}

}  // namespace tdo
