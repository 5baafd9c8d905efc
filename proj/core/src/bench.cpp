#include "tdo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include "tdo/search.hpp"

namespace tdo {

const char* to_string(InstanceKind k) {
  switch (k) {
    case InstanceKind::grid: return "grid";
    case InstanceKind::ring: return "ring";
    case InstanceKind::random_planar: return "random-planar";
  }
  return "?";
}

InstanceKind parse_instance_kind(const std::string& s) {
  if (s == "grid") return InstanceKind::grid;
  if (s == "ring") return InstanceKind::ring;
  if (s == "random-planar" || s == "random_planar") return InstanceKind::random_planar;
  throw std::invalid_argument("unknown instance kind '" + s + "'");
}

const char* to_string(RangeClass r) {
  switch (r) {
    case RangeClass::any: return "any";
    case RangeClass::short_range: return "short";
    case RangeClass::mid_range: return "mid";
    case RangeClass::long_range: return "long";
  }
  return "?";
}

namespace {

struct Segment {
  VertexId a;
  VertexId b;
  int category;
  double length;  // relative length, 1 is a typical block
};

class Profiles {
 public:
  Profiles(const GeneratorSpec& spec, std::mt19937_64& rng) : spec_(spec), rng_(rng) {}

  Seconds base(const Segment& s) {
    const double speed = s.category == 1 ? 0.5 : s.category == 2 ? 0.75 : 1.0;
    std::uniform_real_distribution<double> u(40.0, 80.0);
    return std::max(1.0, std::round(u(rng_) * speed * s.length));
  }

  Ttf make(Seconds base, bool td) {
    const Seconds T = spec_.period;
    if (!td || spec_.breakpoints < 2) return Ttf(T, base);
    std::uniform_real_distribution<double> peak(0.3, 1.2);
    std::uniform_real_distribution<double> shift(-3600.0, 3600.0);
    const double p = peak(rng_);
    const double am = 8 * 3600.0 + shift(rng_);
    const double pm = 17.5 * 3600.0 + shift(rng_);
    std::vector<Breakpoint> pts;
    const auto k = spec_.breakpoints;
    for (std::size_t i = 0; i < k; ++i) {
      const Seconds t = std::round(static_cast<double>(i) * T / static_cast<double>(k));
      const double a = std::exp(-std::pow((t - am) / 5400.0, 2));
      const double b = 0.8 * std::exp(-std::pow((t - pm) / 7200.0, 2));
      pts.push_back({t, std::max(1.0, std::round(base * (1.0 + p * std::max(a, b))))});
    }
    return Ttf(T, std::move(pts));
  }

 private:
  const GeneratorSpec& spec_;
  std::mt19937_64& rng_;
};

void build_arcs(TdGraph& g, const std::vector<Segment>& segs, const GeneratorSpec& spec, std::mt19937_64& rng) {
  Profiles profiles(spec, rng);
  std::bernoulli_distribution td(spec.td_fraction);
  std::uniform_int_distribution<int> skew(0, 5);
  for (const auto& s : segs) {
    const Seconds b = profiles.base(s);
    if (spec.symmetric) {
      const Ttf f = profiles.make(b, td(rng));
      g.add_arc(s.a, s.b, f, s.category);
      g.add_arc(s.b, s.a, f, s.category);
    } else {
      g.add_arc(s.a, s.b, profiles.make(b, td(rng)), s.category);
      g.add_arc(s.b, s.a, profiles.make(b + skew(rng), td(rng)), s.category);
    }
    auto& na = g.node(s.a);
    auto& nb = g.node(s.b);
    na.category = std::min(na.category, s.category);
    nb.category = std::min(nb.category, s.category);
  }
}

std::vector<Segment> grid_segments(std::size_t n, std::vector<std::pair<double, double>>& xy) {
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::vector<Segment> segs;
  auto cat = [](std::size_t line) { return line % 8 == 0 ? 1 : line % 4 == 0 ? 2 : 4; };
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t r = v / side, c = v % side;
    xy[v] = {static_cast<double>(c), static_cast<double>(r)};
    if (c + 1 < side && v + 1 < n) segs.push_back({VertexId(v), VertexId(v + 1), cat(r), 1.0});
    if (v + side < n) segs.push_back({VertexId(v), VertexId(v + side), cat(c), 1.0});
  }
  return segs;
}

std::vector<Segment> ring_segments(std::size_t n, std::vector<std::pair<double, double>>& xy) {
  std::vector<Segment> segs;
  if (n <= 1) return segs;
  const auto spokes = std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))));
  const double pi = std::acos(-1.0);
  xy[0] = {0.0, 0.0};
  for (std::size_t v = 1; v < n; ++v) {
    const std::size_t ring = (v - 1) / spokes, j = (v - 1) % spokes;
    const double radius = static_cast<double>(ring + 1);
    const double angle = 2 * pi * static_cast<double>(j) / static_cast<double>(spokes);
    xy[v] = {radius * std::cos(angle), radius * std::sin(angle)};
    const int spoke_cat = j % 4 == 0 ? 1 : 3;
    const int ring_cat = ring % 3 == 0 ? 2 : 4;
    const VertexId inner = ring == 0 ? 0 : VertexId(v - spokes);
    segs.push_back({inner, VertexId(v), spoke_cat, 1.0});
    if (j > 0) segs.push_back({VertexId(v - 1), VertexId(v), ring_cat, radius * 2 * pi / static_cast<double>(spokes)});
    if (j + 1 == spokes && spokes > 2) {
      segs.push_back({VertexId(v), VertexId(v + 1 - spokes), ring_cat, radius * 2 * pi / static_cast<double>(spokes)});
    }
  }
  return segs;
}

std::vector<Segment> planar_segments(std::size_t n, std::vector<std::pair<double, double>>& xy,
                                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double scale = std::sqrt(static_cast<double>(n));
  for (auto& p : xy) p = {u(rng) * scale, u(rng) * scale};
  auto dist = [&](std::size_t a, std::size_t b) { return std::hypot(xy[a].first - xy[b].first, xy[a].second - xy[b].second); };

  std::vector<std::pair<VertexId, VertexId>> edges;
  constexpr std::size_t k = 3;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t w = 0; w < n; ++w) {
      if (w != v) near.push_back({dist(v, w), w});
    }
    const auto take = std::min(k, near.size());
    std::partial_sort(near.begin(), near.begin() + static_cast<long>(take), near.end());
    for (std::size_t i = 0; i < take; ++i) {
      const auto w = near[i].second;
      edges.push_back({VertexId(std::min(v, w)), VertexId(std::max(v, w))});
    }
  }
  // join components with their shortest outgoing link
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (auto [a, b] : edges) parent[find(a)] = find(b);
  for (;;) {
    std::vector<std::size_t> members;
    const auto root = find(0);
    for (std::size_t v = 0; v < n; ++v) {
      if (find(v) != root) members.push_back(v);
    }
    if (members.empty()) break;
    const auto other = find(members.front());
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> link{0, 0};
    for (std::size_t v = 0; v < n; ++v) {
      if (find(v) != other) continue;
      for (std::size_t w = 0; w < n; ++w) {
        if (find(w) == other) continue;
        if (dist(v, w) < best) {
          best = dist(v, w);
          link = {v, w};
        }
      }
    }
    edges.push_back({VertexId(std::min(link.first, link.second)), VertexId(std::max(link.first, link.second))});
    parent[find(link.first)] = find(link.second);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<Segment> segs;
  for (auto [a, b] : edges) {
    const double len = std::max(0.2, dist(a, b));
    segs.push_back({a, b, len > 1.2 ? 2 : 4, len});
  }
  return segs;
}

}  // namespace

TdGraph generate_instance(const GeneratorSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("instance needs at least one vertex");
  if (spec.td_fraction < 0 || spec.td_fraction > 1) throw std::invalid_argument("td fraction must lie in [0, 1]");
  std::mt19937_64 rng(spec.seed);
  std::vector<std::pair<double, double>> xy(spec.n);
  std::vector<Segment> segs;
  switch (spec.kind) {
    case InstanceKind::grid: segs = grid_segments(spec.n, xy); break;
    case InstanceKind::ring: segs = ring_segments(spec.n, xy); break;
    case InstanceKind::random_planar: segs = planar_segments(spec.n, xy, rng); break;
  }
  TdGraph g(spec.n, spec.period);
  for (std::size_t v = 0; v < spec.n; ++v) {
    g.node(VertexId(v)).lon = 13.0 + xy[v].first * 1e-3;
    g.node(VertexId(v)).lat = 52.0 + xy[v].second * 1e-3;
  }
  build_arcs(g, segs, spec, rng);
  return g;
}

AssumptionReport validate_assumptions(const TdGraph& g, std::size_t samples, std::uint64_t seed, Seconds step) {
  AssumptionReport r;
  const auto active = g.active_vertices();
  if (active.size() < 2) return r;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
  std::uniform_int_distribution<long> when(0, static_cast<long>(g.period()) - 1);
  double zeta_sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const VertexId o = active[pick(rng)];
    VertexId d = active[pick(rng)];
    while (d == o) d = active[pick(rng)];
    const auto t = static_cast<Seconds>(when(rng));
    const auto forward = td_distance(g, o, d, t);
    const auto back = td_distance(g, d, o, t);
    if (!forward || !back) continue;
    const double zeta = std::max(*forward / *back, *back / *forward);
    zeta_sum += zeta;
    r.zeta_max = std::max(r.zeta_max, zeta);
    if (const auto later = td_distance(g, o, d, t + step)) {
      const double slope = (*later - *forward) / step;
      r.lambda_max = std::max(r.lambda_max, slope);
      r.neg_lambda_min = std::max(r.neg_lambda_min, -slope);
    }
    ++r.samples;
  }
  if (r.samples) r.zeta_avg = zeta_sum / static_cast<double>(r.samples);
  return r;
}

std::vector<BlowupRow> freeflow_blowup(const TdGraph& g, std::span<const VertexId> origins,
                                       std::span<const std::size_t> f_values) {
  const auto ff = static_metric(g, MetricKind::free_flow);
  const auto fc = static_metric(g, MetricKind::full_congestion);
  std::vector<BlowupRow> rows;
  for (auto f : f_values) {
    BlowupRow row;
    row.f = f;
    for (VertexId o : origins) {
      const auto congested = static_distances(g, fc, o);
      Dijkstra ball(g, ff, o);
      Seconds radius = 0.0, target = 0.0;
      while (ball.rank() < f) {
        auto s = ball.next();
        if (!s) break;
        radius = s->label;
        target = std::max(target, congested[s->vertex]);
      }
      const auto base = ball.rank();
      if (target > radius) {
        while (auto p = ball.peek()) {
          if (p->label > target) break;
          ball.next();
        }
      }
      const auto size = ball.rank();
      const double ratio = static_cast<double>(size) / static_cast<double>(std::max<std::size_t>(1, base));
      row.avg_size += static_cast<double>(size);
      row.max_size = std::max(row.max_size, size);
      row.avg_ratio += ratio;
      row.max_ratio = std::max(row.max_ratio, ratio);
    }
    if (!origins.empty()) {
      row.avg_size /= static_cast<double>(origins.size());
      row.avg_ratio /= static_cast<double>(origins.size());
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<Query> make_queries(const TdGraph& g, const QuerySpec& spec) {
  const auto active = g.active_vertices();
  std::vector<Query> out;
  if (spec.count == 0) return out;
  if (active.size() < 2) throw std::invalid_argument("queries need at least two active vertices");
  if (spec.to < spec.from) throw std::invalid_argument("departure range is empty");
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
  std::uniform_real_distribution<double> when(spec.from, spec.to);
  const std::size_t n = active.size();
  std::size_t failures = 0;
  while (out.size() < spec.count) {
    Query q;
    q.origin = active[pick(rng)];
    q.departure = std::round(when(rng));
    q.range = spec.range;
    if (spec.range == RangeClass::any) {
      do q.destination = active[pick(rng)];
      while (q.destination == q.origin);
      out.push_back(q);
      continue;
    }
    Dijkstra ball(g, q.origin, q.departure);
    while (ball.next()) {
    }
    const auto& order = ball.order();
    // ranks are 1-based; rank 1 is the origin itself
    std::size_t lo = 2, hi = std::max<std::size_t>(2, n / 100);
    if (spec.range == RangeClass::mid_range) lo = hi + 1, hi = std::max(lo, n / 10);
    if (spec.range == RangeClass::long_range) lo = std::max<std::size_t>(2, n / 10 + 1), hi = order.size();
    hi = std::min(hi, order.size());
    if (lo > hi) {
      if (++failures > 100 * spec.count) throw std::runtime_error("no destinations in the requested rank band");
      continue;
    }
    std::uniform_int_distribution<std::size_t> band(lo, hi);
    q.destination = order[band(rng) - 1].vertex;
    out.push_back(q);
  }
  return out;
}

std::vector<Query> make_mixed_queries(const TdGraph& g, QuerySpec spec) {
  const std::size_t total = spec.count;
  std::vector<Query> out;
  const RangeClass classes[] = {RangeClass::short_range, RangeClass::mid_range, RangeClass::long_range};
  for (std::size_t i = 0; i < 3; ++i) {
    spec.count = total / 3 + (i < total % 3 ? 1 : 0);
    spec.range = classes[i];
    auto part = make_queries(g, spec);
    out.insert(out.end(), part.begin(), part.end());
    ++spec.seed;
  }
  return out;
}

BenchReport run_benchmark(const TdGraph& g, std::span<const Query> queries, std::span<const Algorithm> algorithms,
                          bool ground_truth, unsigned threads) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  BenchReport report;
  report.rows.resize(queries.size() * algorithms.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const auto qi = next.fetch_add(1);
      if (qi >= queries.size()) return;
      try {
        const auto& q = queries[qi];
        double truth = nan;
        std::size_t truth_rank = 0;
        if (ground_truth) {
          const auto res = tdd(g, q.origin, q.departure, StopCriterion::to_target(q.destination));
          truth_rank = res.rank();
          if (auto l = res.label_of(q.destination)) truth = *l - q.departure;
        }
        for (std::size_t ai = 0; ai < algorithms.size(); ++ai) {
          auto& row = report.rows[qi * algorithms.size() + ai];
          const auto start = std::chrono::steady_clock::now();
          const auto r = algorithms[ai].run(q);
          row.micros = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
          row.query = qi;
          row.algorithm = algorithms[ai].name;
          row.value = r.value ? *r.value : nan;
          row.truth = truth;
          row.rank = r.rank;
          row.truth_rank = truth_rank;
          row.exact = r.exactness == Exactness::exact;
          row.error = (r.value && !std::isnan(truth)) ? (truth > 0 ? (*r.value - truth) / truth : 0.0) : nan;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(queries.size());
        return;
      }
    }
  };
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, queries.size())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t ai = 0; ai < algorithms.size(); ++ai) {
    AlgorithmSummary s;
    s.name = algorithms[ai].name;
    std::vector<double> ranks;
    double error_sum = 0.0, micros = 0.0, truth_ranks = 0.0;
    std::size_t errors = 0;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
      const auto& row = report.rows[qi * algorithms.size() + ai];
      ++s.queries;
      micros += row.micros;
      truth_ranks += static_cast<double>(row.truth_rank);
      if (std::isnan(row.value)) continue;
      ++s.answered;
      if (row.exact) ++s.exact;
      ranks.push_back(static_cast<double>(row.rank));
      if (!std::isnan(row.error)) {
        ++errors;
        error_sum += row.error;
        s.max_error = std::max(s.max_error, row.error);
        if (row.value < row.truth - 1e-6) ++s.underestimates;
      }
    }
    if (!ranks.empty()) {
      s.mean_rank = std::accumulate(ranks.begin(), ranks.end(), 0.0) / static_cast<double>(ranks.size());
      std::sort(ranks.begin(), ranks.end());
      const auto m = ranks.size() / 2;
      s.median_rank = ranks.size() % 2 ? ranks[m] : 0.5 * (ranks[m - 1] + ranks[m]);
    }
    if (errors) s.mean_error = error_sum / static_cast<double>(errors);
    if (s.queries) {
      s.mean_micros = micros / static_cast<double>(s.queries);
      s.mean_truth_rank = truth_ranks / static_cast<double>(s.queries);
    }
    if (ground_truth && s.mean_rank > 0) s.speedup = s.mean_truth_rank / s.mean_rank;
    report.summaries.push_back(s);
  }
  return report;
}

void write_rows_csv(const BenchReport& r, std::ostream& out) {
  out << "query,algorithm,value,truth,error,rank,truth_rank,exact,micros\n";
  for (const auto& row : r.rows) {
    out << row.query << ',' << row.algorithm << ',' << row.value << ',' << row.truth << ',' << row.error << ','
        << row.rank << ',' << row.truth_rank << ',' << (row.exact ? 1 : 0) << ',' << row.micros << '\n';
  }
}

void write_summary_csv(const BenchReport& r, std::ostream& out) {
  out << "algorithm,queries,answered,exact,underestimates,mean_error,max_error,mean_rank,median_rank,"
         "mean_truth_rank,speedup,mean_micros\n";
  for (const auto& s : r.summaries) {
    out << s.name << ',' << s.queries << ',' << s.answered << ',' << s.exact << ',' << s.underestimates << ','
        << s.mean_error << ',' << s.max_error << ',' << s.mean_rank << ',' << s.median_rank << ','
        << s.mean_truth_rank << ',' << s.speedup << ',' << s.mean_micros << '\n';
  }
}

}  // namespace tdo
