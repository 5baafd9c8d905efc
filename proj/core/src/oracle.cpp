#include "tdo/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "query_engine.hpp"

namespace tdo {

const char* to_string(Exactness e) {
  switch (e) {
    case Exactness::exact: return "exact";
    case Exactness::via_landmark: return "via-landmark";
    case Exactness::unreachable: return "unreachable";
  }
  return "?";
}

const char* to_string(Guarantee g) {
  switch (g) {
    case Guarantee::exact: return "exact";
    case Guarantee::eps_psi: return "1+eps+psi";
    case Guarantee::sigma: return "1+sigma";
    case Guarantee::none: return "none";
  }
  return "?";
}

double rqa_sigma(double epsilon, double psi, int r) {
  if (!(epsilon > 0) || !(psi > 0) || r < 0) throw std::invalid_argument("rqa_sigma needs eps, psi > 0 and r >= 0");
  const double q = std::pow(1.0 + epsilon / psi, r + 1);
  return epsilon * q / (q - 1.0);
}

std::optional<Seconds> TemporalSummaryPatch::eval(VertexId destination, Seconds t) const {
  if (!covers(t) && period > 0) {
    t -= std::floor((t - start) / period) * period;
  }
  if (!covers(t)) return std::nullopt;
  auto it = std::lower_bound(destinations.begin(), destinations.end(), destination);
  if (it == destinations.end() || *it != destination) return std::nullopt;
  const auto& pts = points[static_cast<std::size_t>(it - destinations.begin())];
  if (pts.empty()) return std::nullopt;
  if (t <= pts.front().time) return pts.front().delay;
  if (t >= pts.back().time) return pts.back().delay;
  auto hi = std::upper_bound(pts.begin(), pts.end(), t,
                             [](Seconds v, const Breakpoint& p) { return v < p.time; });
  const auto& b = *hi;
  const auto& a = *(hi - 1);
  return a.delay + (b.delay - a.delay) * (t - a.time) / (b.time - a.time);
}

std::optional<Seconds> PatchSet::eval(VertexId landmark, VertexId destination, Seconds t) const {
  std::optional<Seconds> best;
  for (const auto& p : patches) {
    if (p.landmark != landmark) continue;
    if (auto v = p.eval(destination, t)) best = best ? std::max(*best, *v) : *v;
  }
  return best;
}

OracleCore::OracleCore(const TdGraph& g, std::shared_ptr<const SummaryStore> store, TrapConfig trap)
    : g_(&g), store_(std::move(store)), trap_(trap), slot_(g.num_vertices(), -1),
      board_(std::make_shared<PatchBoard>()) {
  if (store_->num_vertices() != g.num_vertices()) {
    throw std::invalid_argument("store was built for a graph with " +
                                std::to_string(store_->num_vertices()) + " vertices, not " +
                                std::to_string(g.num_vertices()));
  }
  if (store_->period() != g.period()) throw std::invalid_argument("store period differs from graph period");
  for (std::size_t s = 0; s < store_->num_landmarks(); ++s) {
    slot_[store_->entry(s).landmark] = static_cast<long>(s);
  }
}

int OracleCore::level(VertexId v) const {
  return is_landmark(v) ? store_->entry(static_cast<std::size_t>(slot_[v])).level : 0;
}

std::vector<VertexId> OracleCore::landmarks() const {
  std::vector<VertexId> out;
  for (std::size_t s = 0; s < store_->num_landmarks(); ++s) out.push_back(store_->entry(s).landmark);
  return out;
}

bool OracleCore::informed(VertexId l, VertexId d) const {
  if (!is_landmark(l)) return false;
  const auto slot = static_cast<std::size_t>(slot_[l]);
  return store_->is_horn() ? store_->horn_offset(l, d).has_value()
                           : store_->flat_index_lookup(slot, d).has_value();
}

std::optional<Seconds> OracleCore::summary_value(const PatchSet* patches, VertexId l, VertexId d,
                                                 Seconds at) const {
  if (!is_landmark(l)) return std::nullopt;
  if (patches) {
    if (auto p = patches->eval(l, d, at)) return p;
  }
  auto f = store_->summary_at_slot(static_cast<std::size_t>(slot_[l]), d);
  if (!f) return std::nullopt;
  return f->eval(at);
}

SummaryStore build_store(const TdGraph& g, std::span<const VertexId> landmarks,
                         const std::vector<std::vector<VertexId>>* coverage,
                         const std::vector<int>* levels, const OracleConfig& cfg, bool horn,
                         PreprocessStats* stats) {
  cfg.trap.validate(g.period());
  cfg.codec.validate();
  if (coverage && coverage->size() != landmarks.size()) {
    throw std::invalid_argument("one coverage set per landmark required");
  }
  const auto start = std::chrono::steady_clock::now();
  SummaryStore store(cfg.codec, g.period(), g.num_vertices(), horn);
  const auto active = g.active_vertices();

  std::atomic<std::size_t> next{0};
  std::mutex stats_mutex;
  PreprocessStats total;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= landmarks.size()) return;
      try {
        const VertexId l = landmarks[i];
        std::span<const VertexId> cov = coverage ? std::span<const VertexId>((*coverage)[i]) : active;
        auto set = build_summaries(g, l, cov, cfg.trap);
        if (!coverage && set.summaries.size() <= 1 && active.size() > 1) {
          throw std::runtime_error("landmark " + std::to_string(l) + " reaches no other vertex");
        }
        {
          std::lock_guard lock(stats_mutex);
          total.tdd_runs += set.stats.tdd_runs;
          total.settled += set.stats.settled;
          total.refined_intervals += set.stats.refined_intervals;
        }
        auto block = encode_block(set, cfg.codec, g.period());
        store.add_block(std::move(block), levels ? (*levels)[i] : 1);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(landmarks.size());
        return;
      }
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, landmarks.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  store.finalize();
  total.landmarks = landmarks.size();
  total.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (stats) *stats = total;
  return store;
}

namespace detail {

namespace {

const TdGraph* checked_graph(const TdGraph* g, VertexId o, VertexId d) {
  if (o >= g->num_vertices() || d >= g->num_vertices() || !g->is_active(o) || !g->is_active(d)) {
    throw std::invalid_argument("query endpoints must be active vertices");
  }
  return g;
}

}  // namespace

QueryRun::QueryRun(const OracleCore& core, VertexId o, VertexId d, Seconds t)
    : core_(core), o_(o), d_(d), t_(t), patches_(core.patches()),
      g_(checked_graph(patches_->graph ? patches_->graph.get() : &core.graph(), o, d)),
      ball_(*g_, o, t) {}

std::optional<Settled> QueryRun::settle() {
  if (exact_ || exhausted_) return std::nullopt;
  auto s = ball_.next();
  if (!s) {
    exhausted_ = true;
    return s;
  }
  radius_ = s->label - t_;
  if (s->vertex == d_) exact_ = true;
  return s;
}

bool QueryRun::seen(VertexId l) const {
  return std::find(landmarks_.begin(), landmarks_.end(), l) != landmarks_.end();
}

void QueryRun::add_candidate(Seconds value, VertexId landmark, std::vector<ArcId> path, Seconds to_landmark) {
  if (landmark != kNoVertex) landmarks_.push_back(landmark);
  nearest_ = nearest_ ? std::min(*nearest_, to_landmark) : to_landmark;
  const bool better = best_ == kNone || value < cands_[best_].value;
  cands_.push_back({value, landmark, better ? std::move(path) : std::vector<ArcId>{}});
  if (better) best_ = cands_.size() - 1;
}

bool QueryRun::offer(VertexId l, Seconds arrival, const Usable& usable) {
  if (seen(l) || !usable(l)) return false;
  auto sv = core_.summary_value(patches_.get(), l, d_, arrival);
  if (!sv) return false;
  const Seconds value = arrival - t_ + *sv;
  const bool improves = best_ == kNone || value < cands_[best_].value;
  add_candidate(value, l, improves ? ball_.path_to(l) : std::vector<ArcId>{}, arrival - t_);
  return true;
}

bool QueryRun::expand(int budget, const Usable& usable) {
  const auto& g = *g_;
  for (int k = 0; k < budget; ++k) {
    auto w = settle();
    if (!w) return false;
    if (exact_) return true;
    if (offer(w->vertex, w->label, usable)) continue;
    Dijkstra sub(g, w->vertex, w->label);
    for (;;) {
      auto s = sub.next();
      if (!s) break;
      if (s->vertex == d_) {
        const Seconds value = s->label - t_;
        if (best_ == kNone || value < cands_[best_].value) {
          auto path = ball_.path_to(w->vertex);
          auto tail = sub.path_to(d_);
          path.insert(path.end(), tail.begin(), tail.end());
          add_candidate(value, kNoVertex, std::move(path), value);
        }
        break;
      }
      if (s->vertex == w->vertex || seen(s->vertex) || !usable(s->vertex)) continue;
      auto sv = core_.summary_value(patches_.get(), s->vertex, d_, s->label);
      if (!sv) continue;
      const Seconds value = s->label - t_ + *sv;
      std::vector<ArcId> path;
      if (best_ == kNone || value < cands_[best_].value) {
        path = ball_.path_to(w->vertex);
        auto tail = sub.path_to(s->vertex);
        path.insert(path.end(), tail.begin(), tail.end());
      }
      add_candidate(value, s->vertex, std::move(path), s->label - t_);
      break;
    }
    extra_rank_ += sub.rank();
  }
  return false;
}

QueryResult QueryRun::result(Guarantee via_guarantee, const char* exit) const {
  QueryResult r;
  r.rank = ball_.rank() + extra_rank_;
  r.landmarks = landmarks_;
  r.exit = exit;
  if (exact_) {
    r.value = ball_.label(d_) - t_;
    r.exactness = Exactness::exact;
    r.guarantee = Guarantee::exact;
    r.path = ball_.path_to(d_);
    r.exit = "target";
    return r;
  }
  if (best_ == kNone) {
    r.exactness = Exactness::unreachable;
    r.guarantee = Guarantee::none;
    r.exit = "exhausted";
    return r;
  }
  const auto& c = cands_[best_];
  r.value = c.value;
  r.exactness = Exactness::via_landmark;
  r.guarantee = via_guarantee;
  r.landmark = c.landmark;
  r.path = c.path;
  return r;
}

}  // namespace detail

FlatOracle::FlatOracle(const TdGraph& g, std::shared_ptr<const SummaryStore> store, TrapConfig trap)
    : core_(g, std::move(store), trap) {
  if (core_.store().is_horn()) throw std::invalid_argument("flat oracle needs a flat store");
}

FlatOracle FlatOracle::preprocess(const TdGraph& g, std::span<const VertexId> landmarks,
                                  const OracleConfig& cfg, PreprocessStats* stats) {
  auto store = std::make_shared<SummaryStore>(build_store(g, landmarks, nullptr, nullptr, cfg, false, stats));
  return FlatOracle(g, std::move(store), cfg.trap);
}

QueryResult FlatOracle::fca_plus(VertexId o, VertexId d, Seconds t, std::size_t n) const {
  detail::QueryRun run(core_, o, d, t);
  const detail::Usable usable = [&](VertexId l) { return core_.informed(l, d); };
  while (auto s = run.settle()) {
    if (run.exact()) break;
    if (run.offer(s->vertex, s->label, usable) && run.candidates() >= n) break;
  }
  return run.result(Guarantee::eps_psi, n == 1 ? "landmark" : "landmarks");
}

QueryResult FlatOracle::fca(VertexId o, VertexId d, Seconds t) const { return fca_plus(o, d, t, 1); }

QueryResult FlatOracle::rqa(VertexId o, VertexId d, Seconds t, int r) const {
  detail::QueryRun run(core_, o, d, t);
  const detail::Usable usable = [&](VertexId l) { return core_.informed(l, d); };
  while (auto s = run.settle()) {
    if (run.exact()) break;
    if (run.offer(s->vertex, s->label, usable)) break;
  }
  if (!run.exact() && run.has_candidate()) run.expand(r, usable);
  return run.result(Guarantee::sigma, "budget");
}

}  // namespace tdo
