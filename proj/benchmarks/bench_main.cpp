#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "tdo/bench.hpp"
#include "tdo/codec.hpp"
#include "tdo/landmarks.hpp"
#include "tdo/oracle.hpp"
#include "tdo/search.hpp"
#include "tdo/trap.hpp"

namespace {

struct Fixture {
  tdo::TdGraph g;
  std::unique_ptr<tdo::FlatOracle> oracle;
  std::vector<tdo::Query> queries;

  Fixture() {
    tdo::GeneratorSpec spec;
    spec.n = 2500;
    spec.td_fraction = 0.15;
    g = tdo::generate_instance(spec);
    const auto set = tdo::select_sparse_random(g, 25, 40, 1);
    tdo::OracleConfig cfg;
    cfg.threads = 1;
    oracle = std::make_unique<tdo::FlatOracle>(tdo::FlatOracle::preprocess(g, set.vertices, cfg));
    tdo::QuerySpec qs;
    qs.count = 256;
    queries = tdo::make_queries(g, qs);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

tdo::Ttf profile(std::mt19937_64& rng, std::size_t k) {
  std::vector<tdo::Breakpoint> pts;
  std::uniform_real_distribution<double> jitter(-20, 20);
  for (std::size_t i = 0; i < k; ++i) {
    pts.push_back({static_cast<double>(i) * 86400.0 / static_cast<double>(k), 200 + jitter(rng)});
  }
  return tdo::Ttf(86400, pts);
}

void BM_Link(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto f = profile(rng, static_cast<std::size_t>(state.range(0)));
  const auto h = profile(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tdo::link(f, h));
}
BENCHMARK(BM_Link)->Arg(8)->Arg(64)->Arg(512);

void BM_Minimum(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto f = profile(rng, static_cast<std::size_t>(state.range(0)));
  const auto h = profile(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tdo::minimum(f, h));
}
BENCHMARK(BM_Minimum)->Arg(8)->Arg(64)->Arg(512);

void BM_Tdd(benchmark::State& state) {
  auto& fx = fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& q = fx.queries[i++ % fx.queries.size()];
    benchmark::DoNotOptimize(tdo::td_distance(fx.g, q.origin, q.destination, q.departure));
  }
}
BENCHMARK(BM_Tdd);

template <int Algo>
void BM_Query(benchmark::State& state) {
  auto& fx = fixture();
  std::size_t i = 0, rank = 0;
  for (auto _ : state) {
    const auto& q = fx.queries[i++ % fx.queries.size()];
    const auto r = Algo == 0   ? fx.oracle->fca(q.origin, q.destination, q.departure)
                   : Algo == 1 ? fx.oracle->fca_plus(q.origin, q.destination, q.departure)
                               : fx.oracle->rqa(q.origin, q.destination, q.departure);
    rank += r.rank;
  }
  state.counters["rank"] = benchmark::Counter(static_cast<double>(rank), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_Query<0>)->Name("BM_Fca");
BENCHMARK(BM_Query<1>)->Name("BM_FcaPlus6");
BENCHMARK(BM_Query<2>)->Name("BM_Rqa1");

void BM_Summaries(benchmark::State& state) {
  auto& fx = fixture();
  const auto cov = fx.g.active_vertices();
  for (auto _ : state) benchmark::DoNotOptimize(tdo::build_summaries(fx.g, 0, cov, tdo::TrapConfig{}));
}
BENCHMARK(BM_Summaries)->Unit(benchmark::kMillisecond);

void BM_EncodeBlock(benchmark::State& state) {
  auto& fx = fixture();
  const auto set = tdo::build_summaries(fx.g, 0, fx.g.active_vertices(), tdo::TrapConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(tdo::encode_block(set, tdo::CodecConfig{}, 86400));
}
BENCHMARK(BM_EncodeBlock)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
