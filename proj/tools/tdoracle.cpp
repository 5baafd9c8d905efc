#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "tdo/bench.hpp"
#include "tdo/config.hpp"
#include "tdo/graph.hpp"
#include "tdo/horn_oracle.hpp"
#include "tdo/live_traffic.hpp"
#include "tdo/oracle.hpp"
#include "tdo/store.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInvalid = 2;
constexpr int kUnreachable = 3;

struct Settings {
  std::string file;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", file, "key = value settings file");
    cmd->add_option("--set", overrides, "key=value setting, repeatable");
  }
  tdo::Config load() const {
    tdo::Config c = file.empty() ? tdo::Config{} : tdo::load_config(file);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw tdo::ConfigError("--set expects key=value, got '" + kv + "'");
      tdo::apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return c;
  }
};

std::string patches_path(const std::string& store, const std::string& given) {
  return given.empty() ? store + ".tdpt" : given;
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

void print_result(const tdo::QueryResult& r, bool path) {
  std::cout << "value " << (r.value ? std::to_string(*r.value) : std::string("unreachable")) << '\n'
            << "exactness " << tdo::to_string(r.exactness) << '\n'
            << "guarantee " << tdo::to_string(r.guarantee) << '\n'
            << "rank " << r.rank << '\n'
            << "exit " << r.exit << '\n';
  if (r.landmark != tdo::kNoVertex) std::cout << "landmark " << r.landmark << '\n';
  std::cout << "landmarks";
  for (auto l : r.landmarks) std::cout << ' ' << l;
  std::cout << '\n';
  if (path) {
    std::cout << "path";
    for (auto a : r.path) std::cout << ' ' << a;
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landmark-based time-dependent distance oracles"};
  app.require_subcommand(1);
  int status = kOk;

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic instance");
  tdo::GeneratorSpec gspec;
  std::string kind = "grid", gen_out;
  gen->add_option("--kind", kind, "grid, ring or random-planar");
  gen->add_option("--n", gspec.n, "vertex count");
  gen->add_option("--td-fraction", gspec.td_fraction, "share of time-dependent segments");
  gen->add_option("--breakpoints", gspec.breakpoints, "breakpoints per time-dependent arc");
  gen->add_option("--seed", gspec.seed);
  gen->add_flag("--symmetric", gspec.symmetric, "same profile in both directions");
  gen->add_option("-o,--output", gen_out, "instance file")->required();
  gen->callback([&] {
    gspec.kind = tdo::parse_instance_kind(kind);
    tdo::save_instance_file(tdo::generate_instance(gspec), gen_out);
  });

  // stats
  auto* st = app.add_subcommand("stats", "instance statistics and assumption checks");
  std::string st_in;
  std::size_t samples = 200;
  std::vector<std::size_t> blowup;
  std::size_t blowup_origins = 20;
  std::uint64_t st_seed = 1;
  bool contract = false;
  st->add_option("instance", st_in)->required();
  st->add_option("--samples", samples, "random (o, d, t) samples");
  st->add_option("--blowup", blowup, "ball sizes F for the free-flow blow-up table")->delimiter(',');
  st->add_option("--origins", blowup_origins, "origins for the blow-up table");
  st->add_option("--seed", st_seed);
  st->add_flag("--contract", contract, "contract degree-2 chains first");
  st->callback([&] {
    auto g = tdo::load_instance_file(st_in);
    if (contract) g = tdo::contract_degree2(g);
    const auto s = tdo::instance_stats(g);
    std::cout << "nodes " << s.nodes << "\narcs " << s.arcs << "\nconstant_arcs " << s.constant_arcs
              << "\npwl_arcs " << s.pwl_arcs << "\nbreakpoints_total " << s.total_breakpoints
              << "\nbreakpoints_avg " << s.avg_breakpoints << "\nbreakpoints_max " << s.max_breakpoints
              << "\nconcavity_spoiling " << s.concavity_spoiling << "\narc_lambda_max " << s.lambda_max
              << "\narc_lambda_min " << s.lambda_min << "\nmax_delay " << s.max_delay << '\n';
    const auto a = tdo::validate_assumptions(g, samples, st_seed);
    std::cout << "samples " << a.samples << "\nzeta_avg " << a.zeta_avg << "\nzeta_max " << a.zeta_max
              << "\nlambda_max " << a.lambda_max << "\nneg_lambda_min " << a.neg_lambda_min << '\n';
    if (!blowup.empty()) {
      auto act = g.active_vertices();
      std::vector<tdo::VertexId> origins;
      for (std::size_t i = 0; i < std::min(blowup_origins, act.size()); ++i) {
        origins.push_back(act[i * act.size() / std::min(blowup_origins, act.size())]);
      }
      std::cout << "F,avg_size,max_size,avg_ratio,max_ratio\n";
      for (const auto& row : tdo::freeflow_blowup(g, origins, blowup)) {
        std::cout << row.f << ',' << row.avg_size << ',' << row.max_size << ',' << row.avg_ratio << ','
                  << row.max_ratio << '\n';
      }
    }
  });

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "build and save a summary store");
  std::string pre_kind, pre_in, pre_out;
  Settings pre_settings;
  pre->add_option("kind", pre_kind, "flat or horn")->required()->check(CLI::IsMember({"flat", "horn"}));
  pre->add_option("instance", pre_in)->required();
  pre->add_option("-o,--output", pre_out, "store file")->required();
  pre_settings.attach(pre);
  pre->callback([&] {
    const auto cfg = pre_settings.load();
    const auto g = tdo::load_instance_file(pre_in);
    tdo::PreprocessStats ps;
    std::shared_ptr<const tdo::SummaryStore> store;
    if (pre_kind == "flat") {
      const auto set = tdo::select_landmarks(g, cfg);
      if (set.partial) std::cerr << "warning: only " << set.vertices.size() << " landmarks could be selected\n";
      store = tdo::FlatOracle::preprocess(g, set.vertices, cfg.oracle(), &ps).core().store_ptr();
    } else {
      const auto h = tdo::build_hierarchy(g, tdo::hierarchy_spec(g, cfg));
      store = tdo::HornOracle::preprocess(g, h, cfg.oracle(), cfg.horn, &ps).core().store_ptr();
    }
    store->save(pre_out);
    std::cout << "landmarks " << ps.landmarks << "\ntdd_runs " << ps.tdd_runs << "\nsettled " << ps.settled
              << "\nrefined_intervals " << ps.refined_intervals << "\nseconds " << ps.seconds
              << "\npacked_bytes " << store->packed_bytes() << "\nraw_bytes " << store->raw_bytes() << '\n';
  });

  // query
  auto* qry = app.add_subcommand("query", "answer one travel-time query");
  std::string q_in, q_store, q_patches, algo = "fca";
  tdo::VertexId q_o = 0, q_d = 0;
  double q_t = 0;
  std::size_t q_n = 6;
  int q_r = 1;
  bool q_path = false;
  Settings q_settings;
  qry->add_option("instance", q_in)->required();
  qry->add_option("store", q_store)->required();
  qry->add_option("--from", q_o)->required();
  qry->add_option("--to", q_d)->required();
  qry->add_option("--at", q_t, "departure time in seconds")->required();
  qry->add_option("--algo", algo)->check(CLI::IsMember({"fca", "fca+", "rqa", "hqa", "tdd"}));
  qry->add_option("--n", q_n, "landmark count for fca+");
  qry->add_option("--r", q_r, "recursion budget for rqa");
  qry->add_option("--patches", q_patches, "live patch file (default <store>.tdpt when present)");
  qry->add_flag("--path", q_path, "print the arc path");
  q_settings.attach(qry);
  qry->callback([&] {
    const auto cfg = q_settings.load();
    const auto g = tdo::load_instance_file(q_in);
    if (q_o >= g.num_vertices() || q_d >= g.num_vertices()) throw std::invalid_argument("vertex out of range");
    tdo::QueryResult r;
    if (algo == "tdd") {
      auto res = tdo::tdd(g, q_o, q_t, tdo::StopCriterion::to_target(q_d));
      r.rank = res.rank();
      r.exit = "target";
      if (auto l = res.label_of(q_d)) {
        r.value = *l - q_t;
        r.exactness = tdo::Exactness::exact;
        r.guarantee = tdo::Guarantee::exact;
        r.path = res.path_to(g, q_d, false);
      }
    } else {
      auto store = std::make_shared<const tdo::SummaryStore>(tdo::SummaryStore::load(q_store));
      const auto pp = patches_path(q_store, q_patches);
      if (store->is_horn()) {
        if (algo != "hqa") throw std::invalid_argument("a horn store answers hqa queries only");
        tdo::HornOracle oracle(g, store, cfg.trap, cfg.horn);
        tdo::LiveTraffic live(oracle.core());
        if (exists(pp)) live.load(pp);
        r = oracle.hqa(q_o, q_d, q_t);
      } else {
        if (algo == "hqa") throw std::invalid_argument("a flat store cannot answer hqa queries");
        tdo::FlatOracle oracle(g, store, cfg.trap);
        tdo::LiveTraffic live(oracle.core());
        if (exists(pp)) live.load(pp);
        r = algo == "fca" ? oracle.fca(q_o, q_d, q_t) : algo == "fca+" ? oracle.fca_plus(q_o, q_d, q_t, q_n)
                                                                       : oracle.rqa(q_o, q_d, q_t, q_r);
      }
    }
    print_result(r, q_path);
    if (!r.value) status = kUnreachable;
  });

  // bench
  auto* bn = app.add_subcommand("bench", "random-query experiment against time-dependent Dijkstra");
  std::string b_in, b_store, b_rows, b_summary, b_range = "any";
  std::vector<std::string> b_algos;
  tdo::QuerySpec qspec;
  bool no_truth = false;
  Settings b_settings;
  bn->add_option("instance", b_in)->required();
  bn->add_option("store", b_store)->required();
  bn->add_option("--queries", qspec.count);
  bn->add_option("--seed", qspec.seed);
  bn->add_option("--range", b_range)->check(CLI::IsMember({"any", "mixed", "short", "mid", "long"}));
  bn->add_option("--algos", b_algos, "fca, fca+, rqa, hqa")->delimiter(',');
  bn->add_option("--rows", b_rows, "per-query CSV output");
  bn->add_option("--summary", b_summary, "summary CSV output (default stdout)");
  bn->add_flag("--no-truth", no_truth, "skip the Dijkstra ground truth");
  b_settings.attach(bn);
  bn->callback([&] {
    const auto cfg = b_settings.load();
    const auto g = tdo::load_instance_file(b_in);
    auto store = std::make_shared<const tdo::SummaryStore>(tdo::SummaryStore::load(b_store));
    if (b_range == "short") qspec.range = tdo::RangeClass::short_range;
    if (b_range == "mid") qspec.range = tdo::RangeClass::mid_range;
    if (b_range == "long") qspec.range = tdo::RangeClass::long_range;
    const auto queries = b_range == "mixed" ? tdo::make_mixed_queries(g, qspec) : tdo::make_queries(g, qspec);
    std::unique_ptr<tdo::FlatOracle> flat;
    std::unique_ptr<tdo::HornOracle> horn;
    std::vector<tdo::Algorithm> algos;
    if (store->is_horn()) {
      horn = std::make_unique<tdo::HornOracle>(g, store, cfg.trap, cfg.horn);
      if (b_algos.empty()) b_algos = {"hqa"};
    } else {
      flat = std::make_unique<tdo::FlatOracle>(g, store, cfg.trap);
      if (b_algos.empty()) b_algos = {"fca", "fca+", "rqa"};
    }
    for (const auto& a : b_algos) {
      if (a == "hqa" && horn) {
        algos.push_back({a, [&](const tdo::Query& q) { return horn->hqa(q.origin, q.destination, q.departure); }});
      } else if (flat && a == "fca") {
        algos.push_back({a, [&](const tdo::Query& q) { return flat->fca(q.origin, q.destination, q.departure); }});
      } else if (flat && a == "fca+") {
        algos.push_back({a, [&](const tdo::Query& q) { return flat->fca_plus(q.origin, q.destination, q.departure); }});
      } else if (flat && a == "rqa") {
        algos.push_back({a, [&](const tdo::Query& q) { return flat->rqa(q.origin, q.destination, q.departure); }});
      } else {
        throw std::invalid_argument("algorithm '" + a + "' does not fit this store");
      }
    }
    const auto report = tdo::run_benchmark(g, queries, algos, !no_truth, cfg.threads);
    if (!b_rows.empty()) {
      std::ofstream out(b_rows);
      tdo::write_rows_csv(report, out);
    }
    if (b_summary.empty()) {
      tdo::write_summary_csv(report, std::cout);
    } else {
      std::ofstream out(b_summary);
      tdo::write_summary_csv(report, out);
    }
  });

  // update
  auto* up = app.add_subcommand("update", "apply a live-traffic disruption and persist the patches");
  std::string u_in, u_store, u_patches;
  tdo::Disruption dis;
  std::vector<double> window;
  std::vector<std::uint64_t> expire;
  bool allow_decrease = false;
  Settings u_settings;
  up->add_option("instance", u_in)->required();
  up->add_option("store", u_store)->required();
  auto* arc_opt = up->add_option("--arc", dis.arc);
  auto* win_opt = up->add_option("--window", window, "start,end in seconds")->delimiter(',')->expected(2);
  auto* factor = up->add_option("--factor", dis.factor, "delay factor over the window");
  auto* block = up->add_flag("--block", dis.block, "close the arc for the window");
  factor->excludes(block);
  up->add_option("--expire", expire, "disruption id to remove, repeatable");
  up->add_option("--patches", u_patches, "patch file (default <store>.tdpt)");
  up->add_flag("--allow-decrease", allow_decrease, "accept delay-lowering disruptions");
  u_settings.attach(up);
  up->callback([&] {
    const auto cfg = u_settings.load();
    const auto g = tdo::load_instance_file(u_in);
    auto store = std::make_shared<const tdo::SummaryStore>(tdo::SummaryStore::load(u_store));
    tdo::OracleCore core(g, store, cfg.trap);
    tdo::LiveTraffic live(core, {allow_decrease});
    const auto pp = patches_path(u_store, u_patches);
    if (exists(pp)) live.load(pp);
    for (auto id : expire) {
      if (!live.expire(id)) std::cerr << "warning: no live disruption with id " << id << '\n';
    }
    if (arc_opt->count()) {
      if (!win_opt->count()) throw std::invalid_argument("--arc needs --window");
      if (!factor->count() && !block->count()) throw std::invalid_argument("give --factor or --block");
      dis.start = window[0];
      dis.end = window[1];
      const auto rep = live.apply(dis);
      std::cout << "id " << rep.id << "\naffected " << rep.affected.size() << "\npatches " << rep.patches
                << "\ndestinations " << rep.destinations << "\nseconds " << rep.seconds << '\n';
    }
    live.save(pp);
    std::cout << "live " << live.live().size() << '\n';
  });

  // inspect-store
  auto* ins = app.add_subcommand("inspect-store", "describe a summary store");
  std::string i_store;
  bool per_landmark = false;
  ins->add_option("store", i_store)->required();
  ins->add_flag("--landmarks", per_landmark, "list every landmark");
  ins->callback([&] {
    const auto s = tdo::SummaryStore::load(i_store);
    std::size_t records = 0, stored = 0, kinds[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < s.num_landmarks(); ++i) {
      const auto& view = s.view(i);
      for (auto v : view.destinations()) {
        const auto off = *view.offset_of(v);
        const auto k = view.kind_at(off);
        ++records;
        ++kinds[static_cast<int>(k)];
        if (k != tdo::RecordKind::ref) stored += view.decode_at(off).size();
      }
    }
    std::cout << "kind " << (s.is_horn() ? "horn" : "flat") << "\nvertices " << s.num_vertices() << "\nperiod "
              << s.period() << "\nlandmarks " << s.num_landmarks() << "\nscale " << s.codec().scale << "\nbucket "
              << s.codec().bucket << "\ncompressed " << (s.codec().compress ? 1 : 0) << "\npacked_bytes "
              << s.packed_bytes() << "\nraw_bytes " << s.raw_bytes() << "\nrecords " << records << "\nrefs "
              << kinds[static_cast<int>(tdo::RecordKind::ref)] << "\nnarrow "
              << kinds[static_cast<int>(tdo::RecordKind::narrow)] << "\nwide "
              << kinds[static_cast<int>(tdo::RecordKind::wide)] << "\nbreakpoints_stored " << stored << '\n';
    if (per_landmark) {
      std::cout << "landmark,level,coverage,packed,raw\n";
      for (std::size_t i = 0; i < s.num_landmarks(); ++i) {
        const auto& e = s.entry(i);
        std::cout << e.landmark << ',' << int(e.level) << ',' << e.coverage << ',' << e.packed_size << ','
                  << e.raw_size << '\n';
      }
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  } catch (const tdo::InstanceError& e) {
    std::cerr << "invalid instance: " << e.what() << '\n';
    return kInvalid;
  } catch (const tdo::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return status;
}
