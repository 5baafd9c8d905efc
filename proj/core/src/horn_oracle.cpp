#include "tdo/horn_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "query_engine.hpp"

namespace tdo {

void HornParams::validate() const {
  if (!(a >= 0)) throw std::invalid_argument("a must be non-negative");
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  if (!(gamma > 1)) throw std::invalid_argument("gamma must exceed 1");
  if (!(xi >= 0)) throw std::invalid_argument("xi must be non-negative");
  if (budget < 0) throw std::invalid_argument("budget must be non-negative");
}

HornOracle HornOracle::preprocess(const TdGraph& g, const LandmarkHierarchy& hierarchy,
                                  const OracleConfig& cfg, const HornParams& params,
                                  PreprocessStats* stats) {
  params.validate();
  std::vector<VertexId> ids;
  std::vector<std::vector<VertexId>> coverage;
  std::vector<int> levels;
  for (const auto& hl : hierarchy.landmarks) {
    ids.push_back(hl.id);
    coverage.push_back(hl.coverage);
    levels.push_back(hl.level);
  }
  auto store = std::make_shared<SummaryStore>(build_store(g, ids, &coverage, &levels, cfg, true, stats));
  return HornOracle(g, std::move(store), cfg.trap, params);
}

HornOracle::HornOracle(const TdGraph& g, std::shared_ptr<const SummaryStore> store, TrapConfig trap,
                       HornParams params)
    : core_(g, std::move(store), trap), params_(params) {
  params_.validate();
  const auto& s = core_.store();
  if (!s.is_horn()) throw std::invalid_argument("hierarchical oracle needs a horn store");
  int top = 0;
  for (std::size_t i = 0; i < s.num_landmarks(); ++i) top = std::max(top, static_cast<int>(s.entry(i).level));
  level_coverage_.assign(static_cast<std::size_t>(top), 0);
  for (std::size_t i = 0; i < s.num_landmarks(); ++i) {
    const auto& e = s.entry(i);
    auto& c = level_coverage_[static_cast<std::size_t>(e.level) - 1];
    c = c == 0 ? e.coverage : std::min<std::size_t>(c, e.coverage);
  }
}

int HornOracle::appropriate_level(double guess) const {
  for (std::size_t i = 0; i < level_coverage_.size(); ++i) {
    if (static_cast<double>(level_coverage_[i]) >= guess) return static_cast<int>(i) + 1;
  }
  return num_levels();
}

QueryResult HornOracle::hqa(VertexId o, VertexId d, Seconds t) const {
  detail::QueryRun run(core_, o, d, t);
  const detail::Usable informed = [&](VertexId l) { return core_.informed(l, d); };
  double guess = std::ceil(std::sqrt(static_cast<double>(core_.graph().num_vertices())));
  const double ratio = core_.epsilon() / params_.beta;
  while (auto s = run.settle()) {
    if (run.exact()) break;
    const auto f = static_cast<double>(run.ball_rank());
    while (std::pow(f, 1.0 + params_.a) > guess) guess *= params_.gamma;
    const int alh = appropriate_level(guess);
    if (run.offer(s->vertex, s->label, informed) && core_.level(s->vertex) >= alh) {
      const detail::Usable upper = [&, alh](VertexId l) { return core_.level(l) >= alh && core_.informed(l, d); };
      run.expand(params_.budget, upper);
      return run.result(Guarantee::sigma, "alh");
    }
    if (run.has_candidate() && *run.nearest_candidate_distance() < ratio * run.radius()) {
      return run.result(Guarantee::eps_psi, "esc");
    }
  }
  return run.result(Guarantee::eps_psi, "exhausted");
}

}  // namespace tdo
