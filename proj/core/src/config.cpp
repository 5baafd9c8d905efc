#include "tdo/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace tdo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) throw ConfigError("bad value '" + v + "' for " + key);
  return out;
}

bool boolean(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("bad value '" + v + "' for " + key);
}

std::vector<std::size_t> sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number<std::size_t>(key, trim(item)));
  return out;
}

}  // namespace

OracleConfig Config::oracle() const {
  OracleConfig o;
  o.trap = trap;
  o.codec = codec;
  o.threads = threads;
  return o;
}

void apply_setting(Config& c, const std::string& key, const std::string& value) {
  const auto& k = key;
  const auto& v = value;
  if (k == "epsilon") c.trap.epsilon = number<double>(k, v);
  else if (k == "tau") c.trap.tau = number<double>(k, v);
  else if (k == "max_refinement_depth") c.trap.max_refinement_depth = number<int>(k, v);
  else if (k == "scale") c.codec.scale = number<double>(k, v);
  else if (k == "bucket") c.codec.bucket = number<double>(k, v);
  else if (k == "compress") c.codec.compress = boolean(k, v);
  else if (k == "threads") c.threads = number<unsigned>(k, v);
  else if (k == "landmark_method") {
    try {
      c.method = parse_landmark_method(v);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  } else if (k == "landmarks") c.landmarks = number<std::size_t>(k, v);
  else if (k == "exclusion") c.exclusion = number<std::size_t>(k, v);
  else if (k == "seed") c.seed = number<std::uint64_t>(k, v);
  else if (k == "partition") c.partition = v;
  else if (k == "horn.a") c.horn.a = number<double>(k, v);
  else if (k == "horn.beta") c.horn.beta = number<double>(k, v);
  else if (k == "horn.gamma") c.horn.gamma = number<double>(k, v);
  else if (k == "horn.xi") c.horn.xi = number<double>(k, v);
  else if (k == "horn.budget") c.horn.budget = number<int>(k, v);
  else if (k == "hierarchy.top") c.hierarchy_top = number<std::size_t>(k, v);
  else if (k == "hierarchy.levels") c.level_sizes = sizes(k, v);
  else if (k == "hierarchy.coverage") c.coverage_sizes = sizes(k, v);
  else if (k == "hierarchy.exclusion") c.exclusion_sizes = sizes(k, v);
  else if (k == "hierarchy.sparse") c.hierarchy_sparse = boolean(k, v);
  else throw ConfigError("unknown setting '" + k + "'");
}

Config parse_config(std::istream& in) {
  Config c;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(no) + ": expected key = value");
    try {
      apply_setting(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(no) + ": " + e.what());
    }
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  return parse_config(in);
}

LandmarkSet select_landmarks(const TdGraph& g, const Config& c) {
  const auto n = g.num_active_vertices();
  const std::size_t exclusion = c.exclusion ? c.exclusion : n / (2 * std::max<std::size_t>(1, c.landmarks));
  auto cells = [&] {
    if (c.partition.empty()) throw ConfigError("landmark method " + std::string(to_string(c.method)) + " needs a partition file");
    return load_partition(c.partition, g);
  };
  switch (c.method) {
    case LandmarkMethod::random: return select_random(g, c.landmarks, c.seed);
    case LandmarkMethod::sparse_random: return select_sparse_random(g, c.landmarks, exclusion, c.seed);
    case LandmarkMethod::important_random: return select_important_random(g, c.landmarks, c.seed);
    case LandmarkMethod::partition: return select_partition_boundary(g, cells());
    case LandmarkMethod::sparse_partition: return select_sparse_partition(g, cells(), c.landmarks, exclusion, c.seed);
    case LandmarkMethod::hybrid: return select_hybrid(g, cells(), c.landmarks, c.seed);
  }
  throw ConfigError("unknown landmark method");
}

HierarchySpec hierarchy_spec(const TdGraph& g, const Config& c) {
  HierarchySpec spec;
  if (c.level_sizes.empty()) {
    spec = scaled_hierarchy_spec(g.num_active_vertices(), c.hierarchy_top ? c.hierarchy_top : c.landmarks);
  } else {
    spec.level_sizes = c.level_sizes;
    spec.coverage_sizes = c.coverage_sizes;
    spec.exclusion_sizes = c.exclusion_sizes;
  }
  spec.sparse = c.hierarchy_sparse;
  spec.xi = c.horn.xi;
  spec.seed = c.seed;
  return spec;
}

}  // namespace tdo
