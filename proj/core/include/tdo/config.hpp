#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdo/horn_oracle.hpp"
#include "tdo/landmarks.hpp"
#include "tdo/oracle.hpp"

namespace tdo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings read from `key = value` lines; '#' starts a comment.
struct Config {
  TrapConfig trap;
  CodecConfig codec;
  unsigned threads = 0;

  LandmarkMethod method = LandmarkMethod::sparse_random;
  std::size_t landmarks = 100;
  std::size_t exclusion = 0;  // 0 picks n / (2k)
  std::uint64_t seed = 1;
  std::string partition;  // cell file for K, SK and H

  HornParams horn;
  std::size_t hierarchy_top = 0;  // 0 picks the configured landmark count
  std::vector<std::size_t> level_sizes;  // empty: scaled from the reference hierarchy
  std::vector<std::size_t> coverage_sizes;
  std::vector<std::size_t> exclusion_sizes;
  bool hierarchy_sparse = true;

  OracleConfig oracle() const;
};

/// Applies one setting; throws ConfigError on unknown keys or bad values.
void apply_setting(Config& c, const std::string& key, const std::string& value);
Config parse_config(std::istream& in);
Config load_config(const std::string& path);

/// Landmarks of the configured method and size.
LandmarkSet select_landmarks(const TdGraph& g, const Config& c);
/// Hierarchy from the configured sizes, or scaled defaults.
HierarchySpec hierarchy_spec(const TdGraph& g, const Config& c);

}  // namespace tdo
