#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mwkit.hpp"

#ifndef MWKIT_CONFIG_DIR
#define MWKIT_CONFIG_DIR "configs"
#endif

namespace mwkit::testing {

inline std::string config_path(const std::string& name) { return std::string(MWKIT_CONFIG_DIR) + "/" + name; }

inline MWGraph load_system(const std::string& name) { return build_system(load_config(config_path(name))); }

inline double config_resolution(const std::string& name) {
  return *load_config(config_path(name)).number("resolution");
}

/// One vertex, one loop per map, ambient [0,1].
inline MWGraph interval_system(const std::vector<std::pair<double, double>>& maps) {
  RawSystem raw;
  raw.graph.vertices = {0};
  raw.ambient.emplace(0, Box::from_bounds({0.0}, {1.0}));
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const int id = static_cast<int>(i);
    raw.graph.edges.push_back({id, 0, 0});
    raw.maps.push_back({id, {{maps[i].first}}, {maps[i].second}});
  }
  return validate_mw(raw);
}

inline std::set<std::int64_t> cell_indices_1d(const TaggedBoxSet& s) {
  std::set<std::int64_t> out;
  for (CellKey k : s.cells()) out.insert(s.grid().index(k)[0]);
  return out;
}

inline std::set<std::pair<std::int64_t, std::int64_t>> cell_indices_2d(const TaggedBoxSet& s) {
  std::set<std::pair<std::int64_t, std::int64_t>> out;
  for (CellKey k : s.cells()) {
    const auto idx = s.grid().index(k);
    out.insert({idx[0], idx[1]});
  }
  return out;
}

// Oracles below use integer arithmetic only.

/// Left endpoints, in units of 3^-n, of the level-n middle-thirds intervals.
inline std::set<std::int64_t> triadic_intervals(int n) {
  std::set<std::int64_t> out{0};
  for (int level = 0; level < n; ++level) {
    std::set<std::int64_t> next;
    for (auto a : out) {
      next.insert(3 * a);
      next.insert(3 * a + 2);
    }
    out = std::move(next);
  }
  return out;
}

/// Lower-left corners, in units of 2^-n, of the level-n triangles of the
/// right-angle gasket with maps (x,y)/2 + {(0,0), (1/2,0), (0,1/2)}.
inline std::set<std::pair<std::int64_t, std::int64_t>> gasket_triangles(int n) {
  std::set<std::pair<std::int64_t, std::int64_t>> out{{0, 0}};
  for (int level = 0; level < n; ++level) {
    std::set<std::pair<std::int64_t, std::int64_t>> next;
    for (auto [x, y] : out) {
      next.insert({x, y});
      next.insert({x + (std::int64_t{1} << level), y});
      next.insert({x, y + (std::int64_t{1} << level)});
    }
    out = std::move(next);
  }
  return out;
}

inline std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace mwkit::testing
