#pragma once

// Finite directed multigraphs without sinks or sources, their finite paths,
// and the prefix metric on truncated infinite paths.
//
// Orientation: an edge e runs from s(e) to r(e). Its map sends the space at
// r(e) into the space at s(e), and a path (a_1, ..., a_k) chains as
// r(a_i) == s(a_{i+1}).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mwkit/error.hpp"

namespace mwkit {

using VertexId = int;
using EdgeId = int;

struct RawEdge {
  EdgeId id;
  VertexId source;
  VertexId range;
};

/// Unvalidated description as read from a config file.
struct RawGraph {
  std::vector<VertexId> vertices;
  std::vector<RawEdge> edges;
};

/// Sequence of chained edge ids. Used both for elements of E^k and for finite
/// truncations of infinite paths.
using Path = std::vector<EdgeId>;

class DirectedGraph {
 public:
  DirectedGraph() = default;

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return source_.size(); }

  VertexId source(EdgeId e) const { return source_.at(static_cast<std::size_t>(e)); }
  VertexId range(EdgeId e) const { return range_.at(static_cast<std::size_t>(e)); }

  /// Edges e with s(e) == v, ascending.
  const std::vector<EdgeId>& edges_from(VertexId v) const {
    return outgoing_.at(static_cast<std::size_t>(v));
  }
  /// Edges e with r(e) == v, ascending.
  const std::vector<EdgeId>& edges_into(VertexId v) const {
    return incoming_.at(static_cast<std::size_t>(v));
  }

  bool is_path(const Path& path) const {
    if (path.empty()) {
      return false;
    }
    for (EdgeId e : path) {
      if (e < 0 || static_cast<std::size_t>(e) >= edge_count()) {
        return false;
      }
    }
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      if (range(path[i]) != source(path[i + 1])) {
        return false;
      }
    }
    return true;
  }

  VertexId path_source(const Path& path) const { return source(path.front()); }
  VertexId path_range(const Path& path) const { return range(path.back()); }

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.vertex_count_ == b.vertex_count_ && a.source_ == b.source_ &&
           a.range_ == b.range_;
  }

  friend DirectedGraph validate_graph(const RawGraph& raw);

 private:
  std::size_t vertex_count_ = 0;
  std::vector<VertexId> source_;
  std::vector<VertexId> range_;
  std::vector<std::vector<EdgeId>> outgoing_;
  std::vector<std::vector<EdgeId>> incoming_;
};

namespace detail {

inline std::optional<std::string> dense_id_problem(std::vector<int> ids,
                                                   const char* kind) {
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] != static_cast<int>(i)) {
      return std::string(kind) + " ids must be 0.." + std::to_string(ids.size() - 1);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Checks ids, endpoints and the no-sink/no-source condition. Throws Error
/// carrying every issue found, not just the first.
inline DirectedGraph validate_graph(const RawGraph& raw) {
  std::vector<Issue> issues;

  std::vector<int> vertex_ids = raw.vertices;
  std::sort(vertex_ids.begin(), vertex_ids.end());
  for (std::size_t i = 1; i < vertex_ids.size(); ++i) {
    if (vertex_ids[i] == vertex_ids[i - 1]) {
      issues.push_back({ErrorCode::DuplicateId, "vertex " + std::to_string(vertex_ids[i]), {}});
    }
  }
  std::vector<int> edge_ids;
  for (const auto& e : raw.edges) {
    edge_ids.push_back(e.id);
  }
  std::sort(edge_ids.begin(), edge_ids.end());
  for (std::size_t i = 1; i < edge_ids.size(); ++i) {
    if (edge_ids[i] == edge_ids[i - 1]) {
      issues.push_back({ErrorCode::DuplicateId, "edge " + std::to_string(edge_ids[i]), {}});
    }
  }
  if (!issues.empty()) {
    throw Error(std::move(issues));
  }
  if (auto problem = detail::dense_id_problem(raw.vertices, "vertex")) {
    issues.push_back({ErrorCode::NonDenseIds, "vertices", *problem});
  }
  if (auto problem = detail::dense_id_problem(edge_ids, "edge")) {
    issues.push_back({ErrorCode::NonDenseIds, "edges", *problem});
  }
  if (!issues.empty()) {
    throw Error(std::move(issues));
  }

  const std::size_t n_vertices = raw.vertices.size();
  auto known = [&](VertexId v) { return v >= 0 && static_cast<std::size_t>(v) < n_vertices; };

  DirectedGraph g;
  g.vertex_count_ = n_vertices;
  g.source_.assign(raw.edges.size(), -1);
  g.range_.assign(raw.edges.size(), -1);
  g.outgoing_.assign(n_vertices, {});
  g.incoming_.assign(n_vertices, {});
  for (const auto& e : raw.edges) {
    if (!known(e.source) || !known(e.range)) {
      issues.push_back({ErrorCode::DanglingEdgeEndpoint, std::to_string(e.id),
                        "endpoint not a declared vertex"});
      continue;
    }
    g.source_[static_cast<std::size_t>(e.id)] = e.source;
    g.range_[static_cast<std::size_t>(e.id)] = e.range;
  }
  if (!issues.empty()) {
    throw Error(std::move(issues));
  }
  for (std::size_t e = 0; e < g.source_.size(); ++e) {
    g.outgoing_[static_cast<std::size_t>(g.source_[e])].push_back(static_cast<EdgeId>(e));
    g.incoming_[static_cast<std::size_t>(g.range_[e])].push_back(static_cast<EdgeId>(e));
  }
  for (std::size_t v = 0; v < n_vertices; ++v) {
    if (g.outgoing_[v].empty()) {
      issues.push_back({ErrorCode::SinkVertex, std::to_string(v), "no edge leaves it"});
    }
    if (g.incoming_[v].empty()) {
      issues.push_back({ErrorCode::SourceVertex, std::to_string(v), "no edge enters it"});
    }
  }
  if (!issues.empty()) {
    throw Error(std::move(issues));
  }
  return g;
}

namespace detail {

template <typename Visit>
void extend_paths(const DirectedGraph& g, Path& prefix, std::size_t k, Visit& visit) {
  if (prefix.size() == k) {
    visit(prefix);
    return;
  }
  for (EdgeId e : g.edges_from(g.range(prefix.back()))) {
    prefix.push_back(e);
    extend_paths(g, prefix, k, visit);
    prefix.pop_back();
  }
}

}  // namespace detail

/// Calls `visit(path)` for every path of length k starting at v, in
/// lexicographic edge order. The path reference is only valid during the call.
template <typename Visit>
void for_each_path_from(const DirectedGraph& g, VertexId v, std::size_t k, Visit&& visit) {
  if (k == 0) {
    return;
  }
  Path prefix;
  prefix.reserve(k);
  for (EdgeId e : g.edges_from(v)) {
    prefix.push_back(e);
    detail::extend_paths(g, prefix, k, visit);
    prefix.pop_back();
  }
}

/// E^k(v): paths of length k with s(a_1) == v.
inline std::vector<Path> paths_from(const DirectedGraph& g, VertexId v, std::size_t k) {
  std::vector<Path> out;
  for_each_path_from(g, v, k, [&](const Path& p) { out.push_back(p); });
  return out;
}

/// E^k, lexicographically ordered by edge id.
inline std::vector<Path> paths_of_length(const DirectedGraph& g, std::size_t k) {
  if (k == 0) {
    throw Error(ErrorCode::InvalidArgument, "path length must be at least 1");
  }
  std::vector<Path> out;
  Path prefix;
  prefix.reserve(k);
  auto visit = [&](const Path& p) { out.push_back(p); };
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    prefix.push_back(static_cast<EdgeId>(e));
    detail::extend_paths(g, prefix, k, visit);
    prefix.pop_back();
  }
  return out;
}

/// All paths of length 1..max_length whose range equals their source, ordered
/// by length and then lexicographically.
inline std::vector<Path> cycles_up_to(const DirectedGraph& g, std::size_t max_length) {
  if (max_length == 0) {
    throw Error(ErrorCode::InvalidArgument, "cycle length bound must be at least 1");
  }
  std::vector<Path> out;
  for (std::size_t k = 1; k <= max_length; ++k) {
    for (auto& p : paths_of_length(g, k)) {
      if (g.path_source(p) == g.path_range(p)) {
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

inline std::size_t common_prefix_length(const Path& a, const Path& b) {
  const auto limit = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < limit && a[i] == b[i]) {
    ++i;
  }
  return i;
}

/// c^|a ^ b| for distinct truncations, 0 for equal ones. Both truncations
/// must start at the same vertex.
inline double path_metric(const DirectedGraph& g, const Path& a, const Path& b, double c) {
  if (!(c > 0.0 && c < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "metric base must lie in (0,1)");
  }
  if (a.empty() || b.empty() || g.path_source(a) != g.path_source(b)) {
    throw Error(ErrorCode::DifferentStartVertex, "prefixes start at different vertices");
  }
  if (a == b) {
    return 0.0;
  }
  return std::pow(c, static_cast<double>(common_prefix_length(a, b)));
}

/// Walks first-choice edges from v until a vertex repeats. Returns the
/// connecting prefix (possibly empty) and the cycle it lands on.
inline std::pair<Path, Path> walk_to_cycle(const DirectedGraph& g, VertexId v) {
  std::vector<VertexId> visited{v};
  Path walk;
  VertexId at = v;
  while (true) {
    EdgeId e = g.edges_from(at).front();
    walk.push_back(e);
    at = g.range(e);
    auto it = std::find(visited.begin(), visited.end(), at);
    if (it != visited.end()) {
      const auto start = static_cast<std::size_t>(it - visited.begin());
      Path prefix(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(start));
      Path cycle(walk.begin() + static_cast<std::ptrdiff_t>(start), walk.end());
      return {prefix, cycle};
    }
    visited.push_back(at);
  }
}

inline std::string format_path(const Path& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i != 0) {
      out += ",";
    }
    out += std::to_string(p[i]);
  }
  return out;
}

}  // namespace mwkit
