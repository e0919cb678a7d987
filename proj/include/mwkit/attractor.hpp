#pragma once

// The invariant list (K_v) of a Mauldin-Williams graph, computed by iterating
// the graph-directed Hutchinson operator on box coverings from the ambient
// boxes downward. Every iterate is an outer approximation of K.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mwkit/error.hpp"
#include "mwkit/geometry.hpp"
#include "mwkit/mw_graph.hpp"

namespace mwkit {

using Covering = std::vector<TaggedBoxSet>;  // indexed by vertex id

struct InvariantList {
  Covering sets;
  double resolution = 0.0;
  double residual = 0.0;     // max_v d_H(step(K)_v, K_v)
  int iterations = 0;
  // min(c^n D / (1 - c) + 2h, (residual + cell diameter) / (1 - c))
  double error_bound = 0.0;
  std::vector<double> changes;  // d_H between consecutive iterates

  const TaggedBoxSet& at(VertexId v) const { return sets.at(static_cast<std::size_t>(v)); }
};

class MaxIterationsExceeded : public Error {
 public:
  explicit MaxIterationsExceeded(InvariantList partial)
      : Error(ErrorCode::MaxIterationsExceeded,
              "no convergence after " + std::to_string(partial.iterations) + " iterations"),
        partial_(std::move(partial)) {}

  const InvariantList& partial() const noexcept { return partial_; }

 private:
  InvariantList partial_;
};

/// S'_v = union over edges e leaving v of the outer image phi_e(S_{r(e)}).
inline Covering hutchinson_step(const MWGraph& mw, const Covering& sets) {
  const auto& g = mw.graph();
  if (sets.size() != g.vertex_count()) {
    throw Error(ErrorCode::TagMismatch, "covering must have one set per vertex");
  }
  const double h = sets.front().resolution();
  for (std::size_t v = 0; v < sets.size(); ++v) {
    if (sets[v].vertex() != static_cast<VertexId>(v)) {
      throw Error(ErrorCode::TagMismatch, "covering entry " + std::to_string(v) + " has wrong tag");
    }
    if (sets[v].resolution() != h) {
      throw Error(ErrorCode::GridMismatch, "covering entries must share a resolution");
    }
  }
  Covering out;
  out.reserve(sets.size());
  for (std::size_t v = 0; v < sets.size(); ++v) {
    const auto vertex = static_cast<VertexId>(v);
    const Grid grid = Grid::covering(mw.ambient(vertex), h);
    std::vector<Box> images;
    for (EdgeId e : g.edges_from(vertex)) {
      const auto& src = sets[static_cast<std::size_t>(g.range(e))];
      const auto& map = mw.map(e);
      for (CellKey k : src.cells()) images.push_back(map.image_box(src.grid().cell_box(src.grid().index(k))));
    }
    out.push_back(TaggedBoxSet::covering_of(vertex, grid, images));
  }
  return out;
}

inline Covering ambient_covering(const MWGraph& mw, double h) {
  Covering sets;
  for (std::size_t v = 0; v < mw.graph().vertex_count(); ++v) {
    const auto vertex = static_cast<VertexId>(v);
    sets.push_back(TaggedBoxSet::full(vertex, mw.ambient(vertex), h));
  }
  return sets;
}

inline double covering_distance(const Covering& a, const Covering& b) {
  double d = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) d = std::max(d, hausdorff_distance(a[v], b[v]));
  return d;
}

/// Iterates from the ambient boxes until the iterate is stationary, or until
/// c^n D <= h and the last change is at most h.
inline InvariantList solve_invariant_list(const MWGraph& mw, double h, int max_iterations = 200) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "resolution must be positive");
  const double c = global_ratio(mw).upper;
  const double diameter = mw.ambient_diameter();

  InvariantList result;
  result.resolution = h;
  result.sets = ambient_covering(mw, h);
  bool converged = false;
  while (result.iterations < max_iterations) {
    Covering next = hutchinson_step(mw, result.sets);
    const double change = covering_distance(next, result.sets);
    result.sets = std::move(next);
    ++result.iterations;
    result.changes.push_back(change);
    const double tail = std::pow(c, result.iterations) * diameter;
    if (change == 0.0 || (tail <= h && change <= h)) {
      converged = true;
      break;
    }
  }
  result.residual = covering_distance(hutchinson_step(mw, result.sets), result.sets);
  const double a_priori = std::pow(c, result.iterations) * diameter / (1.0 - c) + 2.0 * h;
  const double a_posteriori = (result.residual + result.sets.front().grid().cell_diameter()) / (1.0 - c);
  result.error_bound = std::min(a_priori, a_posteriori);
  if (!converged) throw MaxIterationsExceeded(std::move(result));
  return result;
}

/// Random backward walks: each sample applies burn_in randomly chosen,
/// chained edge maps to the ambient center of the walk's last vertex, so it
/// lies within c^burn_in * D of K_v.
inline std::vector<TaggedPointCloud> chaos_game(const MWGraph& mw, std::size_t points_per_vertex,
                                                std::size_t burn_in, std::uint64_t seed) {
  if (points_per_vertex == 0 || burn_in == 0) {
    throw Error(ErrorCode::InvalidArgument, "chaos game needs positive point count and burn-in");
  }
  const auto& g = mw.graph();
  std::mt19937_64 rng(seed);
  std::vector<TaggedPointCloud> clouds;
  Path walk(burn_in);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    TaggedPointCloud cloud;
    cloud.vertex = static_cast<VertexId>(v);
    cloud.points.reserve(points_per_vertex);
    for (std::size_t i = 0; i < points_per_vertex; ++i) {
      VertexId at = cloud.vertex;
      for (std::size_t step = 0; step < burn_in; ++step) {
        const auto& choices = g.edges_from(at);
        const EdgeId e = choices[static_cast<std::size_t>(rng() % choices.size())];
        walk[step] = e;
        at = g.range(e);
      }
      Point x = mw.ambient(at).center();
      for (std::size_t step = burn_in; step-- > 0;) x = mw.map(walk[step])(x);
      cloud.points.push_back(x);
    }
    clouds.push_back(std::move(cloud));
  }
  return clouds;
}

}  // namespace mwkit
