#pragma once

// Structural tests on the invariant set: sibling-image disjointness, points
// avoided by every short cycle, and the bump-function aperiodicity witness.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mwkit/attractor.hpp"
#include "mwkit/error.hpp"
#include "mwkit/geometry.hpp"
#include "mwkit/graph.hpp"
#include "mwkit/mw_graph.hpp"
#include "mwkit/symbolic.hpp"

namespace mwkit {

enum class Verdict { Disjoint, Overlapping, Unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Disjoint: return "Disjoint";
    case Verdict::Overlapping: return "Overlapping";
    case Verdict::Unknown: return "Unknown";
  }
  return "?";
}

struct PairGap {
  VertexId vertex = 0;
  EdgeId e = 0;
  EdgeId f = 0;
  Verdict verdict = Verdict::Unknown;
  double gap = 0.0;             // covering separation at the deciding resolution
  double exact_distance = 0.0;  // closest pair among exact attractor points
  double resolution = 0.0;
  std::optional<Point> witness;
};

struct DisconnectednessReport {
  Verdict verdict = Verdict::Unknown;
  std::vector<PairGap> pairs;
  std::optional<Point> witness;  // from the first overlapping pair
  double resolution = 0.0;       // finest resolution used
};

namespace detail {

/// Exact points phi_e(phi_a(q)) of phi_e(K_{r(e)}), a over paths of a fixed
/// depth and q over the anchor of the end vertex plus the fixed points of its
/// cycles of length <= 2. The depth is chosen so cylinders are at most
/// `spacing` wide, or the point budget runs out first.
inline std::vector<Point> exact_image_points(const MWGraph& mw, const InvariantList& k, EdgeId e,
                                             double spacing, std::size_t budget = 1u << 18) {
  const auto& g = mw.graph();
  const VertexId start = g.range(e);
  std::vector<std::vector<Point>> anchors(g.vertex_count());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) anchors[v].push_back(anchor_point(mw, static_cast<VertexId>(v)));
  for (const auto& cycle : cycles_up_to(g, 2)) {
    anchors[static_cast<std::size_t>(g.path_source(cycle))].push_back(fixed_point(mw, cycle));
  }
  std::size_t per_path = 1;
  for (const auto& a : anchors) per_path = std::max(per_path, a.size());

  const double c = global_ratio(mw).upper;
  const double diameter = std::max(max_covering_diameter(k), 1e-300);
  std::size_t depth = 1;
  while (std::pow(c, static_cast<double>(depth)) * diameter > spacing) ++depth;
  for (; depth > 1; --depth) {
    std::size_t count = 0;
    for_each_path_from(g, start, depth, [&](const Path&) { ++count; });
    if (count * per_path <= budget) break;
  }
  std::vector<Point> out;
  const AffineMap& head = mw.map(e);
  for_each_path_from(g, start, depth, [&](const Path& p) {
    const AffineMap m = head.then_after(mw.composite(p));
    for (const auto& q : anchors[static_cast<std::size_t>(g.path_range(p))]) out.push_back(m(q));
  });
  return out;
}

/// Closest pair between a and b among pairs at most `cutoff` apart; the
/// distance is infinite when there is none.
inline std::pair<double, Point> closest_pair(const std::vector<Point>& a, const std::vector<Point>& b,
                                             double bucket, double cutoff) {
  PointIndex index(b, bucket);
  double best = std::numeric_limits<double>::infinity();
  Point witness;
  for (const auto& p : a) {
    const auto [j, d] = index.nearest(p, std::min(cutoff, best));
    if (d < best) {
      best = d;
      witness = midpoint(p, b[j]);
    }
  }
  if (best > cutoff) best = std::numeric_limits<double>::infinity();
  return {best, witness};
}

}  // namespace detail

/// Decides each sibling pair (e, f), s(e) == s(f), e < f:
///   Disjoint     the outer coverings of the two images are separated;
///   Overlapping  exact attractor points of both images coincide, or still lie
///                within one cell of each other at the finest refinement;
///   Unknown      coverings touch at every refinement without confirmation.
inline DisconnectednessReport classify_disconnected(const MWGraph& mw, const InvariantList& k,
                                                    int max_refinements = 2) {
  const auto& g = mw.graph();
  DisconnectednessReport report;
  report.resolution = k.resolution;

  std::vector<InvariantList> levels{k};
  auto level = [&](int r) -> const InvariantList& {
    while (static_cast<int>(levels.size()) <= r) {
      levels.push_back(solve_invariant_list(mw, levels.back().resolution / 2.0));
    }
    return levels[static_cast<std::size_t>(r)];
  };

  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto& siblings = g.edges_from(static_cast<VertexId>(v));
    for (std::size_t i = 0; i < siblings.size(); ++i) {
      for (std::size_t j = i + 1; j < siblings.size(); ++j) {
        PairGap pair;
        pair.vertex = static_cast<VertexId>(v);
        pair.e = siblings[i];
        pair.f = siblings[j];
        for (int r = 0; r <= max_refinements; ++r) {
          const auto& kr = level(r);
          const double h = kr.resolution;
          report.resolution = std::min(report.resolution, h);
          pair.resolution = h;
          const auto a = apply_edge(mw, pair.e, kr.at(g.range(pair.e)));
          const auto b = apply_edge(mw, pair.f, kr.at(g.range(pair.f)));
          pair.gap = min_separation(a, b);
          if (pair.gap > 0.0) {
            pair.verdict = Verdict::Disjoint;
            pair.exact_distance = pair.gap;
            break;
          }
          const auto pa = detail::exact_image_points(mw, kr, pair.e, h / 2.0);
          const auto pb = detail::exact_image_points(mw, kr, pair.f, h / 2.0);
          const auto [dist, mid] = detail::closest_pair(pa, pb, h, 2.0 * h);
          pair.exact_distance = dist;
          const bool exact_hit = dist <= 1e-12 * std::max(1.0, mw.ambient_diameter());
          if (exact_hit || (r == max_refinements && dist <= h)) {
            pair.verdict = Verdict::Overlapping;
            pair.witness = mid;
            break;
          }
        }
        report.pairs.push_back(std::move(pair));
      }
    }
  }

  bool any_unknown = false;
  report.verdict = Verdict::Disjoint;
  for (const auto& p : report.pairs) {
    if (p.verdict == Verdict::Overlapping && report.verdict != Verdict::Overlapping) {
      report.verdict = Verdict::Overlapping;
      report.witness = p.witness;
    }
    if (p.verdict == Verdict::Unknown) any_unknown = true;
  }
  if (report.verdict != Verdict::Overlapping && any_unknown) report.verdict = Verdict::Unknown;
  return report;
}

/// Fixed points of every cycle of length <= n0, grouped by vertex.
inline std::vector<std::vector<Point>> cycle_fixed_points(const MWGraph& mw, std::size_t n0) {
  std::vector<std::vector<Point>> out(mw.graph().vertex_count());
  for (const auto& cycle : cycles_up_to(mw.graph(), n0)) {
    out[static_cast<std::size_t>(mw.graph().path_source(cycle))].push_back(fixed_point(mw, cycle));
  }
  return out;
}

struct UnfixedPoint {
  VertexId vertex = 0;
  Point point;
  double clearance = 0.0;
};

namespace detail {

inline double clearance_from(const Point& p, const std::vector<Point>& fixed, double cap) {
  double d = cap;
  for (const auto& q : fixed) d = std::min(d, distance(p, q));
  return d;
}

}  // namespace detail

/// Covering cell center farthest from all fixed points of cycles of length
/// <= n0 at its vertex. Ties go to the lowest vertex, then the lowest cell.
inline UnfixedPoint find_unfixed_point(const MWGraph& mw, const InvariantList& k, std::size_t n0, double margin) {
  const auto fixed = cycle_fixed_points(mw, n0);
  UnfixedPoint best;
  best.clearance = -1.0;
  for (std::size_t v = 0; v < k.sets.size(); ++v) {
    const double cap = mw.ambient(static_cast<VertexId>(v)).diameter();
    for (const auto& p : k.sets[v].centers()) {
      const double d = detail::clearance_from(p, fixed[v], cap);
      if (d > best.clearance) best = {static_cast<VertexId>(v), p, d};
    }
  }
  if (best.clearance < margin) {
    throw Error(ErrorCode::ResolutionTooCoarse,
                "best clearance " + std::to_string(best.clearance) + " is below margin " + std::to_string(margin));
  }
  return best;
}

/// Radial hat: 1 at the center, falling linearly to 0 at distance radius.
struct Bump {
  VertexId vertex = 0;
  Point center;
  double radius = 0.0;

  double operator()(VertexId v, const Point& t) const {
    if (v != vertex) return 0.0;
    return std::max(0.0, 1.0 - distance(t, center) / radius);
  }
};

struct WitnessReport {
  Bump bump;
  double a0_at_center = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double clearance = 0.0;
  double sup_xax = 0.0;              // max over samples of x a0 x
  double max_twisted_product = 0.0;  // max over alpha, t of |x(phi_a t) x(t)|
  std::size_t twisted_checks = 0;
  std::size_t n0 = 0;
  double eps = 0.0;
  bool passed = false;
};

/// Function on the invariant set, evaluated on sample points.
using SampleFunction = std::function<double(VertexId, const Point&)>;

/// Builds the bump x with ||x a0 x|| > 1 - eps whose support is disjoint
/// from its image under every path map of length <= n0, then checks both
/// properties exhaustively on the covering cell centers.
inline WitnessReport aperiodicity_witness(const MWGraph& mw, const InvariantList& k, const SampleFunction& a0,
                                          std::size_t n0, double eps, std::optional<double> margin = {}) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (n0 == 0) throw Error(ErrorCode::InvalidArgument, "n0 must be at least 1");
  const auto& g = mw.graph();
  const std::size_t n_vertices = g.vertex_count();

  std::vector<std::vector<Point>> samples(n_vertices);
  std::vector<std::vector<double>> values(n_vertices);
  double top = 0.0;
  for (std::size_t v = 0; v < n_vertices; ++v) {
    samples[v] = k.sets[v].centers();
    for (const auto& p : samples[v]) {
      const double a = a0(static_cast<VertexId>(v), p);
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw Error(ErrorCode::InvalidArgument, "a0 must be finite and nonnegative on the samples");
      }
      values[v].push_back(a);
      top = std::max(top, a);
    }
  }
  if (!(top > 0.0)) throw Error(ErrorCode::InvalidArgument, "a0 vanishes on every sample");
  for (auto& row : values) {
    for (auto& a : row) a /= top;
  }

  const auto fixed = cycle_fixed_points(mw, n0);
  const double need = margin.value_or(k.sets.front().grid().cell_diameter());
  const double zero_slack = 1e-12;

  WitnessReport report;
  report.n0 = n0;
  report.eps = eps;
  report.clearance = -1.0;
  std::size_t center_index = 0;
  for (std::size_t v = 0; v < n_vertices; ++v) {
    for (std::size_t i = 0; i < samples[v].size(); ++i) {
      if (values[v][i] < 1.0 - eps) continue;
      const double d = detail::clearance_from(samples[v][i], fixed[v], mw.ambient(static_cast<VertexId>(v)).diameter());
      if (d > report.clearance) {
        report.clearance = d;
        report.bump.vertex = static_cast<VertexId>(v);
        report.bump.center = samples[v][i];
        center_index = i;
      }
    }
  }
  if (report.clearance < need) {
    throw Error(ErrorCode::NoQualifyingCenter, "every sample with a0 >= 1 - eps lies within " +
                                                   std::to_string(need) + " of a cycle fixed point");
  }
  const VertexId v0 = report.bump.vertex;
  const Point t0 = report.bump.center;
  report.a0_at_center = values[static_cast<std::size_t>(v0)][center_index];

  report.delta1 = std::numeric_limits<double>::infinity();
  for (const auto& cycle : cycles_up_to(g, n0)) {
    if (g.path_source(cycle) != v0) continue;
    report.delta1 = std::min(report.delta1, 0.5 * distance(mw.composite(cycle)(t0), t0));
  }
  if (!std::isfinite(report.delta1)) report.delta1 = mw.ambient(v0).diameter();

  report.delta2 = std::numeric_limits<double>::infinity();
  const auto& here = samples[static_cast<std::size_t>(v0)];
  for (std::size_t i = 0; i < here.size(); ++i) {
    if (values[static_cast<std::size_t>(v0)][i] <= zero_slack) {
      report.delta2 = std::min(report.delta2, distance(here[i], t0));
    }
  }
  if (!std::isfinite(report.delta2)) report.delta2 = report.delta1;
  report.bump.radius = std::min(report.delta1, report.delta2);

  const Bump& x = report.bump;
  for (std::size_t v = 0; v < n_vertices; ++v) {
    for (std::size_t i = 0; i < samples[v].size(); ++i) {
      const double xv = x(static_cast<VertexId>(v), samples[v][i]);
      report.sup_xax = std::max(report.sup_xax, xv * values[v][i] * xv);
    }
  }
  for (std::size_t len = 1; len <= n0; ++len) {
    for (const auto& alpha : paths_of_length(g, len)) {
      const VertexId from = g.path_range(alpha);
      const VertexId to = g.path_source(alpha);
      const AffineMap m = mw.composite(alpha);
      for (const auto& t : samples[static_cast<std::size_t>(from)]) {
        ++report.twisted_checks;
        const double xt = x(from, t);
        if (xt == 0.0) continue;
        report.max_twisted_product = std::max(report.max_twisted_product, std::abs(x(to, m(t)) * xt));
      }
    }
  }
  report.passed = report.sup_xax >= 1.0 - eps && report.max_twisted_product == 0.0;
  return report;
}

}  // namespace mwkit
