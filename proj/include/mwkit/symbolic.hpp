#pragma once

// Symbolic coding of the invariant set: cylinders K_a = phi_a(K_{r(a)}), the
// coding map pi from (truncated) infinite paths onto K, and its inverse
// images (addresses).
//
// pi is only ever evaluated through cylinders: the returned point is the
// center of the image of K_{r(a)}'s bounding box under the composite map, so
// its error is bounded by the cylinder diameter.

#include <cmath>
#include <limits>
#include <vector>

#include "mwkit/attractor.hpp"
#include "mwkit/error.hpp"
#include "mwkit/graph.hpp"
#include "mwkit/mw_graph.hpp"

namespace mwkit {

struct CylinderBox {
  Path path;
  TaggedBoxSet covering;
  double diameter_bound = 0.0;
};

inline double max_covering_diameter(const InvariantList& k) {
  double d = 0.0;
  for (const auto& s : k.sets) d = std::max(d, s.bounding_box().diameter());
  return d;
}

inline CylinderBox cylinder(const MWGraph& mw, const InvariantList& k, const Path& path) {
  if (!mw.graph().is_path(path)) throw Error(ErrorCode::InvalidPath, format_path(path));
  const auto& base = k.at(mw.graph().path_range(path));
  CylinderBox out;
  out.path = path;
  out.covering = apply_path(mw, path, base);
  out.diameter_bound = mw.ratio_product(path) * base.bounding_box().diameter();
  return out;
}

class PrefixTooShort : public Error {
 public:
  explicit PrefixTooShort(std::size_t required)
      : Error(ErrorCode::PrefixTooShort, "prefix needs depth " + std::to_string(required)),
        required_(required) {}
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

/// Depth at which the product of edge ratios along the prefix brings the
/// cylinder diameter under eps, or throws PrefixTooShort with an estimate.
inline std::size_t coding_depth(const MWGraph& mw, const InvariantList& k, const Path& prefix, double eps) {
  const double diameter = max_covering_diameter(k);
  double ratio = 1.0;
  if (diameter <= eps) return 0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    ratio *= mw.edge(prefix[i]).c_hi;
    if (ratio * diameter <= eps) return i + 1;
  }
  const double c = global_ratio(mw).upper;
  const double more = std::ceil(std::log(eps / (ratio * diameter)) / std::log(c));
  throw PrefixTooShort(prefix.size() + static_cast<std::size_t>(std::max(1.0, more)));
}

/// Approximates pi(a) for the infinite path with the given prefix. The whole
/// prefix is used; it must be long enough that the cylinder is eps-small.
inline Point coding_map(const MWGraph& mw, const InvariantList& k, const Path& prefix, double eps) {
  if (!mw.graph().is_path(prefix)) throw Error(ErrorCode::InvalidPath, format_path(prefix));
  coding_depth(mw, k, prefix, eps);
  const Box base = k.at(mw.graph().path_range(prefix)).bounding_box();
  return mw.composite(prefix)(base.center());
}

/// |pi(e a) - phi_e(pi(a))|.
inline double intertwine_residual(const MWGraph& mw, const InvariantList& k, EdgeId e, const Path& prefix,
                                  double eps) {
  if (prefix.empty() || mw.graph().range(e) != mw.graph().path_source(prefix)) {
    throw Error(ErrorCode::ChainMismatch, "prefix does not start at r(" + std::to_string(e) + ")");
  }
  Path extended;
  extended.reserve(prefix.size() + 1);
  extended.push_back(e);
  extended.insert(extended.end(), prefix.begin(), prefix.end());
  const Point lhs = coding_map(mw, k, extended, eps);
  const Point rhs = mw.map(e)(coding_map(mw, k, prefix, eps));
  return distance(lhs, rhs);
}

/// All a in E^depth(v) whose cylinder, dilated by `slack`, may contain x.
///
/// The test pulls x back through the composite map and compares against the
/// covering of K_{r(a)}, scaled by the composite's smallest singular value.
/// It never drops a matching prefix; for similarity maps it is exact up to the
/// covering's own resolution.
inline std::vector<Path> address_of(const MWGraph& mw, const InvariantList& k, VertexId v, const Point& x,
                                    std::size_t depth, double slack) {
  const auto& g = mw.graph();
  if (k.at(v).distance_to(x, slack) > slack) {
    throw Error(ErrorCode::PointNotOnAttractor, "point is farther than the slack from K_" + std::to_string(v));
  }
  std::vector<Path> found;
  struct Frame {
    Path path;
    AffineMap forward;
  };
  std::vector<Frame> stack;
  const auto& roots = g.edges_from(v);
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.push_back({Path{*it}, mw.map(*it)});
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    const double sigma = frame.forward.singular_bounds().first;
    const Point pulled = frame.forward.inverse()(x);
    const VertexId end = g.path_range(frame.path);
    const double allowance = slack / sigma;
    if (k.at(end).distance_to(pulled, allowance) > allowance) continue;
    if (frame.path.size() == depth) {
      found.push_back(std::move(frame.path));
      continue;
    }
    const auto& next = g.edges_from(end);
    for (auto it = next.rbegin(); it != next.rend(); ++it) {
      Path p = frame.path;
      p.push_back(*it);
      stack.push_back({std::move(p), frame.forward.then_after(mw.map(*it))});
    }
  }
  if (found.empty()) {
    throw Error(ErrorCode::PointNotOnAttractor, "no depth-" + std::to_string(depth) + " cylinder holds the point");
  }
  return found;
}

struct Descent {
  Path path;
  VertexId end = 0;
};

/// Greedy address descent: repeatedly pull x back through the edge whose
/// cylinder is nearest to x, while that forward distance (pulled-back
/// distance times the path's upper ratio) stays within `tolerance`. Stops at
/// `max_depth` or once cylinders are below rounding. The result is a
/// deterministic function of x.
inline Descent descend(const MWGraph& mw, const InvariantList& k, VertexId v, const Point& x, double tolerance,
                       std::size_t max_depth) {
  const auto& g = mw.graph();
  const double floor = 1e-15 * std::max(1.0, mw.ambient_diameter());
  const double width = max_covering_diameter(k);
  Descent out;
  out.end = v;
  Point y = x;
  double scale = 1.0;
  while (out.path.size() < max_depth && scale * width > floor) {
    double best = std::numeric_limits<double>::infinity();
    EdgeId best_edge = -1;
    Point best_point;
    for (EdgeId e : g.edges_from(out.end)) {
      const double s = scale * mw.edge(e).c_hi;
      const Point z = mw.map(e).inverse()(y);
      const double d = s * k.at(g.range(e)).distance_to(z, tolerance / s);
      if (d < best) {
        best = d;
        best_edge = e;
        best_point = z;
      }
    }
    if (best_edge < 0 || best > tolerance) break;
    out.path.push_back(best_edge);
    scale *= mw.edge(best_edge).c_hi;
    out.end = g.range(best_edge);
    y = best_point;
  }
  return out;
}

/// Parses "0,1,(1)" style path notation: a comma separated prefix optionally
/// followed by a parenthesised block that repeats until `depth` is reached.
inline Path expand_path_notation(const std::string& text, std::size_t depth) {
  Path prefix;
  Path period;
  std::string token;
  bool in_period = false;
  auto flush = [&] {
    if (token.empty()) return;
    try {
      std::size_t used = 0;
      const int id = std::stoi(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      (in_period ? period : prefix).push_back(id);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad edge id '" + token + "' in path");
    }
    token.clear();
  };
  for (char ch : text) {
    if (ch == ',' || ch == ' ') {
      flush();
    } else if (ch == '(') {
      flush();
      in_period = true;
    } else if (ch == ')') {
      flush();
    } else {
      token.push_back(ch);
    }
  }
  flush();
  if (in_period && period.empty()) throw Error(ErrorCode::ParseError, "empty repeating block in path");
  Path out = prefix;
  while (!period.empty() && out.size() < depth) {
    for (EdgeId e : period) {
      if (out.size() == depth) break;
      out.push_back(e);
    }
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, "empty path");
  return out;
}

}  // namespace mwkit
