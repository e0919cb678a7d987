#pragma once

// Mauldin-Williams graphs with affine edge maps.
//
// Each edge e carries x -> A x + b from the ambient box at r(e) into the
// ambient box at s(e). The two-sided Lipschitz bounds of the map are the
// extreme singular values of A; they are always derived, never declared.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "mwkit/error.hpp"
#include "mwkit/geometry.hpp"
#include "mwkit/graph.hpp"

namespace mwkit {

class AffineMap {
 public:
  AffineMap() = default;

  AffineMap(const std::vector<std::vector<double>>& rows, const std::vector<double>& offset) {
    dim_ = static_cast<int>(rows.size());
    if (dim_ < 1 || dim_ > kMaxDim || offset.size() != rows.size()) {
      throw Error(ErrorCode::DimensionMismatch, "affine map needs a square 1..3 matrix and matching offset");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) {
        throw Error(ErrorCode::DimensionMismatch, "matrix row " + std::to_string(i) + " has wrong length");
      }
      for (std::size_t j = 0; j < rows.size(); ++j) a_[i][j] = rows[i][j];
      b_[static_cast<int>(i)] = offset[i];
    }
    b_.dim = dim_;
  }

  static AffineMap identity(int dim) {
    AffineMap m;
    m.dim_ = dim;
    m.b_ = Point(dim);
    for (int i = 0; i < dim; ++i) m.a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    return m;
  }

  /// x -> s x + t in one dimension.
  static AffineMap line(double s, double t) { return AffineMap({{s}}, {t}); }

  int dim() const noexcept { return dim_; }
  double a(int i, int j) const { return a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
  const Point& offset() const noexcept { return b_; }

  Point operator()(const Point& x) const {
    Point y(dim_);
    for (int i = 0; i < dim_; ++i) {
      double s = b_[i];
      for (int j = 0; j < dim_; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  /// Exact bounding box of the image of a box.
  Box image_box(const Box& box) const {
    Box out;
    out.dim = dim_;
    const Point c = box.center();
    const Point mid = (*this)(c);
    for (int i = 0; i < dim_; ++i) {
      double radius = 0.0;
      for (int j = 0; j < dim_; ++j) radius += std::abs(a(i, j)) * 0.5 * box.extent(j);
      out.lo[static_cast<std::size_t>(i)] = mid[i] - radius;
      out.hi[static_cast<std::size_t>(i)] = mid[i] + radius;
    }
    return out;
  }

  /// (*this) o inner.
  AffineMap then_after(const AffineMap& inner) const {
    AffineMap m;
    m.dim_ = dim_;
    m.b_ = (*this)(inner.b_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        double s = 0.0;
        for (int k = 0; k < dim_; ++k) s += a(i, k) * inner.a(k, j);
        m.a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
      }
    }
    return m;
  }

  AffineMap inverse() const {
    const Eigen::MatrixXd inv = matrix().inverse();
    AffineMap m;
    m.dim_ = dim_;
    m.b_ = Point(dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) m.a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = inv(i, j);
    }
    for (int i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (int j = 0; j < dim_; ++j) s -= inv(i, j) * b_[j];
      m.b_[i] = s;
    }
    return m;
  }

  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) m(i, j) = a(i, j);
    }
    return m;
  }

  /// (smallest, largest) singular value of the linear part.
  std::pair<double, double> singular_bounds() const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix());
    const auto& s = svd.singularValues();
    return {s.minCoeff(), s.maxCoeff()};
  }

  /// Unique solution of x = A x + b, or nullopt when I - A is singular.
  std::optional<Point> fixed_point() const {
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(dim_, dim_) - matrix();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
    if (!lu.isInvertible()) return std::nullopt;
    Eigen::VectorXd rhs(dim_);
    for (int i = 0; i < dim_; ++i) rhs(i) = b_[i];
    const Eigen::VectorXd x = lu.solve(rhs);
    Point p(dim_);
    for (int i = 0; i < dim_; ++i) p[i] = x(i);
    return p;
  }

 private:
  int dim_ = 0;
  std::array<std::array<double, kMaxDim>, kMaxDim> a_{};
  Point b_;
};

/// Edge map together with its derived Lipschitz bounds.
struct AffineContraction {
  AffineMap map;
  double c_lo = 0.0;
  double c_hi = 0.0;

  explicit AffineContraction(AffineMap m) : map(std::move(m)) {
    std::tie(c_lo, c_hi) = map.singular_bounds();
  }
};

struct RawEdgeMap {
  EdgeId edge;
  std::vector<std::vector<double>> rows;
  std::vector<double> offset;
};

struct RawSystem {
  RawGraph graph;
  std::map<VertexId, Box> ambient;
  std::vector<RawEdgeMap> maps;
};

class MWGraph {
 public:
  const DirectedGraph& graph() const noexcept { return graph_; }
  int dim() const noexcept { return dim_; }
  const Box& ambient(VertexId v) const { return ambient_.at(static_cast<std::size_t>(v)); }
  const AffineContraction& edge(EdgeId e) const { return maps_.at(static_cast<std::size_t>(e)); }
  const AffineMap& map(EdgeId e) const { return edge(e).map; }

  /// max over vertices of the ambient diameter.
  double ambient_diameter() const {
    double d = 0.0;
    for (const auto& b : ambient_) d = std::max(d, b.diameter());
    return d;
  }

  /// phi_{a_1} o ... o phi_{a_k}.
  AffineMap composite(const Path& path) const {
    AffineMap m = AffineMap::identity(dim_);
    for (EdgeId e : path) m = m.then_after(map(e));
    return m;
  }

  /// Product of per-edge upper bounds along the path.
  double ratio_product(const Path& path) const {
    double r = 1.0;
    for (EdgeId e : path) r *= edge(e).c_hi;
    return r;
  }

  friend MWGraph validate_mw(const RawSystem& raw);

 private:
  DirectedGraph graph_;
  int dim_ = 0;
  std::vector<Box> ambient_;
  std::vector<AffineContraction> maps_;
};

/// Certifies the contraction bounds and ambient containment of every edge.
/// Throws with the complete issue list.
inline MWGraph validate_mw(const RawSystem& raw) {
  MWGraph mw;
  mw.graph_ = validate_graph(raw.graph);
  std::vector<Issue> issues;

  const auto n_vertices = mw.graph_.vertex_count();
  mw.ambient_.resize(n_vertices);
  mw.dim_ = 0;
  for (std::size_t v = 0; v < n_vertices; ++v) {
    auto it = raw.ambient.find(static_cast<VertexId>(v));
    if (it == raw.ambient.end()) {
      issues.push_back({ErrorCode::InvalidArgument, "vertex " + std::to_string(v), "no ambient box"});
      continue;
    }
    mw.ambient_[v] = it->second;
    if (mw.dim_ == 0) mw.dim_ = it->second.dim;
    if (it->second.dim != mw.dim_) {
      issues.push_back({ErrorCode::DimensionMismatch, "vertex " + std::to_string(v), "ambient dimension differs"});
    }
  }
  if (!issues.empty()) throw Error(std::move(issues));

  const auto n_edges = mw.graph_.edge_count();
  std::vector<const RawEdgeMap*> by_edge(n_edges, nullptr);
  for (const auto& m : raw.maps) {
    if (m.edge >= 0 && static_cast<std::size_t>(m.edge) < n_edges) by_edge[static_cast<std::size_t>(m.edge)] = &m;
  }
  for (std::size_t e = 0; e < n_edges; ++e) {
    const auto subject = std::to_string(e);
    if (by_edge[e] == nullptr) {
      issues.push_back({ErrorCode::InvalidArgument, subject, "edge has no map"});
      mw.maps_.emplace_back(AffineMap::identity(std::max(mw.dim_, 1)));
      continue;
    }
    AffineMap map;
    try {
      map = AffineMap(by_edge[e]->rows, by_edge[e]->offset);
    } catch (const Error& err) {
      issues.push_back({ErrorCode::DimensionMismatch, subject, err.what()});
      mw.maps_.emplace_back(AffineMap::identity(std::max(mw.dim_, 1)));
      continue;
    }
    if (map.dim() != mw.dim_) {
      issues.push_back({ErrorCode::DimensionMismatch, subject, "map dimension differs from ambient"});
      mw.maps_.emplace_back(AffineMap::identity(std::max(mw.dim_, 1)));
      continue;
    }
    AffineContraction contraction(map);
    constexpr double kSingular = 1e-14;
    if (contraction.c_hi >= 1.0) {
      issues.push_back({ErrorCode::NotContraction, subject,
                        "largest singular value " + std::to_string(contraction.c_hi) + " >= 1"});
    }
    if (contraction.c_lo <= kSingular) {
      issues.push_back({ErrorCode::NotInjective, subject, "linear part is singular"});
    }
    const auto edge = static_cast<EdgeId>(e);
    const Box image = map.image_box(mw.ambient_[static_cast<std::size_t>(mw.graph_.range(edge))]);
    const Box& target = mw.ambient_[static_cast<std::size_t>(mw.graph_.source(edge))];
    if (!target.contains(image, 1e-12 * std::max(1.0, target.diameter()))) {
      issues.push_back({ErrorCode::RangeEscapesAmbient, subject, "image of the range box leaves the source box"});
    }
    mw.maps_.push_back(std::move(contraction));
  }
  if (!issues.empty()) throw Error(std::move(issues));
  return mw;
}

struct RatioBounds {
  double lower;  // min over edges of the smallest singular value
  double upper;  // max over edges of the largest singular value
};

inline RatioBounds global_ratio(const MWGraph& mw) {
  RatioBounds r{1.0, 0.0};
  for (std::size_t e = 0; e < mw.graph().edge_count(); ++e) {
    const auto& c = mw.edge(static_cast<EdgeId>(e));
    r.lower = std::min(r.lower, c.c_lo);
    r.upper = std::max(r.upper, c.c_hi);
  }
  return r;
}

/// A point of the ambient space at a given vertex.
struct VertexPoint {
  VertexId vertex;
  Point point;
};

inline VertexPoint apply_edge(const MWGraph& mw, EdgeId e, const VertexPoint& x) {
  if (x.vertex != mw.graph().range(e)) {
    throw Error(ErrorCode::TagMismatch, "point is not at the range vertex of edge " + std::to_string(e));
  }
  return {mw.graph().source(e), mw.map(e)(x.point)};
}

/// Outer covering of phi_e(S) on the grid of s(e) at the resolution of S.
inline TaggedBoxSet apply_edge(const MWGraph& mw, EdgeId e, const TaggedBoxSet& s) {
  if (s.vertex() != mw.graph().range(e)) {
    throw Error(ErrorCode::TagMismatch, "box set is not at the range vertex of edge " + std::to_string(e));
  }
  const VertexId target = mw.graph().source(e);
  const Grid grid = Grid::covering(mw.ambient(target), s.resolution());
  std::vector<Box> images;
  images.reserve(s.size());
  for (CellKey k : s.cells()) images.push_back(mw.map(e).image_box(s.grid().cell_box(s.grid().index(k))));
  return TaggedBoxSet::covering_of(target, grid, images);
}

/// Outer covering of phi_path(S) on the grid of s(path).
inline TaggedBoxSet apply_path(const MWGraph& mw, const Path& path, const TaggedBoxSet& s) {
  if (!mw.graph().is_path(path)) throw Error(ErrorCode::InvalidPath, format_path(path));
  if (s.vertex() != mw.graph().path_range(path)) {
    throw Error(ErrorCode::TagMismatch, "box set is not at the range vertex of the path");
  }
  const AffineMap m = mw.composite(path);
  const VertexId target = mw.graph().path_source(path);
  const Grid grid = Grid::covering(mw.ambient(target), s.resolution());
  std::vector<Box> images;
  images.reserve(s.size());
  for (CellKey k : s.cells()) images.push_back(m.image_box(s.grid().cell_box(s.grid().index(k))));
  return TaggedBoxSet::covering_of(target, grid, images);
}

/// Fixed point of the composite map along a cycle.
inline Point fixed_point(const MWGraph& mw, const Path& cycle) {
  if (!mw.graph().is_path(cycle)) throw Error(ErrorCode::InvalidPath, format_path(cycle));
  if (mw.graph().path_source(cycle) != mw.graph().path_range(cycle)) {
    throw Error(ErrorCode::NotACycle, format_path(cycle));
  }
  auto p = mw.composite(cycle).fixed_point();
  if (!p) throw Error(ErrorCode::NotACycle, "composite map has no unique fixed point");
  return *p;
}

/// A point known to lie on K_v: the image of a cycle's fixed point under the
/// walk leading from v to that cycle.
inline Point anchor_point(const MWGraph& mw, VertexId v) {
  auto [prefix, cycle] = walk_to_cycle(mw.graph(), v);
  const Point fix = fixed_point(mw, cycle);
  return prefix.empty() ? fix : mw.composite(prefix)(fix);
}

}  // namespace mwkit
