#pragma once

// Compact subsets of R^d (d <= 3) represented as unions of grid cells.
//
// A Grid is anchored at the lower corner of a vertex's ambient box, so the
// same (ambient, resolution) pair always yields the same cell indexing.
// Cells are closed boxes; a TaggedBoxSet is an outer approximation of a
// compact set, i.e. the set lies inside the union of its cells.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mwkit/error.hpp"
#include "mwkit/graph.hpp"

namespace mwkit {

inline constexpr int kMaxDim = 3;

struct Point {
  int dim = 0;
  std::array<double, kMaxDim> c{};

  Point() = default;
  explicit Point(int d) : dim(d) {}
  Point(std::initializer_list<double> values) : dim(static_cast<int>(values.size())) {
    int i = 0;
    for (double v : values) {
      c[static_cast<std::size_t>(i++)] = v;
    }
  }

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend Point operator+(Point a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) a[i] += b[i];
    return a;
  }
  friend Point operator-(Point a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) a[i] -= b[i];
    return a;
  }
  friend Point operator*(double s, Point a) {
    for (int i = 0; i < a.dim; ++i) a[i] *= s;
    return a;
  }
  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim != b.dim) return false;
    for (int i = 0; i < a.dim; ++i) {
      if (a[i] != b[i]) return false;
    }
    return true;
  }
};

inline double squared_norm(const Point& p) {
  double s = 0.0;
  for (int i = 0; i < p.dim; ++i) s += p[i] * p[i];
  return s;
}

inline double distance(const Point& a, const Point& b) {
  return std::sqrt(squared_norm(a - b));
}

inline Point midpoint(const Point& a, const Point& b) { return 0.5 * (a + b); }

/// Closed axis-aligned box.
struct Box {
  int dim = 0;
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};

  static Box from_bounds(const std::vector<double>& lows, const std::vector<double>& highs) {
    if (lows.size() != highs.size() || lows.empty() || lows.size() > kMaxDim) {
      throw Error(ErrorCode::DimensionMismatch, "box bounds must have 1..3 axes");
    }
    Box b;
    b.dim = static_cast<int>(lows.size());
    for (std::size_t i = 0; i < lows.size(); ++i) {
      if (!(lows[i] <= highs[i])) {
        throw Error(ErrorCode::InvalidArgument, "box lower bound exceeds upper bound");
      }
      b.lo[i] = lows[i];
      b.hi[i] = highs[i];
    }
    return b;
  }

  double extent(int i) const { return hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]; }

  double diameter() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += extent(i) * extent(i);
    return std::sqrt(s);
  }

  Point center() const {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p[i] = 0.5 * (lo[static_cast<std::size_t>(i)] + hi[static_cast<std::size_t>(i)]);
    return p;
  }

  Point corner_lo() const {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p[i] = lo[static_cast<std::size_t>(i)];
    return p;
  }

  bool contains(const Point& p, double slack = 0.0) const {
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (p[i] < lo[k] - slack || p[i] > hi[k] + slack) return false;
    }
    return true;
  }

  bool contains(const Box& other, double slack = 0.0) const {
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (other.lo[k] < lo[k] - slack || other.hi[k] > hi[k] + slack) return false;
    }
    return true;
  }

  /// Euclidean distance from p to the closed box (0 inside).
  double distance_to(const Point& p) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double d = std::max({lo[k] - p[i], 0.0, p[i] - hi[k]});
      s += d * d;
    }
    return std::sqrt(s);
  }

  Point clamp(const Point& p) const {
    Point q = p;
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      q[i] = std::clamp(p[i], lo[k], hi[k]);
    }
    return q;
  }
};

inline double box_gap(const Box& a, const Box& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double d = std::max({a.lo[k] - b.hi[k], 0.0, b.lo[k] - a.hi[k]});
    s += d * d;
  }
  return std::sqrt(s);
}

using CellIndex = std::array<std::int64_t, kMaxDim>;
using CellKey = std::uint64_t;

/// Regular grid of cubic cells of side h anchored at `origin`.
struct Grid {
  int dim = 0;
  Point origin;
  double h = 0.0;
  std::array<std::int64_t, kMaxDim> extent{1, 1, 1};

  /// Grid covering `ambient` with cells of side h.
  static Grid covering(const Box& ambient, double h) {
    if (!(h > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "resolution must be positive");
    }
    Grid g;
    g.dim = ambient.dim;
    g.origin = ambient.corner_lo();
    g.h = h;
    for (int i = 0; i < ambient.dim; ++i) {
      const double cells = ambient.extent(i) / h;
      auto n = static_cast<std::int64_t>(std::ceil(cells - 1e-9));
      g.extent[static_cast<std::size_t>(i)] = std::max<std::int64_t>(n, 1);
    }
    return g;
  }

  std::uint64_t cell_count() const {
    std::uint64_t n = 1;
    for (int i = 0; i < dim; ++i) n *= static_cast<std::uint64_t>(extent[static_cast<std::size_t>(i)]);
    return n;
  }

  CellKey key(const CellIndex& idx) const {
    CellKey k = 0;
    for (int i = dim - 1; i >= 0; --i) {
      k = k * static_cast<CellKey>(extent[static_cast<std::size_t>(i)]) +
          static_cast<CellKey>(idx[static_cast<std::size_t>(i)]);
    }
    return k;
  }

  CellIndex index(CellKey key) const {
    CellIndex idx{0, 0, 0};
    for (int i = 0; i < dim; ++i) {
      const auto n = static_cast<CellKey>(extent[static_cast<std::size_t>(i)]);
      idx[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(key % n);
      key /= n;
    }
    return idx;
  }

  bool in_range(const CellIndex& idx) const {
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (idx[k] < 0 || idx[k] >= extent[k]) return false;
    }
    return true;
  }

  Box cell_box(const CellIndex& idx) const {
    Box b;
    b.dim = dim;
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      b.lo[k] = origin[i] + static_cast<double>(idx[k]) * h;
      b.hi[k] = origin[i] + static_cast<double>(idx[k] + 1) * h;
    }
    return b;
  }

  Point cell_center(const CellIndex& idx) const {
    Point p(dim);
    for (int i = 0; i < dim; ++i) {
      p[i] = origin[i] + (static_cast<double>(idx[static_cast<std::size_t>(i)]) + 0.5) * h;
    }
    return p;
  }

  Box bounds() const {
    Box b;
    b.dim = dim;
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      b.lo[k] = origin[i];
      b.hi[k] = origin[i] + static_cast<double>(extent[k]) * h;
    }
    return b;
  }

  double cell_diameter() const { return h * std::sqrt(static_cast<double>(dim)); }

  /// Cell containing p, clamped into the grid.
  CellIndex locate(const Point& p) const {
    CellIndex idx{0, 0, 0};
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const auto j = static_cast<std::int64_t>(std::floor((p[i] - origin[i]) / h));
      idx[k] = std::clamp<std::int64_t>(j, 0, extent[k] - 1);
    }
    return idx;
  }

  /// Per-axis inclusive index ranges of the cells whose interiors meet the
  /// interior of `box`, clipped to the grid. Coordinates within 1e-7 cells of
  /// a grid line snap onto it so exact dyadic/triadic images are not widened
  /// by round-off.
  std::optional<std::pair<CellIndex, CellIndex>> cells_meeting(const Box& box) const {
    constexpr double kSnap = 1e-7;
    CellIndex first{0, 0, 0};
    CellIndex last{0, 0, 0};
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      double t = (box.lo[k] - origin[i]) / h;
      double u = (box.hi[k] - origin[i]) / h;
      if (std::abs(t - std::round(t)) < kSnap) t = std::round(t);
      if (std::abs(u - std::round(u)) < kSnap) u = std::round(u);
      auto a = static_cast<std::int64_t>(std::floor(t));
      auto b = static_cast<std::int64_t>(std::ceil(u)) - 1;
      if (b < a) b = a;
      a = std::max<std::int64_t>(a, 0);
      b = std::min<std::int64_t>(b, extent[k] - 1);
      if (b < a) return std::nullopt;
      first[k] = a;
      last[k] = b;
    }
    return std::make_pair(first, last);
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim == b.dim && a.origin == b.origin && a.h == b.h && a.extent == b.extent;
  }
};

template <typename Visit>
void for_each_cell_in(const Grid& grid, const CellIndex& first, const CellIndex& last, Visit&& visit) {
  CellIndex idx = first;
  const int d = grid.dim;
  while (true) {
    visit(idx);
    int axis = 0;
    while (axis < d) {
      const auto k = static_cast<std::size_t>(axis);
      if (idx[k] < last[k]) {
        ++idx[k];
        break;
      }
      idx[k] = first[k];
      ++axis;
    }
    if (axis == d) return;
  }
}

/// Vertex-tagged union of grid cells. Cells are kept as sorted unique keys.
class TaggedBoxSet {
 public:
  TaggedBoxSet() = default;
  TaggedBoxSet(VertexId vertex, Grid grid, std::vector<CellKey> cells)
      : vertex_(vertex), grid_(std::move(grid)), cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    bounds_ = compute_bounds();
  }

  /// Every cell of the grid covering `ambient`.
  static TaggedBoxSet full(VertexId vertex, const Box& ambient, double h) {
    Grid grid = Grid::covering(ambient, h);
    std::vector<CellKey> cells(grid.cell_count());
    std::iota(cells.begin(), cells.end(), CellKey{0});
    return TaggedBoxSet(vertex, grid, std::move(cells));
  }

  /// Cells of `grid` meeting the interior of any of `boxes`.
  static TaggedBoxSet covering_of(VertexId vertex, const Grid& grid, const std::vector<Box>& boxes) {
    std::vector<CellKey> cells;
    for (const auto& b : boxes) {
      if (auto range = grid.cells_meeting(b)) {
        for_each_cell_in(grid, range->first, range->second,
                         [&](const CellIndex& idx) { cells.push_back(grid.key(idx)); });
      }
    }
    return TaggedBoxSet(vertex, grid, std::move(cells));
  }

  VertexId vertex() const noexcept { return vertex_; }
  const Grid& grid() const noexcept { return grid_; }
  const std::vector<CellKey>& cells() const noexcept { return cells_; }
  std::size_t size() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }
  double resolution() const noexcept { return grid_.h; }

  bool contains_cell(CellKey key) const {
    return std::binary_search(cells_.begin(), cells_.end(), key);
  }

  std::vector<Point> centers() const {
    std::vector<Point> out;
    out.reserve(cells_.size());
    for (CellKey k : cells_) out.push_back(grid_.cell_center(grid_.index(k)));
    return out;
  }

  /// Bounding box of the cell union (inverted bounds when empty).
  const Box& bounding_box() const noexcept { return bounds_; }

 private:
  Box compute_bounds() const {
    Box b;
    b.dim = grid_.dim;
    for (int i = 0; i < grid_.dim; ++i) {
      b.lo[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
      b.hi[static_cast<std::size_t>(i)] = -std::numeric_limits<double>::infinity();
    }
    for (CellKey k : cells_) {
      const Box c = grid_.cell_box(grid_.index(k));
      for (int i = 0; i < grid_.dim; ++i) {
        const auto j = static_cast<std::size_t>(i);
        b.lo[j] = std::min(b.lo[j], c.lo[j]);
        b.hi[j] = std::max(b.hi[j], c.hi[j]);
      }
    }
    return b;
  }

 public:
  bool contains_point(const Point& p, double slack = 0.0) const { return distance_to(p, slack) <= slack; }

  /// Euclidean distance from p to the union of closed cells. Results above
  /// `give_up_above` may be replaced by any lower bound that still exceeds it.
  double distance_to(const Point& p,
                     double give_up_above = std::numeric_limits<double>::infinity()) const {
    if (cells_.empty()) return std::numeric_limits<double>::infinity();
    const double to_bounds = bounds_.distance_to(p);
    if (to_bounds > give_up_above) return to_bounds;
    const Box whole = grid_.bounds();
    const Point q = whole.clamp(p);
    const double outside = distance(p, q);
    const CellIndex start = grid_.locate(q);
    double best = std::numeric_limits<double>::infinity();
    std::int64_t max_ring = 0;
    for (int i = 0; i < grid_.dim; ++i) {
      max_ring = std::max(max_ring, grid_.extent[static_cast<std::size_t>(i)]);
    }
    // Ring search pays off near the set; past |cells| probes a linear scan is cheaper.
    std::size_t probes = 0;
    for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
      if (static_cast<double>(ring - 1) * grid_.h + outside >= best) return best;
      for_each_ring_cell(start, ring, [&](const CellIndex& idx) {
        ++probes;
        if (contains_cell(grid_.key(idx))) {
          best = std::min(best, grid_.cell_box(idx).distance_to(p));
        }
      });
      if (probes > cells_.size()) break;
    }
    for (CellKey k : cells_) {
      best = std::min(best, grid_.cell_box(grid_.index(k)).distance_to(p));
    }
    return best;
  }

  friend bool operator==(const TaggedBoxSet& a, const TaggedBoxSet& b) {
    return a.vertex_ == b.vertex_ && a.grid_ == b.grid_ && a.cells_ == b.cells_;
  }

 private:
  template <typename Visit>
  void for_each_ring_cell(const CellIndex& center, std::int64_t ring, Visit&& visit) const {
    CellIndex first{0, 0, 0};
    CellIndex last{0, 0, 0};
    for (int i = 0; i < grid_.dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      first[k] = std::max<std::int64_t>(center[k] - ring, 0);
      last[k] = std::min<std::int64_t>(center[k] + ring, grid_.extent[k] - 1);
    }
    for_each_cell_in(grid_, first, last, [&](const CellIndex& idx) {
      std::int64_t cheb = 0;
      for (int i = 0; i < grid_.dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        cheb = std::max(cheb, std::abs(idx[k] - center[k]));
      }
      if (cheb == ring) visit(idx);
    });
  }

  VertexId vertex_ = 0;
  Grid grid_;
  std::vector<CellKey> cells_;
  Box bounds_;
};

struct TaggedPointCloud {
  VertexId vertex = 0;
  std::vector<Point> points;
};

namespace detail {

// 1-D squared Euclidean distance transform (Felzenszwalb & Huttenlocher).
// f holds 0 for occupied sites and +inf elsewhere on input.
inline void edt_1d(std::vector<double>& f, std::vector<double>& scratch_d,
                   std::vector<std::int64_t>& scratch_v, std::vector<double>& scratch_z) {
  const auto n = static_cast<std::int64_t>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  scratch_d.assign(static_cast<std::size_t>(n), inf);
  scratch_v.assign(static_cast<std::size_t>(n), 0);
  scratch_z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  std::int64_t k = -1;
  for (std::int64_t q = 0; q < n; ++q) {
    const double fq = f[static_cast<std::size_t>(q)];
    if (fq == inf) continue;
    if (k < 0) {
      k = 0;
      scratch_v[0] = q;
      scratch_z[0] = -inf;
      scratch_z[1] = inf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const std::int64_t p = scratch_v[static_cast<std::size_t>(k)];
      const double fp = f[static_cast<std::size_t>(p)];
      s = ((fq + static_cast<double>(q * q)) - (fp + static_cast<double>(p * p))) /
          (2.0 * static_cast<double>(q - p));
      if (s <= scratch_z[static_cast<std::size_t>(k)]) {
        --k;
        if (k < 0) break;
      } else {
        break;
      }
    }
    ++k;
    scratch_v[static_cast<std::size_t>(k)] = q;
    scratch_z[static_cast<std::size_t>(k)] = (k == 0) ? -inf : s;
    scratch_z[static_cast<std::size_t>(k) + 1] = inf;
  }
  if (k < 0) {
    return;  // nothing occupied along this line
  }
  std::int64_t j = 0;
  for (std::int64_t q = 0; q < n; ++q) {
    while (scratch_z[static_cast<std::size_t>(j) + 1] < static_cast<double>(q)) ++j;
    const std::int64_t p = scratch_v[static_cast<std::size_t>(j)];
    const double dq = static_cast<double>(q - p);
    scratch_d[static_cast<std::size_t>(q)] = dq * dq + f[static_cast<std::size_t>(p)];
  }
  f = scratch_d;
}

/// Squared center distance, in cell units, from every grid cell to the
/// nearest marked cell.
inline std::vector<double> distance_transform(const Grid& grid, const std::vector<CellKey>& marked) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> field(grid.cell_count(), inf);
  for (CellKey k : marked) field[k] = 0.0;
  std::vector<double> line, d, z;
  std::vector<std::int64_t> v;
  std::uint64_t stride = 1;
  for (int axis = 0; axis < grid.dim; ++axis) {
    const auto n = static_cast<std::uint64_t>(grid.extent[static_cast<std::size_t>(axis)]);
    const std::uint64_t total = grid.cell_count();
    const std::uint64_t outer = total / (n * stride);
    for (std::uint64_t o = 0; o < outer; ++o) {
      for (std::uint64_t s = 0; s < stride; ++s) {
        const std::uint64_t base = o * n * stride + s;
        line.resize(n);
        for (std::uint64_t i = 0; i < n; ++i) line[i] = field[base + i * stride];
        edt_1d(line, d, v, z);
        for (std::uint64_t i = 0; i < n; ++i) field[base + i * stride] = line[i];
      }
    }
    stride *= n;
  }
  return field;
}

inline void require_compatible(const TaggedBoxSet& a, const TaggedBoxSet& b) {
  if (a.vertex() != b.vertex()) {
    throw Error(ErrorCode::TagMismatch, "box sets are tagged with different vertices");
  }
  if (a.grid().dim != b.grid().dim) {
    throw Error(ErrorCode::DimensionMismatch, "box sets have different dimensions");
  }
}

inline double directed_hausdorff_same_grid(const TaggedBoxSet& from, const TaggedBoxSet& to) {
  const auto field = distance_transform(to.grid(), to.cells());
  double worst = 0.0;
  for (CellKey k : from.cells()) worst = std::max(worst, field[k]);
  return std::sqrt(worst) * to.grid().h;
}

inline double directed_hausdorff_points(const std::vector<Point>& from, const std::vector<Point>& to) {
  // Early-break scan: once a point has a neighbour closer than the running
  // maximum it cannot raise the result.
  double cmax = 0.0;
  for (const auto& p : from) {
    double cmin = std::numeric_limits<double>::infinity();
    for (const auto& q : to) {
      const double d = squared_norm(p - q);
      if (d < cmin) {
        cmin = d;
        if (cmin <= cmax) break;
      }
    }
    cmax = std::max(cmax, cmin);
  }
  return std::sqrt(cmax);
}

}  // namespace detail

/// Hausdorff distance between the cell-center sets of two coverings. On a
/// shared grid this is 0 exactly when the cell sets coincide.
inline double hausdorff_distance(const TaggedBoxSet& a, const TaggedBoxSet& b) {
  detail::require_compatible(a, b);
  if (a.empty() || b.empty()) {
    return (a.empty() && b.empty()) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  if (a.grid() == b.grid()) {
    return std::max(detail::directed_hausdorff_same_grid(a, b),
                    detail::directed_hausdorff_same_grid(b, a));
  }
  const auto pa = a.centers();
  const auto pb = b.centers();
  return std::max(detail::directed_hausdorff_points(pa, pb), detail::directed_hausdorff_points(pb, pa));
}

inline double hausdorff_distance(const TaggedPointCloud& a, const TaggedPointCloud& b) {
  if (a.vertex != b.vertex) {
    throw Error(ErrorCode::TagMismatch, "point clouds are tagged with different vertices");
  }
  if (!a.points.empty() && !b.points.empty() && a.points.front().dim != b.points.front().dim) {
    throw Error(ErrorCode::DimensionMismatch, "point clouds have different dimensions");
  }
  if (a.points.empty() || b.points.empty()) {
    return (a.points.empty() && b.points.empty()) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::max(detail::directed_hausdorff_points(a.points, b.points),
                  detail::directed_hausdorff_points(b.points, a.points));
}

/// Minimum distance between the closed cell unions. Zero when any two cells
/// touch or overlap.
inline double min_separation(const TaggedBoxSet& a, const TaggedBoxSet& b) {
  detail::require_compatible(a, b);
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  if (a.grid() == b.grid()) {
    // Closure gap between cells i and j is h * |max(0, |i-j| - 1)| per axis,
    // i.e. the center distance from i to the one-cell dilation of b.
    const Grid& g = b.grid();
    std::vector<CellKey> dilated;
    dilated.reserve(b.size() * 9);
    for (CellKey k : b.cells()) {
      const CellIndex idx = g.index(k);
      CellIndex first{0, 0, 0};
      CellIndex last{0, 0, 0};
      for (int i = 0; i < g.dim; ++i) {
        const auto j = static_cast<std::size_t>(i);
        first[j] = std::max<std::int64_t>(idx[j] - 1, 0);
        last[j] = std::min<std::int64_t>(idx[j] + 1, g.extent[j] - 1);
      }
      for_each_cell_in(g, first, last, [&](const CellIndex& n) { dilated.push_back(g.key(n)); });
    }
    std::sort(dilated.begin(), dilated.end());
    dilated.erase(std::unique(dilated.begin(), dilated.end()), dilated.end());
    const auto field = detail::distance_transform(g, dilated);
    double best = std::numeric_limits<double>::infinity();
    for (CellKey k : a.cells()) best = std::min(best, field[k]);
    return std::sqrt(best) * g.h;
  }
  double best = std::numeric_limits<double>::infinity();
  for (CellKey ka : a.cells()) {
    const Box ba = a.grid().cell_box(a.grid().index(ka));
    for (CellKey kb : b.cells()) {
      best = std::min(best, box_gap(ba, b.grid().cell_box(b.grid().index(kb))));
    }
  }
  return best;
}

/// Splits every cell into factor^d subcells. The covered region is unchanged.
inline TaggedBoxSet refine(const TaggedBoxSet& a, int factor) {
  if (factor < 2) {
    throw Error(ErrorCode::InvalidArgument, "refinement factor must be at least 2");
  }
  Grid fine = a.grid();
  fine.h = a.grid().h / factor;
  for (int i = 0; i < fine.dim; ++i) fine.extent[static_cast<std::size_t>(i)] *= factor;
  std::vector<CellKey> cells;
  cells.reserve(a.size() * static_cast<std::size_t>(std::pow(factor, fine.dim)));
  for (CellKey k : a.cells()) {
    const CellIndex idx = a.grid().index(k);
    CellIndex first{0, 0, 0};
    CellIndex last{0, 0, 0};
    for (int i = 0; i < fine.dim; ++i) {
      const auto j = static_cast<std::size_t>(i);
      first[j] = idx[j] * factor;
      last[j] = idx[j] * factor + factor - 1;
    }
    for_each_cell_in(fine, first, last, [&](const CellIndex& c) { cells.push_back(fine.key(c)); });
  }
  return TaggedBoxSet(a.vertex(), fine, std::move(cells));
}

/// Merges factor^d blocks; a coarse cell is kept if any of its subcells is.
/// Requires grid extents divisible by factor.
inline TaggedBoxSet coarsen(const TaggedBoxSet& a, int factor) {
  if (factor < 2) {
    throw Error(ErrorCode::InvalidArgument, "coarsening factor must be at least 2");
  }
  Grid coarse = a.grid();
  coarse.h = a.grid().h * factor;
  for (int i = 0; i < coarse.dim; ++i) {
    auto& n = coarse.extent[static_cast<std::size_t>(i)];
    if (n % factor != 0) {
      throw Error(ErrorCode::GridMismatch, "grid extent not divisible by coarsening factor");
    }
    n /= factor;
  }
  std::vector<CellKey> cells;
  cells.reserve(a.size());
  for (CellKey k : a.cells()) {
    CellIndex idx = a.grid().index(k);
    for (int i = 0; i < coarse.dim; ++i) idx[static_cast<std::size_t>(i)] /= factor;
    cells.push_back(coarse.key(idx));
  }
  return TaggedBoxSet(a.vertex(), coarse, std::move(cells));
}

/// Set operations on coverings sharing a grid.
inline TaggedBoxSet intersect(const TaggedBoxSet& a, const TaggedBoxSet& b) {
  detail::require_compatible(a, b);
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "intersect needs a shared grid");
  std::vector<CellKey> out;
  std::set_intersection(a.cells().begin(), a.cells().end(), b.cells().begin(), b.cells().end(),
                        std::back_inserter(out));
  return TaggedBoxSet(a.vertex(), a.grid(), std::move(out));
}

inline TaggedBoxSet unite(const TaggedBoxSet& a, const TaggedBoxSet& b) {
  detail::require_compatible(a, b);
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "unite needs a shared grid");
  std::vector<CellKey> out;
  std::set_union(a.cells().begin(), a.cells().end(), b.cells().begin(), b.cells().end(),
                 std::back_inserter(out));
  return TaggedBoxSet(a.vertex(), a.grid(), std::move(out));
}

/// Cells of `a` together with their face/edge/corner neighbours.
inline TaggedBoxSet dilate(const TaggedBoxSet& a, std::int64_t cells = 1) {
  const Grid& g = a.grid();
  std::vector<CellKey> out;
  for (CellKey k : a.cells()) {
    const CellIndex idx = g.index(k);
    CellIndex first{0, 0, 0};
    CellIndex last{0, 0, 0};
    for (int i = 0; i < g.dim; ++i) {
      const auto j = static_cast<std::size_t>(i);
      first[j] = std::max<std::int64_t>(idx[j] - cells, 0);
      last[j] = std::min<std::int64_t>(idx[j] + cells, g.extent[j] - 1);
    }
    for_each_cell_in(g, first, last, [&](const CellIndex& n) { out.push_back(g.key(n)); });
  }
  return TaggedBoxSet(a.vertex(), g, std::move(out));
}

inline bool is_subset(const TaggedBoxSet& a, const TaggedBoxSet& b) {
  return std::includes(b.cells().begin(), b.cells().end(), a.cells().begin(), a.cells().end());
}

/// Bucketed nearest-neighbour index over a fixed point list. Ties resolve to
/// the lowest point index, so lookups are deterministic.
class PointIndex {
 public:
  PointIndex() = default;
  PointIndex(std::vector<Point> points, double bucket_size)
      : points_(std::move(points)), bucket_(bucket_size) {
    if (!(bucket_ > 0.0)) bucket_ = 1.0;
    if (points_.empty()) return;
    dim_ = points_.front().dim;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto key = bucket_of(points_[i]);
      buckets_[pack(key)].push_back(i);
      for (int a = 0; a < dim_; ++a) {
        const auto k = static_cast<std::size_t>(a);
        lo_[k] = i == 0 ? key[k] : std::min(lo_[k], key[k]);
        hi_[k] = i == 0 ? key[k] : std::max(hi_[k], key[k]);
      }
    }
  }

  const std::vector<Point>& points() const noexcept { return points_; }
  bool empty() const noexcept { return points_.empty(); }

  /// Index of the nearest point and its distance. With a finite
  /// `max_radius`, points farther than that may be missed; if none is found
  /// the distance is infinite.
  std::pair<std::size_t, double> nearest(const Point& p,
                                         double max_radius = std::numeric_limits<double>::infinity()) const {
    if (points_.empty()) throw Error(ErrorCode::InvalidArgument, "nearest() on empty index");
    const auto center = bucket_of(p);
    std::int64_t max_ring = 0;
    for (int a = 0; a < dim_; ++a) {
      const auto k = static_cast<std::size_t>(a);
      max_ring = std::max({max_ring, std::abs(center[k] - lo_[k]), std::abs(hi_[k] - center[k])});
    }
    if (std::isfinite(max_radius)) {
      max_ring = std::min(max_ring, static_cast<std::int64_t>(std::ceil(max_radius / bucket_)) + 1);
    }
    std::size_t best_index = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
      if (static_cast<double>(ring - 1) * bucket_ >= best) break;
      visit_ring(center, ring, [&](std::uint64_t key) {
        auto it = buckets_.find(key);
        if (it == buckets_.end()) return;
        for (std::size_t i : it->second) {
          const double d = distance(points_[i], p);
          if (d < best || (d == best && i < best_index)) {
            best = d;
            best_index = i;
          }
        }
      });
    }
    return {best_index, best};
  }

  /// Indices of all points within `radius` of p, ascending.
  std::vector<std::size_t> within(const Point& p, double radius) const {
    std::vector<std::size_t> out;
    if (points_.empty()) return out;
    const auto center = bucket_of(p);
    const auto rings = static_cast<std::int64_t>(std::ceil(radius / bucket_)) + 1;
    for (std::int64_t ring = 0; ring <= rings; ++ring) {
      visit_ring(center, ring, [&](std::uint64_t key) {
        auto it = buckets_.find(key);
        if (it == buckets_.end()) return;
        for (std::size_t i : it->second) {
          if (distance(points_[i], p) <= radius) out.push_back(i);
        }
      });
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  using Key = std::array<std::int64_t, kMaxDim>;

  Key bucket_of(const Point& p) const {
    Key k{0, 0, 0};
    for (int a = 0; a < p.dim; ++a) {
      k[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(std::floor(p[a] / bucket_));
    }
    return k;
  }

  static std::uint64_t pack(const Key& k) {
    // 21 bits per axis is ample for the grids used here.
    std::uint64_t out = 0;
    for (std::size_t a = 0; a < kMaxDim; ++a) {
      out = (out << 21) | (static_cast<std::uint64_t>(k[a] + (1 << 20)) & ((1u << 21) - 1));
    }
    return out;
  }

  template <typename Visit>
  void visit_ring(const Key& center, std::int64_t ring, Visit&& visit) const {
    Key idx{0, 0, 0};
    std::array<std::int64_t, kMaxDim> first{0, 0, 0};
    std::array<std::int64_t, kMaxDim> last{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      const auto k = static_cast<std::size_t>(a);
      first[k] = std::max(center[k] - ring, lo_[k]);
      last[k] = std::min(center[k] + ring, hi_[k]);
      if (first[k] > last[k]) return;
    }
    idx = first;
    while (true) {
      std::int64_t cheb = 0;
      for (int a = 0; a < dim_; ++a) {
        const auto k = static_cast<std::size_t>(a);
        cheb = std::max(cheb, std::abs(idx[k] - center[k]));
      }
      if (cheb == ring) visit(pack(idx));
      int a = 0;
      while (a < dim_) {
        const auto k = static_cast<std::size_t>(a);
        if (idx[k] < last[k]) {
          ++idx[k];
          break;
        }
        idx[k] = first[k];
        ++a;
      }
      if (a == dim_) return;
    }
  }

  std::vector<Point> points_;
  double bucket_ = 1.0;
  int dim_ = 0;
  Key lo_{0, 0, 0};
  Key hi_{0, 0, 0};
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

}  // namespace mwkit
