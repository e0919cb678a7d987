#pragma once

// Sampled model of the correspondence X = C(E x_G K) over A = C(K).
//
// Elements of A are tables over per-vertex sample points; elements of X^{(k)}
// are tables over pairs (a, x) with a in E^k and x a sample of K_{r(a)}.
// Off-grid evaluations (a o phi_e, xi o f) read the nearest sample unless the
// algebra element carries an exact evaluator.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "mwkit/attractor.hpp"
#include "mwkit/error.hpp"
#include "mwkit/geometry.hpp"
#include "mwkit/graph.hpp"
#include "mwkit/mw_graph.hpp"

namespace mwkit {

using Complex = std::complex<double>;

class SampleGrid {
 public:
  SampleGrid() = default;

  SampleGrid(const MWGraph& mw, std::vector<std::vector<Point>> samples, double bucket)
      : data_(std::make_shared<Data>()) {
    if (samples.size() != mw.graph().vertex_count()) {
      throw Error(ErrorCode::TagMismatch, "sample grid needs one point list per vertex");
    }
    data_->mw = &mw;
    data_->bucket = bucket;
    for (auto& list : samples) {
      if (list.empty()) throw Error(ErrorCode::InvalidArgument, "sample grid has an empty vertex");
      data_->index.emplace_back(list, bucket);
    }
    data_->samples = std::move(samples);
  }

  /// Cell centers of the invariant-list covering.
  static SampleGrid from_covering(const MWGraph& mw, const InvariantList& k) {
    std::vector<std::vector<Point>> samples;
    for (const auto& s : k.sets) samples.push_back(s.centers());
    return SampleGrid(mw, std::move(samples), k.resolution);
  }

  const MWGraph& system() const { return *data_->mw; }
  std::size_t vertex_count() const { return data_->samples.size(); }
  const std::vector<Point>& samples(VertexId v) const { return data_->samples.at(static_cast<std::size_t>(v)); }
  std::size_t sample_count(VertexId v) const { return samples(v).size(); }
  double bucket() const { return data_->bucket; }

  std::pair<std::size_t, double> nearest(VertexId v, const Point& p) const {
    return data_->index.at(static_cast<std::size_t>(v)).nearest(p);
  }

  bool valid() const noexcept { return data_ != nullptr; }

  friend bool operator==(const SampleGrid& a, const SampleGrid& b) { return a.data_ == b.data_; }

 private:
  struct Data {
    const MWGraph* mw = nullptr;
    std::vector<std::vector<Point>> samples;
    std::vector<PointIndex> index;
    double bucket = 1.0;
  };
  std::shared_ptr<Data> data_;
};

namespace detail {

inline void require_same_grid(const SampleGrid& a, const SampleGrid& b) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "elements live on different sample grids");
}

}  // namespace detail

class AlgebraElement {
 public:
  using Function = std::function<Complex(VertexId, const Point&)>;

  AlgebraElement() = default;

  static AlgebraElement constant(const SampleGrid& grid, Complex c) {
    return from_function(grid, [c](VertexId, const Point&) { return c; });
  }

  /// Samples fn on the grid and keeps fn for exact off-grid evaluation.
  static AlgebraElement from_function(const SampleGrid& grid, Function fn) {
    AlgebraElement a = table(grid, [&](VertexId v, const Point& p) { return fn(v, p); });
    a.exact_ = std::move(fn);
    return a;
  }

  /// Samples fn on the grid; off-grid evaluation uses the nearest sample.
  template <typename Fn>
  static AlgebraElement table(const SampleGrid& grid, Fn&& fn) {
    AlgebraElement a;
    a.grid_ = grid;
    a.values_.resize(grid.vertex_count());
    for (std::size_t v = 0; v < grid.vertex_count(); ++v) {
      for (const auto& p : grid.samples(static_cast<VertexId>(v))) a.values_[v].push_back(fn(static_cast<VertexId>(v), p));
    }
    return a;
  }

  /// Random continuous function: a short sum of plane waves.
  template <typename Rng>
  static AlgebraElement random_smooth(const SampleGrid& grid, Rng& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    struct Wave {
      Complex amplitude;
      std::array<double, kMaxDim> frequency;
      double phase;
    };
    std::vector<Wave> waves(3);
    for (auto& w : waves) {
      w.amplitude = Complex(unit(rng), unit(rng)) / 3.0;
      for (auto& f : w.frequency) f = 3.0 * unit(rng);
      w.phase = 3.0 * unit(rng);
    }
    return from_function(grid, [waves](VertexId v, const Point& p) {
      Complex out(0.0, 0.0);
      for (const auto& w : waves) {
        double arg = w.phase + 0.7 * v;
        for (int i = 0; i < p.dim; ++i) arg += w.frequency[static_cast<std::size_t>(i)] * p[i];
        out += w.amplitude * std::cos(arg);
      }
      return out;
    });
  }

  const SampleGrid& grid() const noexcept { return grid_; }
  bool exact() const noexcept { return static_cast<bool>(exact_); }

  Complex at(VertexId v, std::size_t i) const {
    return values_.at(static_cast<std::size_t>(v)).at(i);
  }
  Complex& at(VertexId v, std::size_t i) { return values_.at(static_cast<std::size_t>(v)).at(i); }

  Complex eval(VertexId v, const Point& p) const {
    if (exact_) return exact_(v, p);
    return at(v, grid_.nearest(v, p).first);
  }

  AlgebraElement adjoint() const {
    AlgebraElement out = *this;
    for (auto& row : out.values_) {
      for (auto& z : row) z = std::conj(z);
    }
    if (exact_) {
      out.exact_ = [fn = exact_](VertexId v, const Point& p) { return std::conj(fn(v, p)); };
    }
    return out;
  }

  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    detail::require_same_grid(a.grid_, b.grid_);
    AlgebraElement out = a;
    for (std::size_t v = 0; v < out.values_.size(); ++v) {
      for (std::size_t i = 0; i < out.values_[v].size(); ++i) out.values_[v][i] *= b.values_[v][i];
    }
    if (a.exact_ && b.exact_) {
      out.exact_ = [fa = a.exact_, fb = b.exact_](VertexId v, const Point& p) { return fa(v, p) * fb(v, p); };
    } else {
      out.exact_ = nullptr;
    }
    return out;
  }

  /// Replaces the off-grid evaluator (the table is left as is).
  void set_evaluator(Function fn) { exact_ = std::move(fn); }

 private:
  SampleGrid grid_;
  std::vector<std::vector<Complex>> values_;
  Function exact_;
};

/// sup over samples of |a - b|.
inline double sup_distance(const AlgebraElement& a, const AlgebraElement& b) {
  detail::require_same_grid(a.grid(), b.grid());
  double d = 0.0;
  for (std::size_t v = 0; v < a.grid().vertex_count(); ++v) {
    const auto vertex = static_cast<VertexId>(v);
    for (std::size_t i = 0; i < a.grid().sample_count(vertex); ++i) d = std::max(d, std::abs(a.at(vertex, i) - b.at(vertex, i)));
  }
  return d;
}

class CorrElement {
 public:
  CorrElement() = default;

  static CorrElement zero(const SampleGrid& grid, std::size_t order) {
    if (order == 0) throw Error(ErrorCode::OrderMismatch, "correspondence elements have order >= 1");
    CorrElement x;
    x.grid_ = grid;
    x.order_ = order;
    x.paths_ = paths_of_length(grid.system().graph(), order);
    for (const auto& p : x.paths_) {
      x.values_.emplace_back(grid.sample_count(grid.system().graph().path_range(p)), Complex(0.0, 0.0));
    }
    return x;
  }

  /// delta_a: 1 on every sample of the fiber over a, 0 elsewhere.
  static CorrElement basis(const SampleGrid& grid, const Path& alpha) {
    CorrElement x = zero(grid, alpha.size());
    auto& row = x.values_[x.path_index(alpha)];
    std::fill(row.begin(), row.end(), Complex(1.0, 0.0));
    return x;
  }

  template <typename Fn>
  static CorrElement from_function(const SampleGrid& grid, std::size_t order, Fn&& fn) {
    CorrElement x = zero(grid, order);
    const auto& g = grid.system().graph();
    for (std::size_t k = 0; k < x.paths_.size(); ++k) {
      const auto& pts = grid.samples(g.path_range(x.paths_[k]));
      for (std::size_t i = 0; i < pts.size(); ++i) x.values_[k][i] = fn(x.paths_[k], pts[i]);
    }
    return x;
  }

  template <typename Rng>
  static CorrElement random(const SampleGrid& grid, std::size_t order, Rng& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    CorrElement x = zero(grid, order);
    for (auto& row : x.values_) {
      for (auto& z : row) z = Complex(unit(rng), unit(rng));
    }
    return x;
  }

  const SampleGrid& grid() const noexcept { return grid_; }
  std::size_t order() const noexcept { return order_; }
  const std::vector<Path>& paths() const noexcept { return paths_; }

  std::size_t path_index(const Path& alpha) const {
    auto it = std::lower_bound(paths_.begin(), paths_.end(), alpha);
    if (it == paths_.end() || *it != alpha) throw Error(ErrorCode::InvalidPath, format_path(alpha));
    return static_cast<std::size_t>(it - paths_.begin());
  }

  VertexId fiber(std::size_t k) const { return grid_.system().graph().path_range(paths_[k]); }

  Complex at(std::size_t k, std::size_t i) const { return values_.at(k).at(i); }
  Complex& at(std::size_t k, std::size_t i) { return values_.at(k).at(i); }
  const std::vector<Complex>& row(std::size_t k) const { return values_.at(k); }

  /// Value at (paths()[k], p) for an arbitrary point p of K_{r}: nearest sample.
  Complex eval(std::size_t k, const Point& p) const { return at(k, grid_.nearest(fiber(k), p).first); }

 private:
  SampleGrid grid_;
  std::size_t order_ = 0;
  std::vector<Path> paths_;
  std::vector<std::vector<Complex>> values_;
};

/// (xi . a)(a, x) = xi(a, x) a(x).
inline CorrElement right_action(const CorrElement& xi, const AlgebraElement& a) {
  detail::require_same_grid(xi.grid(), a.grid());
  CorrElement out = xi;
  for (std::size_t k = 0; k < xi.paths().size(); ++k) {
    const VertexId v = xi.fiber(k);
    for (std::size_t i = 0; i < xi.row(k).size(); ++i) out.at(k, i) *= a.at(v, i);
  }
  return out;
}

/// (a . xi)(a, x) = a(phi_a(x)) xi(a, x), phi_a the composite along the path.
inline CorrElement left_action(const AlgebraElement& a, const CorrElement& xi) {
  detail::require_same_grid(xi.grid(), a.grid());
  const auto& mw = xi.grid().system();
  CorrElement out = xi;
  for (std::size_t k = 0; k < xi.paths().size(); ++k) {
    const auto& alpha = xi.paths()[k];
    const AffineMap m = mw.composite(alpha);
    const VertexId target = mw.graph().path_source(alpha);
    const auto& pts = xi.grid().samples(xi.fiber(k));
    for (std::size_t i = 0; i < pts.size(); ++i) out.at(k, i) *= a.eval(target, m(pts[i]));
  }
  return out;
}

/// <xi, eta>(x) = sum over a with r(a) = vertex of x of conj(xi(a,x)) eta(a,x).
inline AlgebraElement inner_product(const CorrElement& xi, const CorrElement& eta) {
  detail::require_same_grid(xi.grid(), eta.grid());
  if (xi.order() != eta.order()) throw Error(ErrorCode::OrderMismatch, "inner product needs equal orders");
  AlgebraElement out = AlgebraElement::table(xi.grid(), [](VertexId, const Point&) { return Complex(0.0, 0.0); });
  for (std::size_t k = 0; k < xi.paths().size(); ++k) {
    const VertexId v = xi.fiber(k);
    for (std::size_t i = 0; i < xi.row(k).size(); ++i) out.at(v, i) += std::conj(xi.at(k, i)) * eta.at(k, i);
  }
  return out;
}

/// Balanced tensor: (xi (x) eta)(a b, x) = xi(a, phi_b(x)) eta(b, x).
inline CorrElement tensor(const CorrElement& xi, const CorrElement& eta) {
  detail::require_same_grid(xi.grid(), eta.grid());
  const auto& mw = xi.grid().system();
  const std::size_t j = xi.order();
  CorrElement out = CorrElement::zero(xi.grid(), j + eta.order());
  for (std::size_t k = 0; k < out.paths().size(); ++k) {
    const auto& path = out.paths()[k];
    const Path alpha(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(j));
    const Path beta(path.begin() + static_cast<std::ptrdiff_t>(j), path.end());
    const std::size_t ia = xi.path_index(alpha);
    const std::size_t ib = eta.path_index(beta);
    const AffineMap m = mw.composite(beta);
    const auto& pts = xi.grid().samples(out.fiber(k));
    for (std::size_t i = 0; i < pts.size(); ++i) out.at(k, i) = xi.eval(ia, m(pts[i])) * eta.at(ib, i);
  }
  return out;
}

/// sup over all entries of |x - y|.
inline double sup_distance(const CorrElement& x, const CorrElement& y) {
  detail::require_same_grid(x.grid(), y.grid());
  if (x.order() != y.order()) throw Error(ErrorCode::OrderMismatch, "orders differ");
  double d = 0.0;
  for (std::size_t k = 0; k < x.paths().size(); ++k) {
    for (std::size_t i = 0; i < x.row(k).size(); ++i) d = std::max(d, std::abs(x.at(k, i) - y.at(k, i)));
  }
  return d;
}

}  // namespace mwkit
