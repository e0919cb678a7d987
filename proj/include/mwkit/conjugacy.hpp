#pragma once

// Local conjugacy certificates between two systems on the same graph, the
// correspondence map V they induce, and the converse direction: reading a
// certificate back off the matrix of V.
//
// Stored orientation: on U_j,  f^{-1} o phi2_{sigma_j(e)} o f = phi1_e.
// Vertices are matched by id: f sends K1_v to K2_v.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mwkit/attractor.hpp"
#include "mwkit/correspondence.hpp"
#include "mwkit/error.hpp"
#include "mwkit/matching.hpp"
#include "mwkit/mw_graph.hpp"
#include "mwkit/structure.hpp"
#include "mwkit/symbolic.hpp"

namespace mwkit {

using Permutation = std::vector<EdgeId>;

inline bool is_permutation_of_edges(const Permutation& p, std::size_t n) {
  if (p.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (EdgeId e : p) {
    if (e < 0 || static_cast<std::size_t>(e) >= n || seen[static_cast<std::size_t>(e)]) return false;
    seen[static_cast<std::size_t>(e)] = 1;
  }
  return true;
}

inline Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline Permutation inverse_permutation(const Permutation& p) {
  Permutation q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[static_cast<std::size_t>(p[i])] = static_cast<EdgeId>(i);
  return q;
}

/// Homeomorphism descriptor f: K1 -> K2, either per-vertex affine maps or the
/// address conjugacy pi2 o pi1^{-1} realised by greedy address descent.
class FMap {
 public:
  enum class Kind { Affine, Address };

  struct AddressData {
    MWGraph mw1;
    MWGraph mw2;
    InvariantList k1;
    InvariantList k2;
    double tau1 = 0.0;
    double tau2 = 0.0;
    std::size_t depth = 60;
  };

  FMap() = default;

  static FMap affine(std::vector<AffineMap> per_vertex) {
    FMap f;
    f.kind_ = Kind::Affine;
    for (const auto& m : per_vertex) f.inverse_.push_back(m.inverse());
    f.forward_ = std::move(per_vertex);
    return f;
  }

  static FMap identity(std::size_t vertices, int dim) {
    return affine(std::vector<AffineMap>(vertices, AffineMap::identity(dim)));
  }

  /// tau defaults to one cell diameter of each covering.
  static FMap address(const MWGraph& mw1, const InvariantList& k1, const MWGraph& mw2, const InvariantList& k2,
                      std::optional<double> tau1 = {}, std::optional<double> tau2 = {}, std::size_t depth = 60) {
    FMap f;
    f.kind_ = Kind::Address;
    auto data = std::make_shared<AddressData>(AddressData{mw1, mw2, k1, k2, 0.0, 0.0, depth});
    data->tau1 = tau1.value_or(k1.sets.front().grid().cell_diameter());
    data->tau2 = tau2.value_or(k2.sets.front().grid().cell_diameter());
    f.address_ = std::move(data);
    return f;
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<AffineMap>& affine_maps() const noexcept { return forward_; }
  const AddressData& address_data() const { return *address_; }

  Point forward(VertexId v, const Point& x) const {
    if (kind_ == Kind::Affine) return forward_.at(static_cast<std::size_t>(v))(x);
    const auto& d = *address_;
    return transport(d.mw1, d.k1, d.mw2, d.k2, d.tau1, v, x);
  }

  Point inverse(VertexId v, const Point& y) const {
    if (kind_ == Kind::Affine) return inverse_.at(static_cast<std::size_t>(v))(y);
    const auto& d = *address_;
    return transport(d.mw2, d.k2, d.mw1, d.k1, d.tau2, v, y);
  }

 private:
  Point transport(const MWGraph& from, const InvariantList& kf, const MWGraph& to, const InvariantList& kt,
                  double tau, VertexId v, const Point& x) const {
    const Descent d = descend(from, kf, v, x, tau, address_->depth);
    const Point base = kt.at(d.end).bounding_box().center();
    return d.path.empty() ? base : to.composite(d.path)(base);
  }

  Kind kind_ = Kind::Affine;
  std::vector<AffineMap> forward_;
  std::vector<AffineMap> inverse_;
  std::shared_ptr<const AddressData> address_;
};

/// Union of covering cells over K1, or all of K1.
struct CoverSet {
  bool all = false;
  std::vector<TaggedBoxSet> parts;

  bool contains(VertexId v, const Point& p) const {
    if (all) return true;
    for (const auto& part : parts) {
      if (part.vertex() == v && part.contains_point(p, 1e-12)) return true;
    }
    return false;
  }
};

struct ConjugacyCertificate {
  FMap f;
  std::vector<CoverSet> cover;
  std::vector<Permutation> sigmas;
};

inline ConjugacyCertificate identity_certificate(const MWGraph& mw) {
  return {FMap::identity(mw.graph().vertex_count(), mw.dim()), {CoverSet{true, {}}},
          {identity_permutation(mw.graph().edge_count())}};
}

// ---------------------------------------------------------------------------
// Certificate residuals

struct RefutationRow {
  std::size_t cover = 0;
  EdgeId e = 0;
  double sup = 0.0;
  std::size_t samples = 0;
};

struct RefutationReport {
  std::vector<RefutationRow> rows;
  double max_residual = 0.0;
  std::size_t cover_gaps = 0;  // samples of K1 outside every cover set
  bool partition = true;       // no sample lies in two cover sets
  double tol = 0.0;
  bool passed = false;
};

/// sup over U_j samples of |f^{-1}(phi2_{sigma_j(e)}(f(x))) - phi1_e(x)|.
inline RefutationReport refute_certificate(const ConjugacyCertificate& cert, const MWGraph& mw1,
                                           const MWGraph& mw2, const SampleGrid& grid1, double tol) {
  const auto& g1 = mw1.graph();
  const auto& g2 = mw2.graph();
  RefutationReport report;
  report.tol = tol;
  std::vector<std::vector<std::vector<char>>> member(cert.cover.size());
  for (std::size_t j = 0; j < cert.cover.size(); ++j) {
    member[j].resize(g1.vertex_count());
    for (std::size_t v = 0; v < g1.vertex_count(); ++v) {
      for (const auto& p : grid1.samples(static_cast<VertexId>(v))) {
        member[j][v].push_back(cert.cover[j].contains(static_cast<VertexId>(v), p) ? 1 : 0);
      }
    }
  }
  for (std::size_t v = 0; v < g1.vertex_count(); ++v) {
    for (std::size_t i = 0; i < grid1.sample_count(static_cast<VertexId>(v)); ++i) {
      std::size_t hits = 0;
      for (std::size_t j = 0; j < cert.cover.size(); ++j) hits += member[j][v][i];
      if (hits == 0) ++report.cover_gaps;
      if (hits > 1) report.partition = false;
    }
  }
  for (std::size_t j = 0; j < cert.cover.size(); ++j) {
    const auto& sigma = cert.sigmas.at(j);
    for (std::size_t ei = 0; ei < g1.edge_count(); ++ei) {
      const auto e = static_cast<EdgeId>(ei);
      RefutationRow row{j, e, 0.0, 0};
      const EdgeId target = sigma.at(ei);
      const VertexId v = g1.range(e);
      const bool chained = g2.range(target) == v && g2.source(target) == g1.source(e);
      const auto& pts = grid1.samples(v);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!member[j][static_cast<std::size_t>(v)][i]) continue;
        ++row.samples;
        if (!chained) {
          row.sup = std::numeric_limits<double>::infinity();
          continue;
        }
        const Point lhs = cert.f.inverse(g1.source(e), mw2.map(target)(cert.f.forward(v, pts[i])));
        row.sup = std::max(row.sup, distance(lhs, mw1.map(e)(pts[i])));
      }
      report.max_residual = std::max(report.max_residual, row.sup);
      report.rows.push_back(row);
    }
  }
  report.passed = report.cover_gaps == 0 && report.max_residual <= tol;
  return report;
}

/// Residual table for f fixed and one global sigma, over every sigma that
/// respects sources and ranges. A large minimum sup rules out single-piece
/// certificates with this f.
struct SigmaResidual {
  Permutation sigma;
  double sup = 0.0;           // max over e and samples
  double pointwise_min = 0.0; // min over samples of the max over e
};

inline std::vector<SigmaResidual> refutation_table(const FMap& f, const MWGraph& mw1, const MWGraph& mw2,
                                                   const SampleGrid& grid1, std::size_t max_permutations = 720) {
  const auto& g1 = mw1.graph();
  const auto& g2 = mw2.graph();
  const std::size_t n = g1.edge_count();
  std::vector<SigmaResidual> out;
  Permutation sigma = identity_permutation(n);
  std::size_t seen = 0;
  do {
    if (++seen > max_permutations) throw Error(ErrorCode::InvalidArgument, "too many permutations to tabulate");
    bool chained = true;
    for (std::size_t e = 0; e < n; ++e) {
      const auto t = sigma[e];
      chained = chained && g2.range(t) == g1.range(static_cast<EdgeId>(e)) &&
                g2.source(t) == g1.source(static_cast<EdgeId>(e));
    }
    if (!chained) continue;
    SigmaResidual row{sigma, 0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t v = 0; v < g1.vertex_count(); ++v) {
      const auto vertex = static_cast<VertexId>(v);
      for (const auto& x : grid1.samples(vertex)) {
        double worst = 0.0;
        for (EdgeId e : g1.edges_into(vertex)) {
          const Point lhs = f.inverse(g1.source(e), mw2.map(sigma[static_cast<std::size_t>(e)])(f.forward(vertex, x)));
          worst = std::max(worst, distance(lhs, mw1.map(e)(x)));
        }
        row.sup = std::max(row.sup, worst);
        row.pointwise_min = std::min(row.pointwise_min, worst);
      }
    }
    out.push_back(std::move(row));
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return out;
}

// ---------------------------------------------------------------------------
// The map V: X2 -> X1 and the algebra map beta(b) = b o f

class VMap {
 public:
  /// Builds V on grid1 = covering centers of K1 and grid2 = f(grid1), after
  /// checking that the cover has no gaps and that f is a bijection at the
  /// covering resolution.
  VMap(ConjugacyCertificate cert, const MWGraph& mw1, const InvariantList& k1, const MWGraph& mw2,
       const InvariantList& k2)
      : cert_(std::move(cert)), mw1_(&mw1), mw2_(&mw2) {
    const auto& g1 = mw1.graph();
    if (!(g1 == mw2.graph())) throw Error(ErrorCode::GraphMismatch, "systems have different graphs");
    const std::size_t n = g1.edge_count();
    if (cert_.cover.size() != cert_.sigmas.size() || cert_.cover.empty()) {
      throw Error(ErrorCode::CertificateInvalid, "cover and permutation lists differ in length");
    }
    for (const auto& s : cert_.sigmas) {
      if (!is_permutation_of_edges(s, n)) throw Error(ErrorCode::CertificateInvalid, "sigma is not a permutation");
    }
    grid1_ = SampleGrid::from_covering(mw1, k1);
    const double cell1 = k1.sets.front().grid().cell_diameter();
    const double cell2 = k2.sets.front().grid().cell_diameter();
    std::vector<std::vector<Point>> pushed(g1.vertex_count());
    cover_of_.resize(g1.vertex_count());
    for (std::size_t v = 0; v < g1.vertex_count(); ++v) {
      const auto vertex = static_cast<VertexId>(v);
      for (const auto& x : grid1_.samples(vertex)) {
        const Point y = cert_.f.forward(vertex, x);
        if (k2.at(vertex).distance_to(y, cell2) > cell2) {
          throw Error(ErrorCode::CertificateInvalid, "f moves a sample of K1 off K2");
        }
        if (distance(cert_.f.inverse(vertex, y), x) > cell1) {
          throw Error(ErrorCode::CertificateInvalid, "f is not invertible at the covering resolution");
        }
        std::optional<std::size_t> first;
        for (std::size_t j = 0; j < cert_.cover.size() && !first; ++j) {
          if (cert_.cover[j].contains(vertex, x)) first = j;
        }
        if (!first) throw Error(ErrorCode::CertificateInvalid, "cover misses a sample of K1");
        cover_of_[v].push_back(*first);
        pushed[v].push_back(y);
      }
    }
    grid2_ = SampleGrid(mw2, std::move(pushed), k2.resolution);
  }

  const SampleGrid& grid1() const noexcept { return grid1_; }
  const SampleGrid& grid2() const noexcept { return grid2_; }
  const ConjugacyCertificate& certificate() const noexcept { return cert_; }

  /// V(xi)(e, x) = xi(sigma_j(e), f(x)) with U_j the first cover set holding x.
  CorrElement operator()(const CorrElement& xi) const {
    detail::require_same_grid(xi.grid(), grid2_);
    if (xi.order() != 1) throw Error(ErrorCode::OrderMismatch, "V acts on order-1 elements");
    const auto& g = mw1_->graph();
    CorrElement out = CorrElement::zero(grid1_, 1);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const VertexId v = g.range(static_cast<EdgeId>(e));
      for (std::size_t i = 0; i < grid1_.sample_count(v); ++i) {
        const std::size_t j = cover_of_[static_cast<std::size_t>(v)][i];
        const auto target = static_cast<std::size_t>(cert_.sigmas[j][e]);
        out.at(e, i) = xi.at(target, i);  // grid2 sample i is f(grid1 sample i)
      }
    }
    return out;
  }

  /// beta(b) = b o f, with an evaluator so off-grid points stay exact when b is.
  AlgebraElement beta(const AlgebraElement& b) const {
    detail::require_same_grid(b.grid(), grid2_);
    AlgebraElement out = AlgebraElement::table(grid1_, [](VertexId, const Point&) { return Complex(0.0, 0.0); });
    for (std::size_t v = 0; v < grid1_.vertex_count(); ++v) {
      const auto vertex = static_cast<VertexId>(v);
      for (std::size_t i = 0; i < grid1_.sample_count(vertex); ++i) out.at(vertex, i) = b.at(vertex, i);
    }
    out.set_evaluator([b, f = cert_.f](VertexId v, const Point& p) { return b.eval(v, f.forward(v, p)); });
    return out;
  }

 private:
  ConjugacyCertificate cert_;
  const MWGraph* mw1_;
  const MWGraph* mw2_;
  SampleGrid grid1_;
  SampleGrid grid2_;
  std::vector<std::vector<std::size_t>> cover_of_;
};

struct VerifyReport {
  double inner_residual = 0.0;     // max |<V xi, V eta> - beta(<xi, eta>)|
  double bimodule_residual = 0.0;  // max |V(b1 xi b2) - beta(b1) V(xi) beta(b2)|
  double probe_residual = 0.0;     // bimodule residual on basis elements and coordinate functions
  std::size_t trials = 0;
  double tol = 0.0;
  bool passed = false;
};

/// Random-trial check that V is an inner-product preserving bimodule map
/// along beta. Elements xi, eta are random tables on grid2; b1, b2 are random
/// smooth functions. A deterministic probe uses the basis elements delta_g
/// and the first coordinate function.
inline VerifyReport verify_isomorphism(const VMap& V, std::size_t trials, double tol, std::uint64_t seed) {
  VerifyReport report;
  report.trials = trials;
  report.tol = tol;
  const SampleGrid& grid2 = V.grid2();
  const auto& g = grid2.system().graph();
  std::mt19937_64 rng(seed);

  auto bimodule = [&](const AlgebraElement& b1, const CorrElement& xi, const AlgebraElement& b2) {
    const CorrElement lhs = V(right_action(left_action(b1, xi), b2));
    const CorrElement rhs = right_action(left_action(V.beta(b1), V(xi)), V.beta(b2));
    return sup_distance(lhs, rhs);
  };

  for (std::size_t t = 0; t < trials; ++t) {
    const CorrElement xi = CorrElement::random(grid2, 1, rng);
    const CorrElement eta = CorrElement::random(grid2, 1, rng);
    const AlgebraElement b1 = AlgebraElement::random_smooth(grid2, rng);
    const AlgebraElement b2 = AlgebraElement::random_smooth(grid2, rng);
    report.inner_residual =
        std::max(report.inner_residual, sup_distance(inner_product(V(xi), V(eta)), V.beta(inner_product(xi, eta))));
    report.bimodule_residual = std::max(report.bimodule_residual, bimodule(b1, xi, b2));
  }
  const AlgebraElement coordinate =
      AlgebraElement::from_function(grid2, [](VertexId, const Point& p) { return Complex(p[0], 0.0); });
  const AlgebraElement one = AlgebraElement::constant(grid2, Complex(1.0, 0.0));
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const CorrElement delta = CorrElement::basis(grid2, Path{static_cast<EdgeId>(e)});
    report.probe_residual = std::max(report.probe_residual, bimodule(coordinate, delta, one));
    for (std::size_t f = 0; f < g.edge_count(); ++f) {
      const CorrElement other = CorrElement::basis(grid2, Path{static_cast<EdgeId>(f)});
      report.inner_residual = std::max(
          report.inner_residual, sup_distance(inner_product(V(delta), V(other)), V.beta(inner_product(delta, other))));
    }
  }
  report.passed = report.inner_residual <= tol && report.bimodule_residual <= tol && report.probe_residual <= tol;
  return report;
}

// ---------------------------------------------------------------------------
// w-matrix and the converse extraction

/// w[v][i] is the n x n matrix (w_eg) at sample i of K1_v; w_eg = <delta_e, W delta_g>.
struct WMatrix {
  SampleGrid grid;
  std::vector<std::vector<Eigen::MatrixXcd>> at;
};

/// w_eg(x) = (W delta_g)(e, x) for a correspondence map W: X2 -> X1 on grid1.
template <typename Map>
WMatrix w_matrix(const Map& W, const SampleGrid& grid1, const SampleGrid& grid2) {
  const auto& g = grid1.system().graph();
  const auto n = static_cast<Eigen::Index>(g.edge_count());
  WMatrix w;
  w.grid = grid1;
  w.at.resize(grid1.vertex_count());
  for (std::size_t v = 0; v < grid1.vertex_count(); ++v) {
    w.at[v].assign(grid1.sample_count(static_cast<VertexId>(v)), Eigen::MatrixXcd::Zero(n, n));
  }
  for (Eigen::Index col = 0; col < n; ++col) {
    const CorrElement image = W(CorrElement::basis(grid2, Path{static_cast<EdgeId>(col)}));
    for (Eigen::Index row = 0; row < n; ++row) {
      const auto k = static_cast<std::size_t>(row);
      const auto v = static_cast<std::size_t>(g.range(static_cast<EdgeId>(row)));
      for (std::size_t i = 0; i < image.row(k).size(); ++i) w.at[v][i](row, col) = image.at(k, i);
    }
  }
  return w;
}

inline WMatrix w_matrix(const VMap& V) { return w_matrix(V, V.grid1(), V.grid2()); }

/// max over samples and (g, e) of |sum_f conj(w_fg) w_fe - delta_ge| on the
/// per-vertex block.
inline double isometry_defect(const WMatrix& w) {
  const auto& g = w.grid.system().graph();
  double d = 0.0;
  for (std::size_t v = 0; v < w.at.size(); ++v) {
    const auto& into = g.edges_into(static_cast<VertexId>(v));
    for (const auto& m : w.at[v]) {
      for (EdgeId a : into) {
        for (EdgeId b : into) {
          Complex s(0.0, 0.0);
          for (EdgeId f : into) s += std::conj(m(f, a)) * m(f, b);
          d = std::max(d, std::abs(s - Complex(a == b ? 1.0 : 0.0, 0.0)));
        }
      }
    }
  }
  return d;
}

struct Extraction {
  ConjugacyCertificate certificate;
  std::vector<std::vector<std::size_t>> cover_of;  // per K1 sample, its cover set
};

namespace detail {

inline std::string sample_name(VertexId v, const Point& p) {
  std::string s = "vertex " + std::to_string(v) + " at (";
  for (int i = 0; i < p.dim; ++i) s += (i ? ", " : "") + std::to_string(p[i]);
  return s + ")";
}

}  // namespace detail

/// Picks at each sample x the permutation maximizing prod |w_{e, sigma(e)}(x)|
/// (lexicographically smallest among optima), then merges samples with equal
/// sigma into one cover set of covering cells. Stored sigma(e) is the column
/// matched to row e, i.e. the inverse of the converse theorem's sigma_x.
inline Extraction extract_conjugacy(const WMatrix& w, const FMap& f, const InvariantList& k1,
                                    double singular_tol = 1e-9) {
  const auto& g = w.grid.system().graph();
  const std::size_t n = g.edge_count();
  Extraction out;
  out.certificate.f = f;
  out.cover_of.resize(w.at.size());
  std::vector<std::vector<std::vector<CellKey>>> cells;  // [cover][vertex] -> cells
  for (std::size_t v = 0; v < w.at.size(); ++v) {
    const auto vertex = static_cast<VertexId>(v);
    const auto& into = g.edges_into(vertex);
    const auto m = into.size();
    for (std::size_t i = 0; i < w.at[v].size(); ++i) {
      const Point& x = w.grid.samples(vertex)[i];
      Eigen::MatrixXcd block(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c) block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w.at[v][i](into[r], into[c]);
      }
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block);
      const auto& s = svd.singularValues();
      if (!(s.minCoeff() > singular_tol * std::max(1.0, s.maxCoeff()))) {
        throw Error(ErrorCode::SingularAtSample, detail::sample_name(vertex, x));
      }
      const double zero_cost = 1e9;
      std::vector<std::vector<double>> cost(m, std::vector<double>(m, zero_cost));
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
          const double mag = std::abs(block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
          if (mag > 0.0) cost[r][c] = -std::log(mag);
        }
      }
      const Assignment a = lexicographic_min_cost_assignment(cost);
      Permutation sigma = identity_permutation(n);
      for (std::size_t r = 0; r < m; ++r) {
        const std::size_t c = static_cast<std::size_t>(a.row_to_col[r]);
        if (cost[r][c] >= zero_cost) throw Error(ErrorCode::NoConsistentMatching, detail::sample_name(vertex, x));
        sigma[static_cast<std::size_t>(into[r])] = into[c];
      }
      auto it = std::find(out.certificate.sigmas.begin(), out.certificate.sigmas.end(), sigma);
      const auto j = static_cast<std::size_t>(it - out.certificate.sigmas.begin());
      if (it == out.certificate.sigmas.end()) {
        out.certificate.sigmas.push_back(sigma);
        cells.emplace_back(w.at.size());
      }
      const auto& grid = k1.at(vertex).grid();
      cells[j][v].push_back(grid.key(grid.locate(x)));
      out.cover_of[v].push_back(j);
    }
  }
  for (std::size_t j = 0; j < cells.size(); ++j) {
    CoverSet set;
    for (std::size_t v = 0; v < cells[j].size(); ++v) {
      if (cells[j][v].empty()) continue;
      set.parts.emplace_back(static_cast<VertexId>(v), k1.at(static_cast<VertexId>(v)).grid(), cells[j][v]);
    }
    out.certificate.cover.push_back(std::move(set));
  }
  return out;
}

struct PermutationField {
  SampleGrid grid;
  std::vector<Permutation> sigmas;                 // distinct values
  std::vector<std::vector<std::size_t>> value_of;  // per sample, index into sigmas
  bool constant() const { return sigmas.size() == 1; }
};

/// x -> sigma(x) on the samples of a totally disconnected K1. Two cover sets
/// that share a sample must carry the same sigma.
inline PermutationField permutation_field(const ConjugacyCertificate& cert, const SampleGrid& grid1,
                                          const DisconnectednessReport& classification) {
  if (classification.verdict != Verdict::Disjoint) {
    throw Error(ErrorCode::NotTotallyDisconnected, "the first system is not classified Disjoint");
  }
  PermutationField field;
  field.grid = grid1;
  field.value_of.resize(grid1.vertex_count());
  for (std::size_t v = 0; v < grid1.vertex_count(); ++v) {
    const auto vertex = static_cast<VertexId>(v);
    for (const auto& x : grid1.samples(vertex)) {
      std::optional<std::size_t> holder;
      for (std::size_t j = 0; j < cert.cover.size(); ++j) {
        if (!cert.cover[j].contains(vertex, x)) continue;
        if (holder && cert.sigmas[*holder] != cert.sigmas[j]) {
          throw Error(ErrorCode::InconsistentOverlap,
                      "cover sets " + std::to_string(*holder) + " and " + std::to_string(j) + " disagree at " +
                          detail::sample_name(vertex, x));
        }
        if (!holder) holder = j;
      }
      if (!holder) throw Error(ErrorCode::CertificateInvalid, "cover misses " + detail::sample_name(vertex, x));
      const auto& sigma = cert.sigmas[*holder];
      auto it = std::find(field.sigmas.begin(), field.sigmas.end(), sigma);
      if (it == field.sigmas.end()) {
        field.sigmas.push_back(sigma);
        it = field.sigmas.end() - 1;
      }
      field.value_of[v].push_back(static_cast<std::size_t>(it - field.sigmas.begin()));
    }
  }
  return field;
}

// ---------------------------------------------------------------------------
// Deciding isomorphism

enum class IsoStatus { Isomorphic, NotIsomorphic, Unknown };

inline const char* to_string(IsoStatus s) {
  switch (s) {
    case IsoStatus::Isomorphic: return "Isomorphic";
    case IsoStatus::NotIsomorphic: return "NotIsomorphic";
    case IsoStatus::Unknown: return "Unknown";
  }
  return "?";
}

struct IsoDecision {
  IsoStatus status = IsoStatus::Unknown;
  DisconnectednessReport first;
  DisconnectednessReport second;
  std::optional<ConjugacyCertificate> certificate;
  std::optional<VerifyReport> verification;
  std::optional<RefutationReport> refutation;
  std::optional<Point> witness;  // overlap point of the overlapping system
  int witness_system = 0;        // 1 or 2
  std::optional<bool> stable_under_refinement;
  std::vector<SigmaResidual> identity_table;  // both overlapping: f = id, every sigma
  std::string note;
};

struct IsoOptions {
  double tol = 1e-3;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  int max_refinements = 2;
};

/// Same graph required. Both Disjoint: builds the address conjugacy with
/// sigma = id and verifies it. Exactly one Disjoint: refuses with the overlap
/// witness. Otherwise Unknown, with the f = id residual table when both
/// overlap.
inline IsoDecision decide_iso_totally_disconnected(const MWGraph& mw1, const InvariantList& k1, const MWGraph& mw2,
                                                   const InvariantList& k2, const IsoOptions& opt = {}) {
  if (!(mw1.graph() == mw2.graph())) throw Error(ErrorCode::GraphMismatch, "systems have different graphs");
  if (mw1.dim() != mw2.dim()) throw Error(ErrorCode::DimensionMismatch, "systems live in different dimensions");
  IsoDecision out;
  out.first = classify_disconnected(mw1, k1, opt.max_refinements);
  out.second = classify_disconnected(mw2, k2, opt.max_refinements);
  const Verdict a = out.first.verdict;
  const Verdict b = out.second.verdict;

  if (a == Verdict::Disjoint && b == Verdict::Disjoint) {
    ConjugacyCertificate cert{FMap::address(mw1, k1, mw2, k2), {CoverSet{true, {}}},
                              {identity_permutation(mw1.graph().edge_count())}};
    const VMap V(cert, mw1, k1, mw2, k2);
    out.verification = verify_isomorphism(V, opt.trials, opt.tol, opt.seed);
    out.refutation = refute_certificate(cert, mw1, mw2, V.grid1(), opt.tol);
    out.certificate = std::move(cert);
    out.status = out.verification->passed ? IsoStatus::Isomorphic : IsoStatus::Unknown;
    if (!out.verification->passed) out.note = "address conjugacy failed verification at the requested tolerance";
    return out;
  }

  const bool one_each = (a == Verdict::Disjoint && b == Verdict::Overlapping) ||
                        (a == Verdict::Overlapping && b == Verdict::Disjoint);
  if (one_each) {
    out.status = IsoStatus::NotIsomorphic;
    out.witness_system = a == Verdict::Overlapping ? 1 : 2;
    out.witness = a == Verdict::Overlapping ? out.first.witness : out.second.witness;
    const auto finer1 = solve_invariant_list(mw1, k1.resolution / 2.0);
    const auto finer2 = solve_invariant_list(mw2, k2.resolution / 2.0);
    const Verdict fa = classify_disconnected(mw1, finer1, opt.max_refinements).verdict;
    const Verdict fb = classify_disconnected(mw2, finer2, opt.max_refinements).verdict;
    out.stable_under_refinement = fa == a && fb == b;
    out.note = "one system is totally disconnected and the other is not";
    return out;
  }

  if (a == Verdict::Overlapping && b == Verdict::Overlapping) {
    const auto grid1 = SampleGrid::from_covering(mw1, k1);
    out.identity_table =
        refutation_table(FMap::identity(mw1.graph().vertex_count(), mw1.dim()), mw1, mw2, grid1);
    out.note =
        "both systems overlap; only f = id was tested against every sigma, so non-isomorphism over all "
        "homeomorphisms is not decided";
    return out;
  }
  out.note = "classification inconclusive";
  return out;
}

}  // namespace mwkit
