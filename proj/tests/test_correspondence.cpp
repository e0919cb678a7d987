#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace mwkit;
using namespace mwkit::testing;

namespace {

// The sample grid points at mw, so fixtures are built in place.
struct Fixture {
  explicit Fixture(const char* name)
      : mw(load_system(name)),
        k(solve_invariant_list(mw, config_resolution(name))),
        grid(SampleGrid::from_covering(mw, k)) {}
  Fixture(const Fixture&) = delete;

  MWGraph mw;
  InvariantList k;
  SampleGrid grid;
};

// Small Gaussian integers keep every product and sum exact in floating point.
CorrElement integer_element(const SampleGrid& grid, std::size_t order, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-4, 4);
  return CorrElement::from_function(grid, order, [&](const Path&, const Point&) { return Complex(d(rng), d(rng)); });
}

AlgebraElement integer_function(const SampleGrid& grid, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-4, 4);
  return AlgebraElement::table(grid, [&](VertexId, const Point&) { return Complex(d(rng), d(rng)); });
}

}  // namespace

TEST(Correspondence, InnerProductIsPositive) {
  const Fixture f("cantor.cfg");
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto xi = CorrElement::random(f.grid, 1 + t % 3, rng);
    const auto ip = inner_product(xi, xi);
    for (std::size_t i = 0; i < f.grid.sample_count(0); ++i) {
      EXPECT_GE(ip.at(0, i).real(), 0.0);
      EXPECT_EQ(ip.at(0, i).imag(), 0.0);
    }
  }
}

TEST(Correspondence, BasisElementsAreOrthonormal) {
  const Fixture f("two-vertex.cfg");
  const auto& grid = f.grid;
  const auto& g = f.mw.graph();
  for (std::size_t a = 0; a < g.edge_count(); ++a) {
    for (std::size_t b = 0; b < g.edge_count(); ++b) {
      const auto ip = inner_product(CorrElement::basis(grid, {static_cast<EdgeId>(a)}),
                                    CorrElement::basis(grid, {static_cast<EdgeId>(b)}));
      for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        const bool on = a == b && g.range(static_cast<EdgeId>(a)) == static_cast<VertexId>(v);
        for (std::size_t i = 0; i < grid.sample_count(static_cast<VertexId>(v)); ++i) {
          EXPECT_EQ(ip.at(static_cast<VertexId>(v), i), Complex(on ? 1.0 : 0.0, 0.0));
        }
      }
    }
  }
}

TEST(Correspondence, RightLinearityIsExact) {
  const Fixture f("cantor.cfg");
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto xi = integer_element(f.grid, 2, rng);
    const auto eta = integer_element(f.grid, 2, rng);
    const auto a = integer_function(f.grid, rng);
    EXPECT_EQ(sup_distance(inner_product(xi, right_action(eta, a)), inner_product(xi, eta) * a), 0.0);
  }
}

TEST(Correspondence, LeftActionIsAdjointable) {
  const Fixture f("cantor.cfg");
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto xi = CorrElement::random(f.grid, 1, rng);
    const auto eta = CorrElement::random(f.grid, 1, rng);
    const auto a = AlgebraElement::random_smooth(f.grid, rng);
    const auto lhs = inner_product(left_action(a, xi), eta);
    const auto rhs = inner_product(xi, left_action(a.adjoint(), eta));
    EXPECT_LE(sup_distance(lhs, rhs), 1e-9);
  }
}

TEST(Correspondence, LeftActionMatchesCompositeMaps) {
  const Fixture f("cantor.cfg");
  const auto coordinate =
      AlgebraElement::from_function(f.grid, [](VertexId, const Point& p) { return Complex(p[0], 0.0); });
  const auto xi = CorrElement::basis(f.grid, {1, 0});
  const auto out = left_action(coordinate, xi);
  const std::size_t k = out.path_index({1, 0});
  const auto& pts = f.grid.samples(0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    // phi_1(phi_0(x)) = x/9 + 2/3
    EXPECT_NEAR(out.at(k, i).real(), pts[i][0] / 9 + 2.0 / 3, 1e-15);
  }
}

TEST(Correspondence, TensorIsBalanced) {
  const Fixture f("cantor.cfg");
  std::mt19937_64 rng(5);
  // Locally constant on the two first-level pieces, hence continuous on K.
  const auto a = AlgebraElement::from_function(
      f.grid, [](VertexId, const Point& p) { return p[0] < 0.5 ? Complex(2.0, 1.0) : Complex(-1.0, 3.0); });
  for (int t = 0; t < 10; ++t) {
    const auto xi = CorrElement::random(f.grid, 1, rng);
    const auto eta = CorrElement::random(f.grid, 2, rng);
    const auto lhs = tensor(right_action(xi, a), eta);
    const auto rhs = tensor(xi, left_action(a, eta));
    EXPECT_LE(sup_distance(lhs, rhs), 1e-9);
  }
}

TEST(Correspondence, TensorOfBasisElements) {
  const Fixture f("cantor.cfg");
  const auto t = tensor(CorrElement::basis(f.grid, {0}), CorrElement::basis(f.grid, {1, 1}));
  EXPECT_EQ(t.order(), 3u);
  EXPECT_EQ(sup_distance(t, CorrElement::basis(f.grid, {0, 1, 1})), 0.0);
}

TEST(Correspondence, RejectsMixedGridsAndOrders) {
  const Fixture f("cantor.cfg");
  const auto other = SampleGrid::from_covering(f.mw, f.k);
  EXPECT_THROW(inner_product(CorrElement::basis(f.grid, {0}), CorrElement::basis(other, {0})), Error);
  EXPECT_THROW(inner_product(CorrElement::basis(f.grid, {0}), CorrElement::basis(f.grid, {0, 0})), Error);
  EXPECT_THROW(CorrElement::zero(f.grid, 0), Error);
  EXPECT_THROW(CorrElement::basis(f.grid, {0}).path_index({0, 1}), Error);
}
