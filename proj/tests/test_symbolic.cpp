#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace mwkit;
using namespace mwkit::testing;

namespace {

// pi of a Cantor address by direct ternary summation: digit 0 -> 0, 1 -> 2.
double ternary_value(const Path& p) {
  double x = 0.0;
  double scale = 1.0 / 3;
  for (EdgeId e : p) {
    x += (e == 0 ? 0.0 : 2.0) * scale;
    scale /= 3;
  }
  return x;
}

}  // namespace

TEST(Symbolic, CantorCodingMap) {
  const MWGraph mw = load_system("cantor.cfg");
  const auto k = solve_invariant_list(mw, std::pow(3.0, -6));
  EXPECT_NEAR(coding_map(mw, k, expand_path_notation("(0)", 40), 1e-9)[0], 0.0, 1e-9);
  EXPECT_NEAR(coding_map(mw, k, expand_path_notation("(1)", 40), 1e-9)[0], 1.0, 1e-9);
  EXPECT_NEAR(coding_map(mw, k, expand_path_notation("0,(1)", 40), 1e-9)[0], 1.0 / 3, 1e-9);
  std::mt19937_64 rng(1);
  std::bernoulli_distribution bit;
  for (int trial = 0; trial < 50; ++trial) {
    Path p;
    for (int i = 0; i < 30; ++i) p.push_back(bit(rng) ? 1 : 0);
    EXPECT_NEAR(coding_map(mw, k, p, 1e-9)[0], ternary_value(p), 1e-12);
  }
}

TEST(Symbolic, ShortPrefixIsRejected) {
  const MWGraph mw = load_system("cantor.cfg");
  const auto k = solve_invariant_list(mw, std::pow(3.0, -6));
  try {
    coding_map(mw, k, Path{0, 1, 0}, 1e-9);
    FAIL();
  } catch (const PrefixTooShort& e) {
    // 3^-d <= 1e-9 needs d >= 19.
    EXPECT_GE(e.required(), 19u);
    EXPECT_LE(e.required(), 20u);
  }
  EXPECT_EQ(coding_depth(mw, k, Path(40, 0), 1e-9), 19u);
}

TEST(Symbolic, IntertwiningOnRandomPrefixes) {
  for (const char* name : {"cantor.cfg", "two-vertex.cfg", "sierpinski-psi.cfg"}) {
    const MWGraph mw = load_system(name);
    const auto k = solve_invariant_list(mw, config_resolution(name));
    const double eps = 1e-9;
    const double bound = 2.0 * (eps + k.sets.front().grid().cell_diameter());
    const auto& g = mw.graph();
    std::mt19937_64 rng(17);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto e = static_cast<EdgeId>(rng() % g.edge_count());
      Path p;
      VertexId at = g.range(e);
      for (int i = 0; i < 40; ++i) {
        const auto& out = g.edges_from(at);
        p.push_back(out[rng() % out.size()]);
        at = g.range(p.back());
      }
      worst = std::max(worst, intertwine_residual(mw, k, e, p, eps));
    }
    EXPECT_LE(worst, bound) << name;
  }
}

TEST(Symbolic, IntertwineChecksChaining) {
  const MWGraph mw = load_system("two-vertex.cfg");
  const auto k = solve_invariant_list(mw, config_resolution("two-vertex.cfg"));
  EXPECT_THROW(intertwine_residual(mw, k, 0, Path(30, 1), 1e-6), Error);  // r(0) = 1, path starts at 0
}

TEST(Symbolic, AddressesOfCantorPoints) {
  const MWGraph mw = load_system("cantor.cfg");
  const auto k = solve_invariant_list(mw, std::pow(3.0, -6));
  const auto found = address_of(mw, k, 0, Point{0.25}, 4, 1e-12);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found.front(), (Path{0, 1, 0, 1}));
  EXPECT_THROW(address_of(mw, k, 0, Point{0.5}, 4, 1e-6), Error);
}

TEST(Symbolic, DoubleAddressOfTentMidpoint) {
  const MWGraph mw = load_system("tent.cfg");
  const auto k = solve_invariant_list(mw, std::ldexp(1.0, -10));
  const auto found = address_of(mw, k, 0, Point{0.5}, 3, 1e-12);
  // 0.5 = phi_0(1) = phi_1(1), and 1 = phi_1(0); every continuation of 0 at
  // the next step is 1-then-anything containing 0.
  ASSERT_GE(found.size(), 2u);
  EXPECT_EQ(found.front().front(), 0);
  EXPECT_EQ(found.back().front(), 1);
}

TEST(Symbolic, DescentFollowsEdgeImages) {
  const MWGraph mw = load_system("cantor.cfg");
  const auto k = solve_invariant_list(mw, std::pow(3.0, -6));
  const Point x = coding_map(mw, k, expand_path_notation("1,0,0,(1)", 40), 1e-12);
  const Descent d = descend(mw, k, 0, x, k.sets.front().grid().cell_diameter(), 30);
  ASSERT_GE(d.path.size(), 4u);
  EXPECT_EQ(Path(d.path.begin(), d.path.begin() + 4), (Path{1, 0, 0, 1}));
}

TEST(Symbolic, PathNotation) {
  EXPECT_EQ(expand_path_notation("0,1,(1)", 5), (Path{0, 1, 1, 1, 1}));
  EXPECT_EQ(expand_path_notation("(0,1)", 5), (Path{0, 1, 0, 1, 0}));
  EXPECT_EQ(expand_path_notation("2,0", 5), (Path{2, 0}));
  EXPECT_THROW(expand_path_notation("0,x", 5), Error);
}
