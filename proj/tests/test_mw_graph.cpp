#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace mwkit;
using namespace mwkit::testing;

TEST(MWGraph, SingularBoundsOfSimilarity) {
  const double s = 0.5;
  const double t = 0.3;
  const AffineMap rot({{s * std::cos(t), -s * std::sin(t)}, {s * std::sin(t), s * std::cos(t)}}, {0.1, 0.2});
  const auto [lo, hi] = rot.singular_bounds();
  EXPECT_NEAR(lo, 0.5, 1e-14);
  EXPECT_NEAR(hi, 0.5, 1e-14);
  const AffineMap diag({{0.2, 0.0}, {0.0, 0.7}}, {0.0, 0.0});
  EXPECT_NEAR(diag.singular_bounds().first, 0.2, 1e-14);
  EXPECT_NEAR(diag.singular_bounds().second, 0.7, 1e-14);
}

TEST(MWGraph, CompositionAndInverse) {
  const AffineMap f = AffineMap::line(1.0 / 3, 2.0 / 3);
  const AffineMap g = AffineMap::line(-0.5, 1.0);
  const Point x{0.2};
  EXPECT_DOUBLE_EQ(f.then_after(g)(x)[0], f(g(x))[0]);
  EXPECT_NEAR(f.inverse()(f(x))[0], 0.2, 1e-15);
  EXPECT_NEAR(f.fixed_point().value()[0], 1.0, 1e-15);
}

TEST(MWGraph, ImageBoxIsExactForAxisMaps) {
  const AffineMap m({{-0.5, 0.0}, {0.0, 0.25}}, {1.0, 0.0});
  const Box b = m.image_box(Box::from_bounds({0.0, 0.0}, {1.0, 1.0}));
  EXPECT_DOUBLE_EQ(b.lo[0], 0.5);
  EXPECT_DOUBLE_EQ(b.hi[0], 1.0);
  EXPECT_DOUBLE_EQ(b.hi[1], 0.25);
}

TEST(MWGraph, LoadsExampleConfigs) {
  const MWGraph cantor = load_system("cantor.cfg");
  EXPECT_EQ(cantor.graph().edge_count(), 2u);
  EXPECT_NEAR(global_ratio(cantor).upper, 1.0 / 3, 1e-15);
  const MWGraph gasket = load_system("sierpinski.cfg");
  EXPECT_EQ(gasket.dim(), 2);
  EXPECT_NEAR(global_ratio(gasket).lower, 0.5, 1e-15);
  const MWGraph two = load_system("two-vertex.cfg");
  EXPECT_EQ(two.graph().vertex_count(), 2u);
}

TEST(MWGraph, RejectsNonContraction) {
  try {
    load_system("not-contracting.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotContraction);
    EXPECT_TRUE(e.has(ErrorCode::NotContraction, "1"));
  }
}

TEST(MWGraph, RejectsSingularAndEscapingMaps) {
  RawSystem raw;
  raw.graph = {{0}, {{0, 0, 0}, {1, 0, 0}}};
  raw.ambient.emplace(0, Box::from_bounds({0.0}, {1.0}));
  raw.maps = {{0, {{0.0}}, {0.0}}, {1, {{0.5}}, {0.8}}};
  try {
    validate_mw(raw);
    FAIL();
  } catch (const Error& e) {
    bool singular = false, escapes = false;
    for (const auto& i : e.issues()) {
      singular |= i.code == ErrorCode::NotInjective;
      escapes |= i.code == ErrorCode::RangeEscapesAmbient;
    }
    EXPECT_TRUE(singular);
    EXPECT_TRUE(escapes);
  }
}

TEST(MWGraph, FixedPointsAndAnchors) {
  const MWGraph cantor = load_system("cantor.cfg");
  EXPECT_NEAR(fixed_point(cantor, {1})[0], 1.0, 1e-15);
  EXPECT_NEAR(fixed_point(cantor, {0, 1})[0], 0.25, 1e-15);  // 0.0202..._3
  EXPECT_THROW(fixed_point(cantor, {}), Error);
  const MWGraph two = load_system("two-vertex.cfg");
  EXPECT_THROW(fixed_point(two, {0}), Error);
  // First-choice walk from 1 is the cycle 2,0 with composite x/6.
  EXPECT_NEAR(anchor_point(two, 1)[0], 0.0, 1e-15);
  EXPECT_NEAR(anchor_point(two, 0)[0], 0.0, 1e-15);
}

TEST(MWGraph, ApplyEdgeChecksTags) {
  const MWGraph two = load_system("two-vertex.cfg");
  const auto s = TaggedBoxSet::full(0, two.ambient(0), 0.125);
  EXPECT_THROW(apply_edge(two, 0, s), Error);  // edge 0 needs a set at vertex 1
  const auto image = apply_edge(two, 2, s);
  EXPECT_EQ(image.vertex(), 1);
  EXPECT_EQ(image.size(), 4u);  // [0, 1/2] at h = 1/8
}
