#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace mwkit;
using namespace mwkit::testing;

namespace {

InvariantList solve(const MWGraph& mw, const char* name) { return solve_invariant_list(mw, config_resolution(name)); }

}  // namespace

TEST(Structure, CantorIsDisjoint) {
  const MWGraph mw = load_system("cantor.cfg");
  const auto k = solve(mw, "cantor.cfg");
  const auto r = classify_disconnected(mw, k);
  EXPECT_EQ(r.verdict, Verdict::Disjoint);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_GE(r.pairs[0].gap, 1.0 / 3 - 2.0 * k.sets[0].grid().cell_diameter());
  EXPECT_FALSE(r.witness.has_value());
}

TEST(Structure, TentOverlapsAtOneHalf) {
  const MWGraph mw = load_system("tent.cfg");
  const auto k = solve(mw, "tent.cfg");
  const auto r = classify_disconnected(mw, k);
  EXPECT_EQ(r.verdict, Verdict::Overlapping);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_LE(std::abs((*r.witness)[0] - 0.5), k.sets[0].grid().cell_diameter());
}

TEST(Structure, GasketOverlapsAtTheBottomMidpoint) {
  const MWGraph mw = load_system("sierpinski.cfg");
  const auto k = solve(mw, "sierpinski.cfg");
  const auto r = classify_disconnected(mw, k);
  EXPECT_EQ(r.verdict, Verdict::Overlapping);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_LE(distance(*r.witness, Point{0.5, 0.0}), k.sets[0].grid().cell_diameter());
  for (const auto& p : r.pairs) EXPECT_EQ(p.verdict, Verdict::Overlapping);
}

TEST(Structure, TwoVertexSystemIsDisjoint) {
  const MWGraph mw = load_system("two-vertex.cfg");
  const auto r = classify_disconnected(mw, solve(mw, "two-vertex.cfg"));
  EXPECT_EQ(r.verdict, Verdict::Disjoint);
  EXPECT_EQ(r.pairs.size(), 2u);
}

TEST(Structure, NearlyTouchingPairNeedsRefinement) {
  // Images [0, 0.4] and [0.41, 1]: the gap is below one cell at h = 1/32.
  const MWGraph mw = interval_system({{0.4, 0.0}, {0.59, 0.41}});
  const auto k = solve_invariant_list(mw, 1.0 / 32);
  const auto r = classify_disconnected(mw, k, 3);
  EXPECT_EQ(r.verdict, Verdict::Disjoint);
  EXPECT_LT(r.resolution, k.resolution);
  EXPECT_NEAR(r.pairs[0].gap, 0.01, 0.01);
}

TEST(Structure, CycleFixedPoints) {
  const MWGraph mw = load_system("tent.cfg");
  const auto fixed = cycle_fixed_points(mw, 1);
  ASSERT_EQ(fixed[0].size(), 2u);
  EXPECT_NEAR(fixed[0][0][0], 0.0, 1e-15);
  EXPECT_NEAR(fixed[0][1][0], 2.0 / 3, 1e-15);
  EXPECT_EQ(cycle_fixed_points(mw, 3)[0].size(), 2u + 4u + 8u);
}

TEST(Structure, UnfixedPointKeepsClearance) {
  const MWGraph mw = load_system("cantor.cfg");
  const auto k = solve(mw, "cantor.cfg");
  const auto u = find_unfixed_point(mw, k, 2, k.sets[0].grid().cell_diameter());
  const auto fixed = cycle_fixed_points(mw, 2);
  for (const auto& q : fixed[0]) EXPECT_GE(distance(u.point, q), u.clearance - 1e-15);
  EXPECT_THROW(find_unfixed_point(mw, k, 2, 10.0), Error);
}

TEST(Structure, WitnessesOnExampleSystems) {
  for (const char* name : {"cantor.cfg", "tent.cfg", "sierpinski.cfg", "two-vertex.cfg"}) {
    const MWGraph mw = load_system(name);
    const auto k = solve(mw, name);
    for (std::size_t n0 = 1; n0 <= 3; ++n0) {
      const auto w = aperiodicity_witness(mw, k, [](VertexId, const Point&) { return 1.0; }, n0, 0.1);
      EXPECT_TRUE(w.passed) << name << " n0=" << n0;
      EXPECT_GE(w.sup_xax, 0.9);
      // Independent recheck of the twisted products on every sample.
      const auto& g = mw.graph();
      double worst = 0.0;
      for (std::size_t len = 1; len <= n0; ++len) {
        for (const auto& alpha : paths_of_length(g, len)) {
          const AffineMap m = mw.composite(alpha);
          const VertexId s = g.path_source(alpha);
          for (const auto& t : k.at(g.path_range(alpha)).centers()) {
            worst = std::max(worst, std::abs(w.bump(s, m(t)) * w.bump(g.path_range(alpha), t)));
          }
        }
      }
      EXPECT_EQ(worst, 0.0) << name << " n0=" << n0;
    }
  }
}

TEST(Structure, WitnessRefusesWhenMassSitsOnAFixedPoint) {
  const MWGraph mw = load_system("cantor.cfg");
  const auto k = solve(mw, "cantor.cfg");
  const auto a0 = [](VertexId, const Point& p) { return std::max(0.0, 1.0 - 100.0 * p[0]); };
  try {
    aperiodicity_witness(mw, k, a0, 1, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoQualifyingCenter);
  }
}

TEST(Structure, WitnessValidatesArguments) {
  const MWGraph mw = load_system("cantor.cfg");
  const auto k = solve(mw, "cantor.cfg");
  const auto one = [](VertexId, const Point&) { return 1.0; };
  EXPECT_THROW(aperiodicity_witness(mw, k, one, 0, 0.1), Error);
  EXPECT_THROW(aperiodicity_witness(mw, k, one, 1, 0.0), Error);
  EXPECT_THROW(aperiodicity_witness(mw, k, [](VertexId, const Point&) { return -1.0; }, 1, 0.1), Error);
}
