#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "support.hpp"

using namespace mwkit;

namespace {

double brute_force_optimum(const std::vector<std::vector<double>>& cost, std::vector<int>* first = nullptr) {
  std::vector<int> p(cost.size());
  std::iota(p.begin(), p.end(), 0);
  double best = INFINITY;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) c += cost[i][static_cast<std::size_t>(p[i])];
    if (c < best - 1e-12) {
      best = c;
      if (first) *first = p;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

}  // namespace

TEST(Matching, AgreesWithBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (auto& row : cost) {
      for (auto& c : row) c = u(rng);
    }
    const Assignment a = min_cost_assignment(cost);
    EXPECT_NEAR(a.cost, brute_force_optimum(cost), 1e-9);
    std::vector<int> cols = a.row_to_col;
    std::sort(cols.begin(), cols.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(cols[i], static_cast<int>(i));
  }
}

TEST(Matching, LexicographicTieBreak) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> d(0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 4;
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (auto& row : cost) {
      for (auto& c : row) c = d(rng);
    }
    // next_permutation visits in lexicographic order, so the first strict
    // improvement kept is the lexicographically smallest optimum.
    std::vector<int> expected;
    const double best = brute_force_optimum(cost, &expected);
    const Assignment a = lexicographic_min_cost_assignment(cost);
    EXPECT_EQ(a.cost, best);
    EXPECT_EQ(a.row_to_col, expected);
  }
}

TEST(Matching, AllEqualCostsGiveIdentity) {
  const std::vector<std::vector<double>> cost(4, std::vector<double>(4, 1.0));
  EXPECT_EQ(lexicographic_min_cost_assignment(cost).row_to_col, (std::vector<int>{0, 1, 2, 3}));
}
