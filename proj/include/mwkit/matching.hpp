#pragma once

// Minimum-cost perfect assignment on small dense square matrices
// (Hungarian method, O(n^3)), plus a lexicographically smallest optimum.

#include <cmath>
#include <limits>
#include <vector>

#include "mwkit/error.hpp"

namespace mwkit {

struct Assignment {
  std::vector<int> row_to_col;
  double cost = 0.0;
};

/// Hungarian algorithm with potentials; `cost` is row-major n x n.
inline Assignment min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != n) throw Error(ErrorCode::DimensionMismatch, "assignment matrix must be square");
  }
  Assignment out;
  if (n == 0) return out;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<int> match(static_cast<std::size_t>(n + 1), 0);  // column -> row, 1-based
  std::vector<int> way(static_cast<std::size_t>(n + 1), 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (used[uj]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1)][uj - 1] - u[static_cast<std::size_t>(i0)] - v[uj];
        if (cur < minv[uj]) {
          minv[uj] = cur;
          way[uj] = j0;
        }
        if (minv[uj] < delta) {
          delta = minv[uj];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (used[uj]) {
          u[static_cast<std::size_t>(match[uj])] += delta;
          v[uj] -= delta;
        } else {
          minv[uj] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  out.row_to_col.assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) out.row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
  for (int i = 0; i < n; ++i) {
    out.cost += cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(out.row_to_col[static_cast<std::size_t>(i)])];
  }
  return out;
}

/// Among optimal assignments, the one whose row_to_col is lexicographically
/// smallest. Costs within `tie` of the optimum count as optimal.
inline Assignment lexicographic_min_cost_assignment(const std::vector<std::vector<double>>& cost,
                                                    double tie = 1e-9) {
  const std::size_t n = cost.size();
  const Assignment best = min_cost_assignment(cost);
  const double target = best.cost;
  const double slack = tie * std::max(1.0, std::abs(target));
  const double blocked = 1e12;

  std::vector<std::vector<double>> work = cost;
  Assignment out;
  out.row_to_col.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (work[i][j] >= blocked) continue;
      // Force (i, j): block the rest of row i and column j.
      auto trial = work;
      for (std::size_t jj = 0; jj < n; ++jj) {
        if (jj != j) trial[i][jj] = blocked;
      }
      for (std::size_t ii = 0; ii < n; ++ii) {
        if (ii != i) trial[ii][j] = blocked;
      }
      const Assignment a = min_cost_assignment(trial);
      if (a.cost <= target + slack) {
        work = std::move(trial);
        out.row_to_col[i] = static_cast<int>(j);
        break;
      }
    }
  }
  out.cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.cost += cost[i][static_cast<std::size_t>(out.row_to_col[i])];
  return out;
}

}  // namespace mwkit
