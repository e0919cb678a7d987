// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "support.hpp"

using namespace mwkit;
using namespace mwkit::testing;

namespace {

int failures = 0;

void run(int number, const std::function<std::string(bool&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    detail = body(ok);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s criterion %d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", number, detail.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Exact rational oracle for the middle-thirds set: left endpoints of the
// level-n intervals in units of 3^-n, from addresses in {0,2}^n.
std::set<std::int64_t> cantor_oracle(int n) {
  std::set<std::int64_t> out{0};
  for (int level = 0; level < n; ++level) {
    std::set<std::int64_t> next;
    for (auto a : out) {
      next.insert(3 * a);
      next.insert(3 * a + 2);
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

int main() {
  run(1, [](bool& ok) {
    const MWGraph mw = load_system("cantor.cfg");
    const auto k = solve_invariant_list(mw, std::pow(3.0, -6));
    const auto got = cell_indices_1d(k.at(0));
    ok = got == cantor_oracle(6) && got.size() == 64;
    return "cells " + std::to_string(got.size()) + ", oracle " + std::to_string(cantor_oracle(6).size());
  });

  run(2, [](bool& ok) {
    const MWGraph mw = load_system("tent.cfg");
    const double h = std::ldexp(1.0, -10);
    const auto k = solve_invariant_list(mw, h);
    const double d = hausdorff_distance(k.at(0), TaggedBoxSet::full(0, mw.ambient(0), h));
    ok = d <= h && k.iterations <= 12;
    return fmt("d_H %.3g, iterations %.0f, error bound %.3g", d, k.iterations, k.error_bound);
  });

  run(3, [](bool& ok) {
    const MWGraph mw = load_system("sierpinski.cfg");
    ok = true;
    std::string counts;
    for (int level = 1; level <= 8; ++level) {
      const auto k = solve_invariant_list(mw, std::ldexp(1.0, -level));
      const auto n = static_cast<std::int64_t>(k.at(0).size());
      ok = ok && n == ipow(3, level) && cell_indices_2d(k.at(0)) == gasket_triangles(level);
      counts += (level > 1 ? " " : "") + std::to_string(n);
    }
    return "counts " + counts;
  });

  run(4, [](bool& ok) {
    const MWGraph c = load_system("cantor.cfg");
    const auto kc = solve_invariant_list(c, config_resolution("cantor.cfg"));
    const auto rc = classify_disconnected(c, kc);
    const double cell_c = kc.sets[0].grid().cell_diameter();
    const bool cantor_ok = rc.verdict == Verdict::Disjoint && rc.pairs.at(0).gap >= 1.0 / 3 - 2 * cell_c;

    const MWGraph t = load_system("tent.cfg");
    const auto kt = solve_invariant_list(t, config_resolution("tent.cfg"));
    const auto rt = classify_disconnected(t, kt);
    const bool tent_ok = rt.verdict == Verdict::Overlapping && rt.witness &&
                         std::abs((*rt.witness)[0] - 0.5) <= kt.sets[0].grid().cell_diameter();

    const MWGraph s = load_system("sierpinski.cfg");
    const auto ks = solve_invariant_list(s, config_resolution("sierpinski.cfg"));
    const auto rs = classify_disconnected(s, ks);
    const bool gasket_ok = rs.verdict == Verdict::Overlapping && rs.witness &&
                           distance(*rs.witness, Point{0.5, 0.0}) <= ks.sets[0].grid().cell_diameter();
    ok = cantor_ok && tent_ok && gasket_ok;
    return std::string("cantor ") + to_string(rc.verdict) + fmt(" gap %.4f", rc.pairs.at(0).gap) + ", tent " +
           to_string(rt.verdict) + (rt.witness ? fmt(" at %.4f", (*rt.witness)[0]) : "") + ", sierpinski " +
           to_string(rs.verdict) + (rs.witness ? fmt(" at (%.4f, %.4f)", (*rs.witness)[0], (*rs.witness)[1]) : "");
  });

  run(5, [](bool& ok) {
    const MWGraph mw = load_system("cantor.cfg");
    const auto k = solve_invariant_list(mw, std::pow(3.0, -6));
    const double eps = 1e-9;
    const double a = std::abs(coding_map(mw, k, expand_path_notation("(0)", 40), eps)[0] - 0.0);
    const double b = std::abs(coding_map(mw, k, expand_path_notation("(1)", 40), eps)[0] - 1.0);
    const double c = std::abs(coding_map(mw, k, expand_path_notation("0,(1)", 40), eps)[0] - 1.0 / 3);
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto e = static_cast<EdgeId>(rng() % 2);
      Path p;
      for (int i = 0; i < 40; ++i) p.push_back(static_cast<EdgeId>(rng() % 2));
      worst = std::max(worst, intertwine_residual(mw, k, e, p, eps));
    }
    const double bound = 2.0 * (eps + k.sets[0].grid().cell_diameter());
    ok = a <= 1e-9 && b <= 1e-9 && c <= 1e-9 && worst <= bound;
    return fmt("endpoint errors %.2g %.2g %.2g", a, b, c) + fmt(", intertwining %.3g <= %.3g", worst, bound);
  });

  run(6, [](bool& ok) {
    const MWGraph mw = load_system("cantor.cfg");
    const auto k = solve_invariant_list(mw, config_resolution("cantor.cfg"));
    const ConjugacyCertificate cert{FMap::affine({AffineMap::line(-1.0, 1.0)}), {CoverSet{true, {}}}, {{1, 0}}};
    const VMap V(cert, mw, k, mw, k);
    const auto refuted = refute_certificate(cert, mw, mw, V.grid1(), 1e-12);
    const auto verified = verify_isomorphism(V, 100, 1e-9, 6);
    const auto ex = extract_conjugacy(w_matrix(V), cert.f, k);
    std::size_t hits = 0, total = 0;
    for (std::size_t v = 0; v < ex.cover_of.size(); ++v) {
      for (auto j : ex.cover_of[v]) {
        ++total;
        hits += ex.certificate.sigmas[j] == Permutation{1, 0} ? 1 : 0;
      }
    }
    ok = refuted.passed && refuted.max_residual <= 1e-12 && verified.passed && hits == total && total > 0;
    return fmt("refutation %.2g, verify residuals %.2g / %.2g", refuted.max_residual, verified.inner_residual,
               verified.bimodule_residual) +
           ", sigma recovered on " + std::to_string(hits) + "/" + std::to_string(total) + " samples";
  });

  run(7, [](bool& ok) {
    const MWGraph a = load_system("cantor.cfg");
    const MWGraph b = load_system("cantor14.cfg");
    const MWGraph t = load_system("tent.cfg");
    const auto ka = solve_invariant_list(a, config_resolution("cantor.cfg"));
    const auto kb = solve_invariant_list(b, config_resolution("cantor14.cfg"));
    const auto kt = solve_invariant_list(t, config_resolution("tent.cfg"));
    const auto iso = decide_iso_totally_disconnected(a, ka, b, kb);
    const auto non = decide_iso_totally_disconnected(a, ka, t, kt);
    ok = iso.status == IsoStatus::Isomorphic && iso.verification && iso.verification->passed &&
         non.status == IsoStatus::NotIsomorphic && non.stable_under_refinement.value_or(false);
    return std::string("cantor vs cantor14 ") + to_string(iso.status) +
           (iso.verification ? fmt(" (bimodule %.2g)", iso.verification->bimodule_residual) : "") +
           ", cantor vs tent " + to_string(non.status) +
           (non.stable_under_refinement.value_or(false) ? " stable" : " unstable");
  });

  run(8, [](bool& ok) {
    const MWGraph a = load_system("sierpinski-phi.cfg");
    const MWGraph b = load_system("sierpinski-psi.cfg");
    const auto ka = solve_invariant_list(a, std::ldexp(1.0, -6));
    const auto kb = solve_invariant_list(b, std::ldexp(1.0, -6));
    const auto d = decide_iso_totally_disconnected(a, ka, b, kb);
    // Independent oracle: evaluate all six assignments directly on the samples.
    const auto grid = SampleGrid::from_covering(a, ka);
    Permutation sigma{0, 1, 2};
    double min_sup = INFINITY;
    double id_pointwise = INFINITY;
    std::size_t rows = 0;
    do {
      double sup = 0.0;
      double pointwise = INFINITY;
      for (const auto& x : grid.samples(0)) {
        double here = 0.0;
        for (EdgeId e = 0; e < 3; ++e) here = std::max(here, distance(b.map(sigma[e])(x), a.map(e)(x)));
        sup = std::max(sup, here);
        pointwise = std::min(pointwise, here);
      }
      if (sigma == Permutation{0, 1, 2}) id_pointwise = pointwise;
      min_sup = std::min(min_sup, sup);
      ++rows;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    double table_min = INFINITY;
    for (const auto& row : d.identity_table) table_min = std::min(table_min, row.sup);
    const bool states_undecided = d.note.find("not decided") != std::string::npos;
    ok = d.status == IsoStatus::Unknown && d.identity_table.size() == 6 && rows == 6 && min_sup >= 0.05 &&
         std::abs(table_min - min_sup) <= 1e-12 && states_undecided;
    std::printf("INFO criterion 8: pointwise residual of sigma = id drops to %.4f near x = (1/2, *), where psi1 "
                "and psi3 agree with phi1 and phi3; the check uses the sup over samples per permutation\n",
                id_pointwise);
    return fmt("min over sigma of sup residual %.4f (table %.4f)", min_sup, table_min) + ", verdict " +
           to_string(d.status) + (states_undecided ? ", report states undecided" : "");
  });

  run(9, [](bool& ok) {
    ok = true;
    double worst_product = 0.0;
    double min_sup = INFINITY;
    for (const char* name : {"cantor.cfg", "tent.cfg", "sierpinski.cfg"}) {
      const MWGraph mw = load_system(name);
      const auto k = solve_invariant_list(mw, config_resolution(name));
      const auto& g = mw.graph();
      for (std::size_t n0 = 1; n0 <= 3; ++n0) {
        const auto w = aperiodicity_witness(mw, k, [](VertexId, const Point&) { return 1.0; }, n0, 0.1);
        double worst = 0.0;
        for (std::size_t len = 1; len <= n0; ++len) {
          for (const auto& alpha : paths_of_length(g, len)) {
            const AffineMap m = mw.composite(alpha);
            const VertexId s = g.path_source(alpha);
            const VertexId r = g.path_range(alpha);
            for (const auto& t : k.at(r).centers()) worst = std::max(worst, std::abs(w.bump(s, m(t)) * w.bump(r, t)));
          }
        }
        ok = ok && w.passed && w.sup_xax >= 0.9 && worst == 0.0;
        worst_product = std::max(worst_product, worst);
        min_sup = std::min(min_sup, w.sup_xax);
      }
    }
    return fmt("min sup x a0 x %.3f, max twisted product %.1g over 9 runs", min_sup, worst_product);
  });

  run(10, [](bool& ok) {
    const MWGraph mw = load_system("cantor.cfg");
    const auto k = solve_invariant_list(mw, config_resolution("cantor.cfg"));
    const auto grid = SampleGrid::from_covering(mw, k);
    std::mt19937_64 rng(10);
    bool positive = true;
    for (int t = 0; t < 20; ++t) {
      const auto xi = CorrElement::random(grid, 1 + t % 3, rng);
      const auto ip = inner_product(xi, xi);
      for (std::size_t i = 0; i < grid.sample_count(0); ++i) {
        positive = positive && ip.at(0, i).real() >= 0.0 && ip.at(0, i).imag() == 0.0;
      }
    }
    double basis = 0.0;
    for (EdgeId e = 0; e < 2; ++e) {
      for (EdgeId f = 0; f < 2; ++f) {
        const auto ip = inner_product(CorrElement::basis(grid, {e}), CorrElement::basis(grid, {f}));
        for (std::size_t i = 0; i < grid.sample_count(0); ++i) {
          basis = std::max(basis, std::abs(ip.at(0, i) - Complex(e == f ? 1.0 : 0.0, 0.0)));
        }
      }
    }
    std::uniform_int_distribution<int> small(-4, 4);
    const auto integer = [&](const Path&, const Point&) { return Complex(small(rng), small(rng)); };
    double linear = 0.0, adjoint = 0.0, balanced = 0.0;
    for (int t = 0; t < 10; ++t) {
      const auto xi = CorrElement::from_function(grid, 2, integer);
      const auto eta = CorrElement::from_function(grid, 2, integer);
      const auto a = AlgebraElement::table(grid, [&](VertexId, const Point&) { return Complex(small(rng), small(rng)); });
      linear = std::max(linear, sup_distance(inner_product(xi, right_action(eta, a)), inner_product(xi, eta) * a));

      const auto x1 = CorrElement::random(grid, 1, rng);
      const auto y1 = CorrElement::random(grid, 1, rng);
      const auto s = AlgebraElement::random_smooth(grid, rng);
      adjoint = std::max(adjoint, sup_distance(inner_product(left_action(s, x1), y1),
                                               inner_product(x1, left_action(s.adjoint(), y1))));
      const auto lc = AlgebraElement::from_function(
          grid, [](VertexId, const Point& p) { return p[0] < 0.5 ? Complex(2.0, 1.0) : Complex(-1.0, 3.0); });
      balanced = std::max(balanced, sup_distance(tensor(right_action(x1, lc), y1), tensor(x1, left_action(lc, y1))));
    }
    const ConjugacyCertificate cert{FMap::affine({AffineMap::line(-1.0, 1.0)}), {CoverSet{true, {}}}, {{1, 0}}};
    const VMap V(cert, mw, k, mw, k);
    const double defect = isometry_defect(w_matrix(V));
    ok = positive && basis == 0.0 && linear == 0.0 && adjoint <= 1e-9 && balanced <= 1e-9 && defect <= 1e-9;
    return std::string(positive ? "positive" : "NOT positive") + fmt(", basis %.1g, right-linearity %.1g", basis, linear) +
           fmt(", adjoint %.2g, balance %.2g", adjoint, balanced) + fmt(", w isometry %.2g", defect);
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
