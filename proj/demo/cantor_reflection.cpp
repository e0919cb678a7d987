// Builds the middle-thirds Cantor system in code, checks that it is totally
// disconnected, and verifies the reflection x -> 1 - x as a conjugacy that
// swaps the two maps.

#include <cstdio>

#include "mwkit.hpp"

int main() {
  using namespace mwkit;

  RawSystem raw;
  raw.graph.vertices = {0};
  raw.graph.edges = {{0, 0, 0}, {1, 0, 0}};
  raw.ambient.emplace(0, Box::from_bounds({0.0}, {1.0}));
  raw.maps = {{0, {{1.0 / 3}}, {0.0}}, {1, {{1.0 / 3}}, {2.0 / 3}}};
  const MWGraph mw = validate_mw(raw);

  const auto k = solve_invariant_list(mw, 1.0 / 729);
  std::printf("%zu cells after %d iterations, error bound %g\n", k.at(0).size(), k.iterations, k.error_bound);

  const auto verdict = classify_disconnected(mw, k);
  std::printf("classification: %s\n", to_string(verdict.verdict));

  const ConjugacyCertificate cert{FMap::affine({AffineMap::line(-1.0, 1.0)}), {CoverSet{true, {}}}, {{1, 0}}};
  const VMap V(cert, mw, k, mw, k);
  const auto report = verify_isomorphism(V, 100, 1e-9, 1);
  std::printf("reflection: %s (bimodule residual %g)\n", report.passed ? "verified" : "rejected",
              report.bimodule_residual);
  std::printf("%s", format_certificate(describe_certificate(cert)).c_str());
  return report.passed ? 0 : 1;
}
