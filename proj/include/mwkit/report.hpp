#pragma once

// JSON reports (.report). Keys are sorted, so output is byte-stable for equal
// inputs; every report embeds an FNV-1a digest of its inputs.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwkit/attractor.hpp"
#include "mwkit/conjugacy.hpp"
#include "mwkit/structure.hpp"

namespace mwkit {

using Json = nlohmann::json;

inline std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string input_digest(const std::vector<std::string>& parts) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& p : parts) {
    h = fnv1a(p, h);
    h = fnv1a(std::string(1, '\0'), h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json to_json(const Point& p) {
  Json a = Json::array();
  for (int i = 0; i < p.dim; ++i) a.push_back(p[i]);
  return a;
}

inline Json to_json(const Path& p) {
  Json a = Json::array();
  for (EdgeId e : p) a.push_back(e);
  return a;
}

/// JSON has no infinity; unbounded values are written as null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const InvariantList& k) {
  Json j;
  j["resolution"] = k.resolution;
  j["iterations"] = k.iterations;
  j["residual"] = k.residual;
  j["error_bound"] = k.error_bound;
  j["changes"] = k.changes;
  Json sets = Json::array();
  for (const auto& s : k.sets) {
    Json box;
    const Box b = s.bounding_box();
    box["vertex"] = s.vertex();
    box["cells"] = s.size();
    box["bounding_box"] = {{"lo", to_json(Point(b.corner_lo()))}, {"hi", Json::array()}};
    for (int i = 0; i < b.dim; ++i) box["bounding_box"]["hi"].push_back(b.hi[static_cast<std::size_t>(i)]);
    sets.push_back(box);
  }
  j["sets"] = sets;
  return j;
}

inline Json to_json(const DisconnectednessReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["resolution"] = r.resolution;
  j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"vertex", p.vertex},
                     {"e", p.e},
                     {"f", p.f},
                     {"verdict", to_string(p.verdict)},
                     {"gap", number(p.gap)},
                     {"exact_distance", number(p.exact_distance)},
                     {"resolution", p.resolution},
                     {"witness", p.witness ? to_json(*p.witness) : Json(nullptr)}});
  }
  j["pairs"] = pairs;
  return j;
}

inline Json to_json(const WitnessReport& w) {
  return {{"vertex", w.bump.vertex},
          {"center", to_json(w.bump.center)},
          {"radius", w.bump.radius},
          {"delta1", number(w.delta1)},
          {"delta2", number(w.delta2)},
          {"clearance", number(w.clearance)},
          {"a0_at_center", w.a0_at_center},
          {"sup_xax", w.sup_xax},
          {"max_twisted_product", w.max_twisted_product},
          {"twisted_checks", w.twisted_checks},
          {"n0", w.n0},
          {"eps", w.eps},
          {"passed", w.passed}};
}

inline Json to_json(const RefutationReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"cover", row.cover}, {"edge", row.e}, {"sup", number(row.sup)}, {"samples", row.samples}});
  }
  return {{"rows", rows},
          {"max_residual", number(r.max_residual)},
          {"cover_gaps", r.cover_gaps},
          {"partition", r.partition},
          {"tol", r.tol},
          {"passed", r.passed}};
}

inline Json to_json(const VerifyReport& r) {
  return {{"inner_residual", r.inner_residual},
          {"bimodule_residual", r.bimodule_residual},
          {"probe_residual", r.probe_residual},
          {"trials", r.trials},
          {"tol", r.tol},
          {"passed", r.passed}};
}

inline Json to_json(const std::vector<SigmaResidual>& table) {
  Json a = Json::array();
  for (const auto& row : table) {
    a.push_back({{"sigma", to_json(row.sigma)}, {"sup", row.sup}, {"pointwise_min", row.pointwise_min}});
  }
  return a;
}

inline Json to_json(const IsoDecision& d) {
  Json j;
  j["status"] = to_string(d.status);
  j["first"] = to_json(d.first);
  j["second"] = to_json(d.second);
  j["note"] = d.note;
  if (d.verification) j["verification"] = to_json(*d.verification);
  if (d.refutation) j["refutation"] = to_json(*d.refutation);
  if (d.witness) {
    j["witness"] = {{"system", d.witness_system}, {"point", to_json(*d.witness)}};
  }
  if (d.stable_under_refinement) j["stable_under_refinement"] = *d.stable_under_refinement;
  if (!d.identity_table.empty()) j["identity_f_table"] = to_json(d.identity_table);
  return j;
}

inline Json make_report(const std::string& command, const std::string& digest) {
  Json j;
  j["command"] = command;
  j["input_digest"] = digest;
  return j;
}

inline std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mwkit
