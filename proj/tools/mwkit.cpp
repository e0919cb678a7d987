// mwkit command line front end. Reports go to stdout (or --report) as JSON.
//
// Exit codes: 0 success/pass, 1 refusal or failed verdict, 2 input error,
// 3 resource exhaustion.

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mwkit.hpp"

namespace {

using namespace mwkit;

constexpr int kOk = 0;
constexpr int kRefused = 1;
constexpr int kInputError = 2;
constexpr int kExhausted = 3;

struct Common {
  std::optional<double> resolution;
  std::string report_path;
  bool timing = false;
};

struct Loaded {
  SystemConfig cfg;
  MWGraph mw;
};

Loaded load(const std::string& path) {
  Loaded l{load_config(path), {}};
  l.mw = build_system(l.cfg);
  return l;
}

double resolution_for(const Loaded& l, const Common& c) {
  if (c.resolution) return *c.resolution;
  if (auto r = l.cfg.number("resolution")) return *r;
  return 1.0 / 256.0;
}

int max_iterations_for(const Loaded& l) {
  if (auto r = l.cfg.number("max_iterations")) return static_cast<int>(*r);
  return 200;
}

void emit(Json report, const Common& c, std::chrono::steady_clock::time_point start) {
  if (c.timing) {
    report["timing_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  const std::string text = dump_report(report);
  if (c.report_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(c.report_path, text);
  }
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MaxIterationsExceeded: return kExhausted;
    case ErrorCode::PointNotOnAttractor:
    case ErrorCode::NoQualifyingCenter:
    case ErrorCode::ResolutionTooCoarse:
    case ErrorCode::NotTotallyDisconnected:
    case ErrorCode::CertificateInvalid:
    case ErrorCode::InconsistentOverlap:
    case ErrorCode::SingularAtSample:
    case ErrorCode::NoConsistentMatching: return kRefused;
    default: return kInputError;
  }
}

Json error_json(const Error& e) {
  Json issues = Json::array();
  for (const auto& i : e.issues()) {
    issues.push_back({{"code", to_string(i.code)}, {"subject", i.subject}, {"detail", i.detail}});
  }
  return {{"code", to_string(e.code())}, {"message", e.what()}, {"issues", issues}};
}

Point parse_point(const std::string& text) {
  std::vector<double> xs;
  for (const auto& tok : detail::split_ws(detail::split_on(text, ',').size() > 1 ? [&] {
         std::string t = text;
         for (auto& ch : t) if (ch == ',') ch = ' ';
         return t;
       }() : text)) {
    xs.push_back(parse_number(tok));
  }
  if (xs.empty() || xs.size() > static_cast<std::size_t>(kMaxDim)) throw Error(ErrorCode::ParseError, "bad point '" + text + "'");
  Point p(static_cast<int>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) p[static_cast<int>(i)] = xs[i];
  return p;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& path, const Common& c) {
  const auto start = std::chrono::steady_clock::now();
  const SystemConfig cfg = load_config(path);
  Json report = make_report("validate", input_digest({cfg.text}));
  try {
    const MWGraph mw = build_system(cfg);
    const RatioBounds r = global_ratio(mw);
    report["valid"] = true;
    report["vertices"] = mw.graph().vertex_count();
    report["edges"] = mw.graph().edge_count();
    report["dimension"] = mw.dim();
    report["c1"] = r.lower;
    report["c"] = r.upper;
    Json edges = Json::array();
    for (std::size_t e = 0; e < mw.graph().edge_count(); ++e) {
      const auto& ac = mw.edge(static_cast<EdgeId>(e));
      edges.push_back({{"edge", e}, {"c_lo", ac.c_lo}, {"c_hi", ac.c_hi}});
    }
    report["edge_ratios"] = edges;
    emit(report, c, start);
    return kOk;
  } catch (const Error& e) {
    report["valid"] = false;
    report["error"] = error_json(e);
    emit(report, c, start);
    return kInputError;
  }
}

struct AttractorOptions {
  std::string out;
  std::string csv;
  std::size_t points = 0;
  std::size_t burn_in = 40;
  std::uint64_t seed = 1;
};

int cmd_attractor(const std::string& path, const Common& c, const AttractorOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded l = load(path);
  const double h = resolution_for(l, c);
  Json report = make_report("attractor", input_digest({l.cfg.text, std::to_string(h), std::to_string(o.seed)}));
  InvariantList k;
  int code = kOk;
  try {
    k = solve_invariant_list(l.mw, h, max_iterations_for(l));
    report["converged"] = true;
  } catch (const MaxIterationsExceeded& e) {
    k = e.partial();
    report["converged"] = false;
    report["partial"] = true;
    code = kExhausted;
  }
  report["invariant_list"] = to_json(k);
  if (!o.out.empty()) {
    write_text_file(o.out, format_boxes(k.sets));
    report["boxes_file"] = o.out;
  }
  if (o.points > 0) {
    const auto clouds = chaos_game(l.mw, o.points, o.burn_in, o.seed);
    double worst = 0.0;
    for (const auto& cloud : clouds) {
      for (const auto& p : cloud.points) worst = std::max(worst, k.at(cloud.vertex).distance_to(p));
    }
    report["chaos_game"] = {{"points_per_vertex", o.points},
                            {"burn_in", o.burn_in},
                            {"seed", o.seed},
                            {"max_distance_to_covering", worst}};
    if (!o.csv.empty()) {
      write_text_file(o.csv, format_point_csv(clouds));
      report["chaos_game"]["csv_file"] = o.csv;
    }
  }
  emit(report, c, start);
  return code;
}

struct RenderOptions {
  std::string out = "mwkit.ppm";
  int width = 256;
  int height = 256;
  VertexId vertex = 0;
  std::size_t points = 0;
  std::uint64_t seed = 1;
};

int cmd_render(const std::string& path, const Common& c, const RenderOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded l = load(path);
  const double h = resolution_for(l, c);
  if (o.vertex < 0 || static_cast<std::size_t>(o.vertex) >= l.mw.graph().vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "no vertex " + std::to_string(o.vertex));
  }
  Json report = make_report("render", input_digest({l.cfg.text, std::to_string(h), std::to_string(o.width),
                                                    std::to_string(o.height), std::to_string(o.points),
                                                    std::to_string(o.seed)}));
  const Box frame = l.mw.ambient(o.vertex);
  Image img;
  if (o.points > 0) {
    const auto clouds = chaos_game(l.mw, o.points, 40, o.seed);
    img = render_points(clouds[static_cast<std::size_t>(o.vertex)].points, frame, o.width, o.height);
    report["source"] = "chaos_game";
  } else {
    const auto k = solve_invariant_list(l.mw, h, max_iterations_for(l));
    img = render_covering(k.at(o.vertex), frame, o.width, o.height);
    report["source"] = "covering";
    report["resolution"] = h;
  }
  write_text_file(o.out, encode_ppm(img));
  report["image"] = {{"file", o.out},
                     {"width", o.width},
                     {"height", o.height},
                     {"set_pixels", img.set_pixels()},
                     {"fill_ratio", static_cast<double>(img.set_pixels()) / (static_cast<double>(o.width) * o.height)}};
  emit(report, c, start);
  return kOk;
}

int cmd_classify(const std::string& path, const Common& c, int refinements) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded l = load(path);
  const double h = resolution_for(l, c);
  Json report = make_report("classify", input_digest({l.cfg.text, std::to_string(h), std::to_string(refinements)}));
  const auto k = solve_invariant_list(l.mw, h, max_iterations_for(l));
  const auto r = classify_disconnected(l.mw, k, refinements);
  report["classification"] = to_json(r);
  emit(report, c, start);
  return r.verdict == Verdict::Unknown ? kRefused : kOk;
}

struct CodeOptions {
  std::string path;
  std::string point;
  VertexId vertex = 0;
  std::size_t depth = 40;
  double eps = 1e-9;
  std::optional<double> slack;
};

int cmd_code(const std::string& cfg_path, const Common& c, const CodeOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded l = load(cfg_path);
  const double h = resolution_for(l, c);
  Json report = make_report("code", input_digest({l.cfg.text, std::to_string(h), o.path, o.point,
                                                  std::to_string(o.depth), std::to_string(o.eps)}));
  const auto k = solve_invariant_list(l.mw, h, max_iterations_for(l));
  if (o.path.empty() == o.point.empty()) throw Error(ErrorCode::InvalidArgument, "give exactly one of --path or --point");
  if (!o.path.empty()) {
    const Path prefix = expand_path_notation(o.path, o.depth);
    const Point x = coding_map(l.mw, k, prefix, o.eps);
    report["prefix"] = to_json(prefix);
    report["point"] = to_json(x);
    report["vertex"] = l.mw.graph().path_source(prefix);
    report["cylinder_diameter_bound"] = l.mw.ratio_product(prefix) * max_covering_diameter(k);
  } else {
    const Point x = parse_point(o.point);
    const double slack = o.slack.value_or(k.sets.front().grid().cell_diameter());
    report["point"] = to_json(x);
    report["vertex"] = o.vertex;
    report["slack"] = slack;
    try {
      Json addresses = Json::array();
      for (const auto& p : address_of(l.mw, k, o.vertex, x, o.depth, slack)) addresses.push_back(to_json(p));
      report["addresses"] = addresses;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PointNotOnAttractor) throw;
      report["error"] = error_json(e);
      emit(report, c, start);
      return kRefused;
    }
  }
  emit(report, c, start);
  return kOk;
}

struct IsoCliOptions {
  double tol = 1e-3;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::string out;
  int refinements = 2;
};

int cmd_decide_iso(const std::string& p1, const std::string& p2, const Common& c, const IsoCliOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded a = load(p1);
  const Loaded b = load(p2);
  const double h1 = c.resolution.value_or(a.cfg.number("resolution").value_or(1.0 / 256.0));
  const double h2 = c.resolution.value_or(b.cfg.number("resolution").value_or(1.0 / 256.0));
  Json report = make_report("decide-iso", input_digest({a.cfg.text, b.cfg.text, std::to_string(h1), std::to_string(h2),
                                                        std::to_string(o.tol), std::to_string(o.seed)}));
  if (!(a.mw.graph() == b.mw.graph())) {
    report["status"] = "GraphMismatch";
    report["error"] = error_json(Error(ErrorCode::GraphMismatch, "systems have different graphs"));
    emit(report, c, start);
    return kInputError;
  }
  const auto k1 = solve_invariant_list(a.mw, h1, max_iterations_for(a));
  const auto k2 = solve_invariant_list(b.mw, h2, max_iterations_for(b));
  IsoOptions opt;
  opt.tol = o.tol;
  opt.trials = o.trials;
  opt.seed = o.seed;
  opt.max_refinements = o.refinements;
  const IsoDecision d = decide_iso_totally_disconnected(a.mw, k1, b.mw, k2, opt);
  report["decision"] = to_json(d);
  report["status"] = to_string(d.status);
  if (d.certificate && !o.out.empty()) {
    write_text_file(o.out, format_certificate(describe_certificate(*d.certificate)));
    report["certificate_file"] = o.out;
  }
  emit(report, c, start);
  return d.status == IsoStatus::Isomorphic ? kOk : kRefused;
}

int cmd_verify_cert(const std::string& p1, const std::string& p2, const std::string& cert_path, const Common& c,
                    const IsoCliOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded a = load(p1);
  const Loaded b = load(p2);
  const std::string cert_text = read_text_file(cert_path);
  const double h1 = c.resolution.value_or(a.cfg.number("resolution").value_or(1.0 / 256.0));
  const double h2 = c.resolution.value_or(b.cfg.number("resolution").value_or(1.0 / 256.0));
  Json report = make_report("verify-cert", input_digest({a.cfg.text, b.cfg.text, cert_text, std::to_string(h1),
                                                         std::to_string(h2), std::to_string(o.tol),
                                                         std::to_string(o.seed)}));
  if (!(a.mw.graph() == b.mw.graph())) throw Error(ErrorCode::GraphMismatch, "systems have different graphs");
  const CertificateFile file = parse_certificate(cert_text, a.mw);
  const ConjugacyCertificate cert = materialize(file, a.mw, b.mw);
  const auto k1 = solve_invariant_list(a.mw, h1, max_iterations_for(a));
  const auto k2 = solve_invariant_list(b.mw, h2, max_iterations_for(b));
  const auto grid1 = SampleGrid::from_covering(a.mw, k1);
  const RefutationReport refutation = refute_certificate(cert, a.mw, b.mw, grid1, o.tol);
  report["refutation"] = to_json(refutation);
  bool passed = refutation.passed;
  try {
    const VMap V(cert, a.mw, k1, b.mw, k2);
    const VerifyReport verify = verify_isomorphism(V, o.trials, o.tol, o.seed);
    report["verification"] = to_json(verify);
    passed = passed && verify.passed;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CertificateInvalid) throw;
    report["verification"] = {{"passed", false}, {"error", error_json(e)}};
    passed = false;
  }
  if (!refutation.partition) report["note"] = "cover sets overlap; verified as a cover, not a partition";
  report["passed"] = passed;
  emit(report, c, start);
  return passed ? kOk : kRefused;
}

struct WitnessOptions {
  std::size_t n0 = 1;
  double eps = 0.1;
  std::string a0 = "1";
  std::optional<double> margin;
};

int cmd_witness(const std::string& path, const Common& c, const WitnessOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded l = load(path);
  const double h = resolution_for(l, c);
  Json report = make_report("witness", input_digest({l.cfg.text, std::to_string(h), std::to_string(o.n0),
                                                     std::to_string(o.eps), o.a0}));
  const Expression a0 = Expression::parse(o.a0);
  const auto k = solve_invariant_list(l.mw, h, max_iterations_for(l));
  try {
    const WitnessReport w =
        aperiodicity_witness(l.mw, k, [&](VertexId, const Point& p) { return a0(p); }, o.n0, o.eps, o.margin);
    report["witness"] = to_json(w);
    report["a0"] = o.a0;
    emit(report, c, start);
    return w.passed ? kOk : kRefused;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoQualifyingCenter) throw;
    report["error"] = error_json(e);
    emit(report, c, start);
    return kRefused;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mwkit: invariant sets, coding and conjugacy certificates for Mauldin-Williams graphs"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option_function<std::string>(
        "--resolution",
        [&](const std::string& text) {
          double h = 0.0;
          try {
            h = parse_number(text);
          } catch (const Error& e) {
            throw CLI::ValidationError("--resolution", e.message());
          }
          if (!(h > 0.0)) throw CLI::ValidationError("--resolution", "must be positive");
          common.resolution = h;
        },
        "grid cell side, e.g. 2^-8 (default: cfg 'resolution' or 1/256)");
    sub->add_option("--report", common.report_path, "write the JSON report here instead of stdout");
    sub->add_flag("--timing", common.timing, "add wall-clock timing to the report");
  };

  std::string cfg1, cfg2, cert;

  auto* validate = app.add_subcommand("validate", "check a system description");
  validate->add_option("config", cfg1)->required();
  add_common(validate);

  AttractorOptions att;
  auto* attractor = app.add_subcommand("attractor", "compute the invariant list");
  attractor->add_option("config", cfg1)->required();
  attractor->add_option("--out", att.out, "write the covering as a .boxes file");
  attractor->add_option("--csv", att.csv, "write chaos-game samples as .csv");
  attractor->add_option("--points", att.points, "chaos-game samples per vertex");
  attractor->add_option("--seed", att.seed, "chaos-game seed");
  add_common(attractor);

  RenderOptions ren;
  auto* render = app.add_subcommand("render", "rasterize a vertex set to a binary PPM");
  render->add_option("config", cfg1)->required();
  render->add_option("--out", ren.out, "image path");
  render->add_option("--width", ren.width)->check(CLI::PositiveNumber);
  render->add_option("--height", ren.height)->check(CLI::PositiveNumber);
  render->add_option("--vertex", ren.vertex);
  render->add_option("--points", ren.points, "render chaos-game samples instead of the covering");
  render->add_option("--seed", ren.seed);
  add_common(render);

  int refinements = 2;
  auto* classify = app.add_subcommand("classify", "totally disconnected test");
  classify->add_option("config", cfg1)->required();
  classify->add_option("--refinements", refinements)->check(CLI::NonNegativeNumber);
  add_common(classify);

  CodeOptions code;
  auto* code_cmd = app.add_subcommand("code", "coding map (--path) or addresses of a point (--point)");
  code_cmd->add_option("config", cfg1)->required();
  code_cmd->add_option("--path", code.path, "edge ids, e.g. '0,(1)' repeats 1");
  code_cmd->add_option("--point", code.point, "coordinates, e.g. '0.7' or '0.5,0'");
  code_cmd->add_option("--vertex", code.vertex);
  code_cmd->add_option("--depth", code.depth)->check(CLI::PositiveNumber);
  code_cmd->add_option("--eps", code.eps)->check(CLI::PositiveNumber);
  code_cmd->add_option("--slack", code.slack);
  add_common(code_cmd);

  IsoCliOptions iso;
  auto* decide = app.add_subcommand("decide-iso", "decide correspondence isomorphism");
  decide->add_option("config1", cfg1)->required();
  decide->add_option("config2", cfg2)->required();
  decide->add_option("--tol", iso.tol)->check(CLI::PositiveNumber);
  decide->add_option("--trials", iso.trials);
  decide->add_option("--seed", iso.seed);
  decide->add_option("--out", iso.out, "write the certificate here");
  decide->add_option("--refinements", iso.refinements)->check(CLI::NonNegativeNumber);
  add_common(decide);

  auto* verify = app.add_subcommand("verify-cert", "check a conjugacy certificate");
  verify->add_option("config1", cfg1)->required();
  verify->add_option("config2", cfg2)->required();
  verify->add_option("certificate", cert)->required();
  verify->add_option("--tol", iso.tol)->check(CLI::PositiveNumber);
  verify->add_option("--trials", iso.trials);
  verify->add_option("--seed", iso.seed);
  add_common(verify);

  WitnessOptions wit;
  auto* witness = app.add_subcommand("witness", "aperiodicity witness");
  witness->add_option("config", cfg1)->required();
  witness->add_option("--n0", wit.n0)->check(CLI::PositiveNumber);
  witness->add_option("--eps", wit.eps)->check(CLI::PositiveNumber);
  witness->add_option("--a0", wit.a0, "nonnegative expression in x, y, z");
  witness->add_option("--margin", wit.margin);
  add_common(witness);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*validate) return cmd_validate(cfg1, common);
    if (*attractor) return cmd_attractor(cfg1, common, att);
    if (*render) return cmd_render(cfg1, common, ren);
    if (*classify) return cmd_classify(cfg1, common, refinements);
    if (*code_cmd) return cmd_code(cfg1, common, code);
    if (*decide) return cmd_decide_iso(cfg1, cfg2, common, iso);
    if (*verify) return cmd_verify_cert(cfg1, cfg2, cert, common, iso);
    if (*witness) return cmd_witness(cfg1, common, wit);
  } catch (const MaxIterationsExceeded& e) {
    std::cerr << "mwkit: " << e.what() << '\n';
    return kExhausted;
  } catch (const Error& e) {
    std::cerr << "mwkit: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::bad_alloc&) {
    std::cerr << "mwkit: out of memory\n";
    return kExhausted;
  } catch (const std::exception& e) {
    std::cerr << "mwkit: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
