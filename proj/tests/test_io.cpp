#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace mwkit;
using namespace mwkit::testing;

TEST(Io, ConstantExpressions) {
  EXPECT_DOUBLE_EQ(parse_number("1/3"), 1.0 / 3);
  EXPECT_DOUBLE_EQ(parse_number("3^-6"), std::pow(3.0, -6));
  EXPECT_DOUBLE_EQ(parse_number("sqrt(3)/2"), std::sqrt(3.0) / 2);
  EXPECT_DOUBLE_EQ(parse_number("-1/2 + 1"), 0.5);
  EXPECT_DOUBLE_EQ(parse_number("2^-10"), std::ldexp(1.0, -10));
  EXPECT_THROW(parse_number("1/"), Error);
  EXPECT_THROW(parse_number("foo(2)"), Error);
}

TEST(Io, ConfigErrorsCarryLineNumbers) {
  try {
    load_config(config_path("malformed.cfg"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    ASSERT_FALSE(e.issues().empty());
    EXPECT_NE(e.issues().front().subject.find("malformed.cfg:"), std::string::npos);
  }
  const std::string text = "[vertices]\n0 : 0 : 1\n[edges]\n0 0 0 : 1/2 : 0\n1 0 0 : 1/2 1/2 : 0\n[bogus]\n";
  try {
    parse_config(text, "t");
    FAIL();
  } catch (const Error& e) {
    ASSERT_EQ(e.issues().size(), 2u);
    EXPECT_EQ(e.issues()[0].subject, "t:5");
    EXPECT_EQ(e.issues()[1].subject, "t:6");
  }
}

TEST(Io, ConfigParamsAndComments) {
  const auto cfg = parse_config("# c\n[vertices]\n0 : 0 : 1 # tail\n[edges]\n0 0 0 : 1/2 : 0\n1 0 0 : 1/2 : 1/2\n"
                                "[params]\nresolution = 2^-4\n");
  EXPECT_EQ(cfg.raw.graph.edges.size(), 2u);
  EXPECT_DOUBLE_EQ(*cfg.number("resolution"), 1.0 / 16);
  EXPECT_FALSE(cfg.param("seed").has_value());
}

TEST(Io, BoxesRoundTrip) {
  for (const char* name : {"cantor.cfg", "two-vertex.cfg", "sierpinski.cfg"}) {
    const MWGraph mw = load_system(name);
    const auto k = solve_invariant_list(mw, config_resolution(name));
    const auto back = parse_boxes(format_boxes(k.sets));
    ASSERT_EQ(back.size(), k.sets.size());
    for (std::size_t v = 0; v < back.size(); ++v) {
      EXPECT_EQ(back[v].vertex(), k.sets[v].vertex());
      EXPECT_EQ(back[v].resolution(), k.sets[v].resolution());
      EXPECT_EQ(back[v].cells(), k.sets[v].cells());
      EXPECT_EQ(covering_distance(back, k.sets), 0.0);
    }
  }
  EXPECT_THROW(parse_boxes("not boxes"), Error);
}

TEST(Io, PpmRoundTrip) {
  const MWGraph mw = load_system("sierpinski.cfg");
  const auto k = solve_invariant_list(mw, std::ldexp(1.0, -5));
  const Image img = render_covering(k.at(0), mw.ambient(0), 64, 64);
  EXPECT_GT(img.set_pixels(), 0u);
  EXPECT_LT(img.set_pixels(), 64u * 64u);
  const std::string bytes = encode_ppm(img);
  EXPECT_EQ(bytes.substr(0, 3), "P6\n");
  const Image back = decode_ppm(bytes);
  EXPECT_EQ(back.width, 64);
  EXPECT_EQ(back.height, 64);
  EXPECT_EQ(back.rgb, img.rgb);
  EXPECT_THROW(decode_ppm(bytes.substr(0, bytes.size() - 1)), Error);
  EXPECT_THROW(decode_ppm("P3\n1 1\n255\n0 0 0"), Error);
}

TEST(Io, PointCsv) {
  const MWGraph mw = load_system("sierpinski.cfg");
  const auto csv = format_point_csv(chaos_game(mw, 3, 10, 1));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "vertex,x,y");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Io, AffineCertificateRoundTrip) {
  const MWGraph mw = load_system("cantor.cfg");
  const auto k = solve_invariant_list(mw, config_resolution("cantor.cfg"));
  const auto& k0 = k.at(0);
  std::vector<CellKey> left, right;
  for (CellKey key : k0.cells()) (k0.grid().cell_center(k0.grid().index(key))[0] < 0.5 ? left : right).push_back(key);
  const ConjugacyCertificate cert{FMap::affine({AffineMap::line(-1.0, 1.0)}),
                                  {CoverSet{false, {TaggedBoxSet(0, k0.grid(), left)}},
                                   CoverSet{false, {TaggedBoxSet(0, k0.grid(), right)}}},
                                  {{1, 0}, {1, 0}}};
  const std::string text = format_certificate(describe_certificate(cert));
  const auto back = materialize(parse_certificate(text, mw), mw, mw);
  EXPECT_EQ(format_certificate(describe_certificate(back)), text);
  ASSERT_EQ(back.sigmas.size(), 2u);
  EXPECT_EQ(back.cover[0].parts.at(0).cells(), left);
  const VMap V(back, mw, k, mw, k);
  EXPECT_TRUE(refute_certificate(back, mw, mw, V.grid1(), 1e-12).passed);
}

TEST(Io, AddressCertificateRoundTrip) {
  const MWGraph a = load_system("cantor.cfg");
  const MWGraph b = load_system("cantor14.cfg");
  const auto ka = solve_invariant_list(a, config_resolution("cantor.cfg"));
  const auto kb = solve_invariant_list(b, config_resolution("cantor14.cfg"));
  const ConjugacyCertificate cert{FMap::address(a, ka, b, kb), {CoverSet{true, {}}}, {{0, 1}}};
  const std::string text = format_certificate(describe_certificate(cert));
  const auto back = materialize(parse_certificate(text, a), a, b);
  const Point x{2.0 / 9 + 2.0 / 81};
  EXPECT_NEAR(back.f.forward(0, x)[0], cert.f.forward(0, x)[0], 1e-12);
}

TEST(Io, CertificateParseErrors) {
  const MWGraph mw = load_system("cantor.cfg");
  EXPECT_THROW(parse_certificate("", mw), Error);
  EXPECT_THROW(parse_certificate("mwkit-cert 1\nf affine\ncellgrid 1/8\ncells 0 1: 0\n", mw), Error);
  try {
    parse_certificate("mwkit-cert 1\nf wavy\n", mw);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(e.message().find("line 2"), std::string::npos);
  }
}

TEST(Io, ReportDigestIsStable) {
  EXPECT_EQ(input_digest({"a", "b"}), input_digest({"a", "b"}));
  EXPECT_NE(input_digest({"a", "b"}), input_digest({"ab", ""}));
  const auto j = make_report("classify", input_digest({"x"}));
  EXPECT_EQ(j["command"], "classify");
  EXPECT_EQ(dump_report(j), dump_report(make_report("classify", input_digest({"x"}))));
}
