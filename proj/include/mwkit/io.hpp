#pragma once

// File formats: .boxes (coverings), .csv (point clouds), .ppm (P6 images) and
// .cert (conjugacy certificates). Grammars in docs/formats.md.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mwkit/attractor.hpp"
#include "mwkit/config.hpp"
#include "mwkit/conjugacy.hpp"
#include "mwkit/error.hpp"
#include "mwkit/geometry.hpp"

namespace mwkit {

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

namespace detail {

inline std::string exact(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// .boxes

inline std::string format_boxes(const Covering& sets) {
  std::ostringstream out;
  out << "mwkit-boxes 1\n";
  for (const auto& s : sets) {
    const Grid& g = s.grid();
    out << "vertex " << s.vertex() << " dim " << g.dim << " resolution " << detail::exact(g.h) << " origin";
    for (int i = 0; i < g.dim; ++i) out << ' ' << detail::exact(g.origin[i]);
    out << " extent";
    for (int i = 0; i < g.dim; ++i) out << ' ' << g.extent[static_cast<std::size_t>(i)];
    out << " cells " << s.size() << '\n';
    for (CellKey k : s.cells()) {
      const CellIndex idx = g.index(k);
      for (int i = 0; i < g.dim; ++i) out << (i ? " " : "") << idx[static_cast<std::size_t>(i)];
      out << '\n';
    }
  }
  return out.str();
}

inline Covering parse_boxes(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "mwkit-boxes" || version != 1) {
    throw Error(ErrorCode::ParseError, "boxes file must start with 'mwkit-boxes 1'");
  }
  Covering out;
  std::string word;
  while (in >> word) {
    auto expect = [&](const char* w) {
      std::string got;
      if (!(in >> got) || got != w) throw Error(ErrorCode::ParseError, std::string("expected '") + w + "'");
    };
    if (word != "vertex") throw Error(ErrorCode::ParseError, "expected 'vertex', got '" + word + "'");
    VertexId v = 0;
    Grid g;
    std::size_t count = 0;
    in >> v;
    expect("dim");
    in >> g.dim;
    if (!in || g.dim < 1 || g.dim > kMaxDim) throw Error(ErrorCode::ParseError, "bad dimension");
    expect("resolution");
    in >> g.h;
    expect("origin");
    g.origin = Point(g.dim);
    for (int i = 0; i < g.dim; ++i) in >> g.origin[i];
    expect("extent");
    for (int i = 0; i < g.dim; ++i) in >> g.extent[static_cast<std::size_t>(i)];
    expect("cells");
    in >> count;
    if (!in) throw Error(ErrorCode::ParseError, "bad header for vertex " + std::to_string(v));
    std::vector<CellKey> cells;
    cells.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
      CellIndex idx{0, 0, 0};
      for (int i = 0; i < g.dim; ++i) in >> idx[static_cast<std::size_t>(i)];
      if (!in || !g.in_range(idx)) throw Error(ErrorCode::ParseError, "bad cell in vertex " + std::to_string(v));
      cells.push_back(g.key(idx));
    }
    out.emplace_back(v, g, std::move(cells));
  }
  return out;
}

// ---------------------------------------------------------------------------
// .csv

inline std::string format_point_csv(const std::vector<TaggedPointCloud>& clouds) {
  std::ostringstream out;
  const int dim = clouds.empty() || clouds.front().points.empty() ? 1 : clouds.front().points.front().dim;
  out << "vertex";
  const char* names[] = {"x", "y", "z"};
  for (int i = 0; i < dim; ++i) out << ',' << names[i];
  out << '\n';
  for (const auto& c : clouds) {
    for (const auto& p : c.points) {
      out << c.vertex;
      for (int i = 0; i < p.dim; ++i) out << ',' << detail::exact(p[i]);
      out << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// .ppm

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, top row first

  std::size_t set_pixels() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < rgb.size(); i += 3) n += rgb[i] == 0 ? 1 : 0;
    return n;
  }
};

inline Image blank_image(int width, int height) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "image size must be positive");
  return {width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height * 3, 255)};
}

namespace detail {

inline void set_pixel(Image& img, int px, int py) {
  const auto at = (static_cast<std::size_t>(py) * img.width + px) * 3;
  img.rgb[at] = img.rgb[at + 1] = img.rgb[at + 2] = 0;
}

/// Point of the ambient box under pixel (px, py); y grows upward.
inline Point pixel_point(const Box& frame, int width, int height, int px, int py) {
  Point p(frame.dim);
  p[0] = frame.lo[0] + (px + 0.5) / width * frame.extent(0);
  if (frame.dim >= 2) p[1] = frame.hi[1] - (py + 0.5) / height * frame.extent(1);
  if (frame.dim >= 3) p[2] = 0.5 * (frame.lo[2] + frame.hi[2]);
  return p;
}

}  // namespace detail

/// A pixel is set when its center lies in a covering cell. One-dimensional
/// sets render as a strip; three-dimensional ones as the mid-depth slice.
inline Image render_covering(const TaggedBoxSet& set, const Box& frame, int width, int height) {
  Image img = blank_image(width, height);
  for (int py = 0; py < height; ++py) {
    for (int px = 0; px < width; ++px) {
      const Point p = detail::pixel_point(frame, width, height, px, py);
      if (set.contains_point(p)) detail::set_pixel(img, px, py);
    }
  }
  return img;
}

inline Image render_points(const std::vector<Point>& points, const Box& frame, int width, int height) {
  Image img = blank_image(width, height);
  for (const auto& p : points) {
    const double fx = (p[0] - frame.lo[0]) / frame.extent(0);
    const double fy = frame.dim >= 2 ? (frame.hi[1] - p[1]) / frame.extent(1) : 0.5;
    const int px = std::clamp(static_cast<int>(fx * width), 0, width - 1);
    const int py = std::clamp(static_cast<int>(fy * height), 0, height - 1);
    if (frame.dim == 1) {
      for (int row = 0; row < height; ++row) detail::set_pixel(img, px, row);
    } else {
      detail::set_pixel(img, px, py);
    }
  }
  return img;
}

inline std::string encode_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
  return out;
}

inline Image decode_ppm(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  if (!(in >> magic >> w >> h >> maxval) || magic != "P6" || maxval != 255) {
    throw Error(ErrorCode::ParseError, "not an 8-bit binary P6 image");
  }
  in.get();
  Image img = blank_image(w, h);
  in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (!in) throw Error(ErrorCode::ParseError, "truncated pixel data");
  return img;
}

// ---------------------------------------------------------------------------
// .cert

/// Address certificates need both systems and the resolutions they were
/// built at; the loader re-solves the invariant lists from those.
struct CertificateFile {
  enum class Kind { Affine, Address };
  Kind kind = Kind::Affine;
  std::vector<AffineMap> affine;  // per vertex
  double resolution1 = 0.0, resolution2 = 0.0;
  double tau1 = 0.0, tau2 = 0.0;
  std::size_t depth = 60;
  double cell_resolution = 0.0;  // grid of the cover cells, 0 when no cells are listed
  struct Piece {
    Permutation sigma;
    bool all = false;
    std::vector<TaggedBoxSet> parts;
  };
  std::vector<Piece> cover;
};

namespace detail {

inline std::string format_affine(const AffineMap& m) {
  std::ostringstream out;
  for (int i = 0; i < m.dim(); ++i) {
    if (i) out << " ;";
    for (int j = 0; j < m.dim(); ++j) out << ' ' << exact(m.a(i, j));
  }
  out << " :";
  for (int i = 0; i < m.dim(); ++i) out << ' ' << exact(m.offset()[i]);
  return out.str();
}

}  // namespace detail

inline CertificateFile describe_certificate(const ConjugacyCertificate& cert) {
  CertificateFile file;
  if (cert.f.kind() == FMap::Kind::Affine) {
    file.kind = CertificateFile::Kind::Affine;
    file.affine = cert.f.affine_maps();
  } else {
    const auto& d = cert.f.address_data();
    file.kind = CertificateFile::Kind::Address;
    file.resolution1 = d.k1.resolution;
    file.resolution2 = d.k2.resolution;
    file.tau1 = d.tau1;
    file.tau2 = d.tau2;
    file.depth = d.depth;
  }
  for (std::size_t j = 0; j < cert.cover.size(); ++j) {
    file.cover.push_back({cert.sigmas[j], cert.cover[j].all, cert.cover[j].parts});
    for (const auto& part : cert.cover[j].parts) {
      if (file.cell_resolution != 0.0 && file.cell_resolution != part.resolution()) {
        throw Error(ErrorCode::CertificateInvalid, "cover cells use more than one resolution");
      }
      file.cell_resolution = part.resolution();
    }
  }
  return file;
}

inline std::string format_certificate(const CertificateFile& file) {
  std::ostringstream out;
  out << "mwkit-cert 1\n";
  if (file.kind == CertificateFile::Kind::Affine) {
    out << "f affine\n";
    for (std::size_t v = 0; v < file.affine.size(); ++v) out << "map " << v << " :" << detail::format_affine(file.affine[v]) << '\n';
  } else {
    out << "f address\n";
    out << "resolution " << detail::exact(file.resolution1) << ' ' << detail::exact(file.resolution2) << '\n';
    out << "tau " << detail::exact(file.tau1) << ' ' << detail::exact(file.tau2) << '\n';
    out << "depth " << file.depth << '\n';
  }
  if (file.cell_resolution > 0.0) out << "cellgrid " << detail::exact(file.cell_resolution) << '\n';
  for (std::size_t j = 0; j < file.cover.size(); ++j) {
    const auto& piece = file.cover[j];
    out << "cover " << j << " sigma";
    for (EdgeId e : piece.sigma) out << ' ' << e;
    out << (piece.all ? " all" : "") << '\n';
    for (const auto& part : piece.parts) {
      const Grid& g = part.grid();
      out << "cells " << part.vertex() << ' ' << part.size() << ':';
      for (CellKey k : part.cells()) {
        const CellIndex idx = g.index(k);
        out << ' ';
        for (int i = 0; i < g.dim; ++i) out << (i ? "," : "") << idx[static_cast<std::size_t>(i)];
      }
      out << '\n';
    }
  }
  return out.str();
}

/// Cells refer to grids over the ambient boxes of the first system at the
/// resolution given by the 'cellgrid' record.
inline CertificateFile parse_certificate(const std::string& text, const MWGraph& mw1) {
  CertificateFile file;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool seen_header = false;
  bool seen_f = false;
  auto fail = [&](const std::string& what) -> void {
    throw Error(ErrorCode::ParseError, "certificate line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto words = detail::split_ws(line);
    const std::string& head = words.front();
    try {
      if (!seen_header) {
        if (line != "mwkit-cert 1") fail("expected 'mwkit-cert 1'");
        seen_header = true;
      } else if (head == "f") {
        if (words.size() != 2 || (words[1] != "affine" && words[1] != "address")) fail("expected 'f affine' or 'f address'");
        file.kind = words[1] == "affine" ? CertificateFile::Kind::Affine : CertificateFile::Kind::Address;
        seen_f = true;
      } else if (head == "map") {
        const auto fields = detail::split_on(line, ':');
        if (fields.size() != 3) fail("expected 'map <vertex> : <rows> : <offset>'");
        const auto ids = detail::split_ws(fields[0]);
        if (ids.size() != 2) fail("expected 'map <vertex>'");
        const auto v = static_cast<std::size_t>(detail::parse_id(ids[1], "vertex"));
        std::vector<std::vector<double>> rows;
        for (const auto& r : detail::split_on(fields[1], ';')) rows.push_back(detail::numbers(r));
        if (file.affine.size() <= v) file.affine.resize(v + 1);
        file.affine[v] = AffineMap(rows, detail::numbers(fields[2]));
      } else if (head == "resolution" && words.size() == 3) {
        file.resolution1 = parse_number(words[1]);
        file.resolution2 = parse_number(words[2]);
      } else if (head == "tau" && words.size() == 3) {
        file.tau1 = parse_number(words[1]);
        file.tau2 = parse_number(words[2]);
      } else if (head == "cellgrid" && words.size() == 2) {
        file.cell_resolution = parse_number(words[1]);
        if (!(file.cell_resolution > 0.0)) fail("cellgrid must be positive");
      } else if (head == "depth" && words.size() == 2) {
        file.depth = static_cast<std::size_t>(detail::parse_id(words[1], "depth"));
      } else if (head == "cover") {
        if (words.size() < 3 || words[2] != "sigma") fail("expected 'cover <j> sigma <edges...> [all]'");
        CertificateFile::Piece piece;
        for (std::size_t i = 3; i < words.size(); ++i) {
          if (words[i] == "all" && i + 1 == words.size()) {
            piece.all = true;
          } else {
            piece.sigma.push_back(detail::parse_id(words[i], "edge"));
          }
        }
        file.cover.push_back(std::move(piece));
      } else if (head == "cells") {
        if (file.cover.empty()) fail("'cells' before any 'cover'");
        if (!(file.cell_resolution > 0.0)) fail("'cells' before 'cellgrid'");
        const auto fields = detail::split_on(line, ':');
        if (fields.size() != 2) fail("expected 'cells <vertex> <count>: i,j ...'");
        const auto ids = detail::split_ws(fields[0]);
        if (ids.size() != 3) fail("expected 'cells <vertex> <count>'");
        const VertexId v = detail::parse_id(ids[1], "vertex");
        const auto count = static_cast<std::size_t>(detail::parse_id(ids[2], "count"));
        if (v < 0 || static_cast<std::size_t>(v) >= mw1.graph().vertex_count()) fail("unknown vertex");
        const Grid grid = Grid::covering(mw1.ambient(v), file.cell_resolution);
        std::vector<CellKey> cells;
        for (const auto& tok : detail::split_ws(fields[1])) {
          const auto parts = detail::split_on(tok, ',');
          if (static_cast<int>(parts.size()) != grid.dim) fail("cell '" + tok + "' has wrong dimension");
          CellIndex idx{0, 0, 0};
          for (std::size_t i = 0; i < parts.size(); ++i) idx[i] = detail::parse_id(parts[i], "cell index");
          if (!grid.in_range(idx)) fail("cell '" + tok + "' outside the grid");
          cells.push_back(grid.key(idx));
        }
        if (cells.size() != count) fail("cell count mismatch");
        file.cover.back().parts.emplace_back(v, grid, std::move(cells));
      } else {
        fail("unknown record '" + head + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      fail(e.message());
    }
  }
  if (!seen_header) throw Error(ErrorCode::ParseError, "empty certificate");
  if (!seen_f) throw Error(ErrorCode::ParseError, "certificate has no 'f' record");
  if (file.cover.empty()) throw Error(ErrorCode::ParseError, "certificate has no cover");
  return file;
}

/// Rebuilds the certificate; address certificates re-solve both invariant
/// lists at the recorded resolutions.
inline ConjugacyCertificate materialize(const CertificateFile& file, const MWGraph& mw1, const MWGraph& mw2) {
  ConjugacyCertificate cert;
  if (file.kind == CertificateFile::Kind::Affine) {
    if (file.affine.size() != mw1.graph().vertex_count()) {
      throw Error(ErrorCode::CertificateInvalid, "affine f needs one map per vertex");
    }
    cert.f = FMap::affine(file.affine);
  } else {
    const auto k1 = solve_invariant_list(mw1, file.resolution1);
    const auto k2 = solve_invariant_list(mw2, file.resolution2);
    cert.f = FMap::address(mw1, k1, mw2, k2, file.tau1, file.tau2, file.depth);
  }
  for (const auto& piece : file.cover) {
    cert.cover.push_back({piece.all, piece.parts});
    cert.sigmas.push_back(piece.sigma);
  }
  return cert;
}

}  // namespace mwkit
