#pragma once

#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dgcontact/errors.hpp"
#include "dgcontact/mesh.hpp"

namespace dgc {

namespace detail {

/// Tokenizes a dgmesh stream, stripping '#' comments and tracking line
/// numbers for error messages.
class MeshLexer {
 public:
  explicit MeshLexer(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    for (;;) {
      if (pos_ >= tokens_.size()) {
        if (!std::getline(in_, buf_)) throw ParseError(err("unexpected end of file, expected " + std::string(what)));
        ++line_;
        auto hash = buf_.find('#');
        if (hash != std::string::npos) buf_.resize(hash);
        tokens_.clear();
        pos_ = 0;
        std::istringstream ss(buf_);
        std::string tok;
        while (ss >> tok) tokens_.push_back(tok);
        continue;
      }
      return tokens_[pos_++];
    }
  }

  double next_double(const char* what) {
    std::string t = next(what);
    try {
      std::size_t used = 0;
      double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ParseError(err("expected number for " + std::string(what) + ", got '" + t + "'"));
    }
  }

  long next_int(const char* what) {
    std::string t = next(what);
    try {
      std::size_t used = 0;
      long v = std::stol(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ParseError(err("expected integer for " + std::string(what) + ", got '" + t + "'"));
    }
  }

  std::string err(const std::string& msg) const {
    return "line " + std::to_string(line_) + ": " + msg;
  }

 private:
  std::istream& in_;
  std::string buf_;
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

}  // namespace detail

/// Parses the plain-text mesh format:
///   dgmesh 1
///   vertices N    followed by N lines "x y"
///   triangles M   followed by M lines "i j k" (0-based, CCW)
///   boundary B    followed by B lines "i j TAG", TAG in {G1, G2}
inline Mesh read_mesh(std::istream& in, double min_angle_deg = 20.0) {
  detail::MeshLexer lex(in);
  if (lex.next("header") != "dgmesh") throw ParseError(lex.err("expected 'dgmesh' header"));
  if (lex.next_int("format version") != 1) throw ParseError(lex.err("unsupported dgmesh version"));

  if (lex.next("section") != "vertices") throw ParseError(lex.err("expected 'vertices' section"));
  long nv = lex.next_int("vertex count");
  if (nv <= 0) throw ParseError(lex.err("vertex count must be positive"));
  std::vector<Point> verts(nv);
  for (long i = 0; i < nv; ++i) {
    verts[i].x = lex.next_double("vertex x");
    verts[i].y = lex.next_double("vertex y");
  }

  if (lex.next("section") != "triangles") throw ParseError(lex.err("expected 'triangles' section"));
  long nt = lex.next_int("triangle count");
  if (nt <= 0) throw ParseError(lex.err("triangle count must be positive"));
  std::vector<std::array<int, 3>> tris(nt);
  for (long t = 0; t < nt; ++t)
    for (int j = 0; j < 3; ++j) {
      long v = lex.next_int("triangle vertex");
      if (v < 0 || v >= nv) throw ParseError(lex.err("triangle vertex index out of range"));
      tris[t][j] = static_cast<int>(v);
    }

  if (lex.next("section") != "boundary") throw ParseError(lex.err("expected 'boundary' section"));
  long nb = lex.next_int("boundary count");
  Mesh::TagMap tags;
  for (long b = 0; b < nb; ++b) {
    long i = lex.next_int("boundary vertex");
    long j = lex.next_int("boundary vertex");
    if (i < 0 || i >= nv || j < 0 || j >= nv)
      throw ParseError(lex.err("boundary vertex index out of range"));
    std::string tag = lex.next("boundary tag");
    if (tag != "G1" && tag != "G2")
      throw ParseError(lex.err("boundary tag must be G1 or G2, got '" + tag + "'"));
    tags[detail::sorted_pair(static_cast<int>(i), static_cast<int>(j))] =
        tag == "G1" ? BoundaryTag::G1 : BoundaryTag::G2;
  }

  return Mesh::build(std::move(verts), std::move(tris), std::move(tags), min_angle_deg);
}

inline Mesh read_mesh_file(const std::string& path, double min_angle_deg = 20.0) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file: " + path);
  try {
    return read_mesh(in, min_angle_deg);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// Unit square (0,1)^2 as an n x n grid of cells, two CCW triangles each.
/// The bottom side (y = 0) is tagged `bottom_tag`, the rest G1.
inline Mesh unit_square_mesh(int n, BoundaryTag bottom_tag = BoundaryTag::G2,
                             double min_angle_deg = 20.0) {
  std::vector<Point> verts;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) verts.push_back({double(i) / n, double(j) / n});
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  Mesh::TagMap tags;
  for (int i = 0; i < n; ++i) {
    tags[detail::sorted_pair(id(i, 0), id(i + 1, 0))] = bottom_tag;
    tags[detail::sorted_pair(id(i, n), id(i + 1, n))] = BoundaryTag::G1;
    tags[detail::sorted_pair(id(0, i), id(0, i + 1))] = BoundaryTag::G1;
    tags[detail::sorted_pair(id(n, i), id(n, i + 1))] = BoundaryTag::G1;
  }
  return Mesh::build(std::move(verts), std::move(tris), std::move(tags), min_angle_deg);
}

/// L-shaped domain (0,1)^2 minus the closed bottom-right quarter, as a
/// 6-triangle coarse mesh. The two edges meeting at the reentrant corner
/// (1/2, 1/2) are tagged G2, the rest G1.
inline Mesh lshape_mesh(double min_angle_deg = 20.0) {
  std::vector<Point> verts = {{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}, {1.0, 0.5},
                              {0.0, 1.0}, {0.5, 1.0}, {1.0, 1.0}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 3}, {0, 3, 2}, {2, 3, 6},
                                          {2, 6, 5}, {3, 4, 7}, {3, 7, 6}};
  Mesh::TagMap tags;
  auto tag = [&](int a, int b, BoundaryTag t) { tags[detail::sorted_pair(a, b)] = t; };
  tag(0, 1, BoundaryTag::G1);
  tag(1, 3, BoundaryTag::G2);
  tag(3, 4, BoundaryTag::G2);
  tag(4, 7, BoundaryTag::G1);
  tag(7, 6, BoundaryTag::G1);
  tag(6, 5, BoundaryTag::G1);
  tag(5, 2, BoundaryTag::G1);
  tag(2, 0, BoundaryTag::G1);
  return Mesh::build(std::move(verts), std::move(tris), std::move(tags), min_angle_deg);
}

/// Strip (0,1) x (0,1/2) split into 2n x n cells; Gamma_1 is the left side
/// (x = 0), everything else Gamma_2.
inline Mesh strip_mesh(int n = 2, double min_angle_deg = 20.0) {
  int nx = 2 * n, ny = n;
  std::vector<Point> verts;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) verts.push_back({double(i) / nx, 0.5 * double(j) / ny});
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  Mesh::TagMap tags;
  for (int i = 0; i < nx; ++i) {
    tags[detail::sorted_pair(id(i, 0), id(i + 1, 0))] = BoundaryTag::G2;
    tags[detail::sorted_pair(id(i, ny), id(i + 1, ny))] = BoundaryTag::G2;
  }
  for (int j = 0; j < ny; ++j) {
    tags[detail::sorted_pair(id(0, j), id(0, j + 1))] = BoundaryTag::G1;
    tags[detail::sorted_pair(id(nx, j), id(nx, j + 1))] = BoundaryTag::G2;
  }
  return Mesh::build(std::move(verts), std::move(tris), std::move(tags), min_angle_deg);
}

}  // namespace dgc
