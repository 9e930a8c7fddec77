#include "isoflow/mesh.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <unordered_map>

#include "isoflow/error.hpp"
#include "isoflow/quadrature.hpp"

namespace isoflow {

namespace {

struct TripleHash {
  std::size_t operator()(const std::array<int, 3>& t) const {
    std::size_t h = static_cast<std::size_t>(t[0]);
    h = h * 1000003u ^ static_cast<std::size_t>(t[1]);
    h = h * 1000003u ^ static_cast<std::size_t>(t[2]);
    return h;
  }
};

Mat3 edge_matrix(const std::vector<Vec3>& v, const std::array<int, 4>& c) {
  Mat3 m;
  m.col(0) = v[c[1]] - v[c[0]];
  m.col(1) = v[c[2]] - v[c[0]];
  m.col(2) = v[c[3]] - v[c[0]];
  return m;
}

// Uniform bucket grid over cell bounding boxes, for point location.
class CellLocator {
 public:
  CellLocator(const Mesh& mesh) : mesh_(mesh) {
    lo_ = mesh.vertices().front();
    hi_ = lo_;
    for (const auto& x : mesh.vertices()) {
      lo_ = lo_.cwiseMin(x);
      hi_ = hi_.cwiseMax(x);
    }
    const double per_axis = std::cbrt(static_cast<double>(mesh.num_cells()));
    dims_ = std::max(1, static_cast<int>(per_axis));
    buckets_.resize(static_cast<std::size_t>(dims_) * dims_ * dims_);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      Vec3 clo = mesh.vertices()[mesh.cells()[c][0]], chi = clo;
      for (int v : mesh.cells()[c]) {
        clo = clo.cwiseMin(mesh.vertices()[v]);
        chi = chi.cwiseMax(mesh.vertices()[v]);
      }
      auto a = index(clo), b = index(chi);
      for (int k = a[2]; k <= b[2]; ++k)
        for (int j = a[1]; j <= b[1]; ++j)
          for (int i = a[0]; i <= b[0]; ++i) buckets_[flat(i, j, k)].push_back(c);
    }
  }

  /// Cell containing x (closed, with tolerance), excluding `skip`; -1 if none.
  int find(const Vec3& x, int skip) const {
    if (((x - lo_).array() < 0.0).any() || ((x - hi_).array() > 0.0).any()) return -1;
    auto ix = index(x);
    for (int c : buckets_[flat(ix[0], ix[1], ix[2])]) {
      if (c == skip) continue;
      auto lam = mesh_.barycentric(c, x);
      if (*std::min_element(lam.begin(), lam.end()) >= -1e-10) return c;
    }
    return -1;
  }

 private:
  std::array<int, 3> index(const Vec3& x) const {
    std::array<int, 3> r{};
    for (int d = 0; d < 3; ++d) {
      const double span = hi_[d] - lo_[d];
      int i = span > 0 ? static_cast<int>((x[d] - lo_[d]) / span * dims_) : 0;
      r[d] = std::clamp(i, 0, dims_ - 1);
    }
    return r;
  }
  std::size_t flat(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims_ + j) * dims_ + i;
  }

  const Mesh& mesh_;
  Vec3 lo_, hi_;
  int dims_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace

double Mesh::max_shape_condition() const {
  return condition_.empty() ? 0.0 : *std::max_element(condition_.begin(), condition_.end());
}

int Mesh::across(int c, int local) const {
  const Face& f = faces_[cell_faces_[c][local]];
  if (!f.interior()) return -1;
  return f.owner == c ? f.neighbor : f.owner;
}

std::array<double, 4> Mesh::barycentric(int c, const Vec3& x) const {
  const auto& g = grad_lambda_[c];
  const Vec3& v0 = vertices_[cells_[c][0]];
  std::array<double, 4> lam{};
  lam[1] = g[1].dot(x - v0);
  lam[2] = g[2].dot(x - v0);
  lam[3] = g[3].dot(x - v0);
  lam[0] = 1.0 - lam[1] - lam[2] - lam[3];
  return lam;
}

Vec3 Mesh::point(int c, const std::array<double, 4>& bary) const {
  Vec3 x = Vec3::Zero();
  for (int i = 0; i < 4; ++i) x += bary[i] * vertices_[cells_[c][i]];
  return x;
}

Vec3 Mesh::face_point(int f, const std::array<double, 3>& bary) const {
  const auto& ids = faces_[f].vertex_ids;
  return bary[0] * vertices_[ids[0]] + bary[1] * vertices_[ids[1]] + bary[2] * vertices_[ids[2]];
}

Mesh Mesh::from_cells(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> cells,
                      const MeshOptions& options) {
  if (vertices.empty() || cells.empty()) throw InvalidInput("mesh has no vertices or no cells");
  const int nv = static_cast<int>(vertices.size());
  Mesh m;
  m.vertices_ = std::move(vertices);
  m.cells_ = std::move(cells);
  const int nc = m.num_cells();

  m.volume_.resize(nc);
  m.centroid_.resize(nc);
  m.diameter_.resize(nc);
  m.affine_.resize(nc);
  m.condition_.resize(nc);
  m.grad_lambda_.resize(nc);

  for (int c = 0; c < nc; ++c) {
    auto& cell = m.cells_[c];
    for (int v : cell)
      if (v < 0 || v >= nv) throw InvalidInput("cell " + std::to_string(c) + " references missing vertex");
    Mat3 e = edge_matrix(m.vertices_, cell);
    double det = e.determinant();
    if (det < 0.0) {
      std::swap(cell[2], cell[3]);
      e = edge_matrix(m.vertices_, cell);
      det = -det;
    }
    double diam = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        diam = std::max(diam, (m.vertices_[cell[i]] - m.vertices_[cell[j]]).norm());
    if (!(det > 1e-14 * diam * diam * diam))
      throw InvalidInput("cell " + std::to_string(c) + " is degenerate (zero volume)");
    m.volume_[c] = det / 6.0;
    m.diameter_[c] = diam;
    m.centroid_[c] = 0.25 * (m.vertices_[cell[0]] + m.vertices_[cell[1]] + m.vertices_[cell[2]] +
                             m.vertices_[cell[3]]);
    const Mat3 inv = e.inverse();
    auto& g = m.grad_lambda_[c];
    g[1] = inv.row(0).transpose();
    g[2] = inv.row(1).transpose();
    g[3] = inv.row(2).transpose();
    g[0] = -(g[1] + g[2] + g[3]);
    Eigen::JacobiSVD<Mat3> svd(e);
    const auto& sv = svd.singularValues();
    m.condition_[c] = sv(0) / sv(2);
    m.h_ = std::max(m.h_, diam);
    m.domain_volume_ += m.volume_[c];
  }
  for (int c = 0; c < nc; ++c) {
    m.affine_[c] = edge_matrix(m.vertices_, m.cells_[c]) / m.h_;
    if (m.condition_[c] > options.shape_cap) {
      std::ostringstream msg;
      msg << "cell " << c << " violates the shape-regularity cap: cond(A_E) = " << m.condition_[c]
          << " > " << options.shape_cap;
      throw InvalidInput(msg.str());
    }
  }

  // Face deduplication; faces are numbered by first appearance so the owner is
  // always the lower cell index.
  std::unordered_map<std::array<int, 3>, int, TripleHash> lookup;
  lookup.reserve(static_cast<std::size_t>(nc) * 3);
  m.cell_faces_.resize(nc);
  m.face_sign_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto& cell = m.cells_[c];
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> key{};
      int k = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i) key[k++] = cell[j];
      std::array<int, 3> ordered = key;
      std::sort(key.begin(), key.end());
      auto [it, inserted] = lookup.emplace(key, m.num_faces());
      if (inserted) {
        Face f;
        f.vertex_ids = ordered;
        f.owner = c;
        const Vec3& a = m.vertices_[ordered[0]];
        const Vec3& b = m.vertices_[ordered[1]];
        const Vec3& d = m.vertices_[ordered[2]];
        Vec3 cr = (b - a).cross(d - a);
        f.area = 0.5 * cr.norm();
        f.centroid = (a + b + d) / 3.0;
        // Outward from the owner: against the gradient of the opposite
        // barycentric coordinate.
        f.normal = -m.grad_lambda_[c][i].normalized();
        m.faces_.push_back(f);
        m.cell_faces_[c][i] = it->second;
        m.face_sign_[c][i] = 1.0;
      } else {
        Face& f = m.faces_[it->second];
        if (f.neighbor != -1) {
          throw ConformityError("face (" + std::to_string(key[0]) + "," + std::to_string(key[1]) +
                                "," + std::to_string(key[2]) + ") is shared by more than two cells");
        }
        f.neighbor = c;
        f.kind = FaceKind::interior;
        m.cell_faces_[c][i] = it->second;
        m.face_sign_[c][i] = -1.0;
      }
    }
  }

  m.interior_index_.assign(m.faces_.size(), -1);
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.faces_[f].interior()) {
      m.interior_index_[f] = static_cast<int>(m.interior_.size());
      m.interior_.push_back(f);
    } else {
      m.exterior_.push_back(f);
    }
  }

  // A boundary face that has mesh cells directly outside it is a hanging
  // face (non-matching neighbors).
  CellLocator locator(m);
  for (int f : m.exterior_) {
    const Face& face = m.faces_[f];
    const double delta = 1e-6 * std::sqrt(face.area);
    const Vec3 probe = face.centroid + delta * face.normal;
    const int hit = locator.find(probe, face.owner);
    if (hit >= 0) {
      throw ConformityError("non-conforming mesh: boundary face " + std::to_string(f) +
                            " of cell " + std::to_string(face.owner) + " touches cell " +
                            std::to_string(hit) + " (hanging node or non-matching faces)");
    }
  }
  return m;
}

Mesh build_box_mesh(const Box& box, std::array<int, 3> n, const MeshOptions& options) {
  for (int d = 0; d < 3; ++d) {
    if (n[d] < 1) throw InvalidInput("cells per axis must be >= 1");
    if (!(box.upper[d] > box.lower[d])) throw InvalidInput("degenerate box extents");
  }
  const int nx = n[0] + 1, ny = n[1] + 1, nz = n[2] + 1;
  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(nx) * ny * nz);
  const Vec3 step = (box.upper - box.lower).cwiseQuotient(Vec3(n[0], n[1], n[2]));
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        vertices.push_back(box.lower + Vec3(i * step[0], j * step[1], k * step[2]));
  auto vid = [&](int i, int j, int k) { return i + nx * (j + ny * k); };

  // Each tetrahedron follows a monotone lattice path 000 -> 111 through the
  // hexahedron; all hexahedra share the same main diagonal, so the
  // subdivision is conforming.
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> cells;
  cells.reserve(6 * static_cast<std::size_t>(n[0]) * n[1] * n[2]);
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> corner{0, 0, 0};
          std::array<int, 4> tet{};
          tet[0] = vid(i, j, k);
          for (int s = 0; s < 3; ++s) {
            corner[p[s]] = 1;
            tet[s + 1] = vid(i + corner[0], j + corner[1], k + corner[2]);
          }
          cells.push_back(tet);
        }
  return Mesh::from_cells(std::move(vertices), std::move(cells), options);
}

Mesh parse_mesh(std::istream& in, const MeshOptions& options) {
  std::string line;
  int line_no = 0;
  // Yields the tokens of the next non-empty, non-comment line.
  auto next = [&](std::vector<std::string>& tokens) {
    while (std::getline(in, line)) {
      ++line_no;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      tokens.clear();
      for (std::string t; ls >> t;) tokens.push_back(t);
      if (!tokens.empty()) return true;
    }
    return false;
  };
  auto number = [&](const std::string& tok) {
    try {
      std::size_t pos = 0;
      double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected a number, got '" + tok + "'", line_no);
    }
  };
  auto integer = [&](const std::string& tok) {
    try {
      std::size_t pos = 0;
      long v = std::stol(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected an integer, got '" + tok + "'", line_no);
    }
  };

  std::vector<std::string> tok;
  if (!next(tok)) throw ParseError("empty mesh file", 0);
  if (tok.size() != 2 || tok[0] != "tetmesh" || tok[1] != "1")
    throw ParseError("expected header 'tetmesh 1'", line_no);

  if (!next(tok) || tok.size() != 2 || tok[0] != "vertices")
    throw ParseError("expected 'vertices N'", line_no);
  const long nv = integer(tok[1]);
  if (nv <= 0) throw ParseError("vertex count must be positive", line_no);
  std::vector<Vec3> vertices;
  vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next(tok)) throw ParseError("unexpected end of file in vertex block", line_no);
    if (tok.size() != 3) throw ParseError("vertex line needs 3 coordinates", line_no);
    vertices.emplace_back(number(tok[0]), number(tok[1]), number(tok[2]));
  }

  if (!next(tok) || tok.size() != 2 || tok[0] != "cells")
    throw ParseError("expected 'cells M'", line_no);
  const long nc = integer(tok[1]);
  if (nc <= 0) throw ParseError("cell count must be positive", line_no);
  std::vector<std::array<int, 4>> cells;
  cells.reserve(nc);
  for (long i = 0; i < nc; ++i) {
    if (!next(tok)) throw ParseError("unexpected end of file in cell block", line_no);
    if (tok.size() != 4) throw ParseError("cell line needs 4 vertex indices", line_no);
    std::array<int, 4> c{};
    for (int j = 0; j < 4; ++j) {
      const long v = integer(tok[j]);
      if (v < 0 || v >= nv) throw ParseError("vertex index out of range: " + tok[j], line_no);
      c[j] = static_cast<int>(v);
    }
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (c[a] == c[b]) throw ParseError("cell repeats a vertex", line_no);
    cells.push_back(c);
  }
  if (next(tok)) throw ParseError("trailing content after cell block", line_no);
  return Mesh::from_cells(std::move(vertices), std::move(cells), options);
}

Mesh read_mesh(const std::filesystem::path& path, const MeshOptions& options) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open mesh file: " + path.string());
  return parse_mesh(in, options);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "tetmesh 1\n";
  out << "vertices " << mesh.vertices().size() << "\n";
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  out << "cells " << mesh.cells().size() << "\n";
  for (const auto& c : mesh.cells()) out << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
}

void write_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write mesh file: " + path.string());
  write_mesh(out, mesh);
}

std::vector<QuadPoint> face_quadrature_any(const Mesh& mesh, int face, int degree) {
  const TriangleRule& rule = triangle_rule(degree);
  const double area = mesh.face(face).area;
  std::vector<QuadPoint> pts;
  pts.reserve(rule.weights.size());
  for (std::size_t q = 0; q < rule.weights.size(); ++q)
    pts.push_back({mesh.face_point(face, rule.bary[q]), rule.weights[q] * area});
  return pts;
}

std::vector<QuadPoint> face_quadrature(const Mesh& mesh, int face, int degree) {
  if (degree != 1 && degree != 2)
    throw InvalidInput("unsupported face quadrature degree " + std::to_string(degree));
  return face_quadrature_any(mesh, face, degree);
}

std::vector<QuadPoint> cell_quadrature(const Mesh& mesh, int cell, int degree) {
  const TetrahedronRule& rule = tetrahedron_rule(degree);
  const double vol = mesh.volume(cell);
  std::vector<QuadPoint> pts;
  pts.reserve(rule.weights.size());
  for (std::size_t q = 0; q < rule.weights.size(); ++q)
    pts.push_back({mesh.point(cell, rule.bary[q]), rule.weights[q] * vol});
  return pts;
}

}  // namespace isoflow
