#include "isoflow/spaces.hpp"

#include <algorithm>
#include <cmath>

namespace isoflow {

bool CRField::has_zero_trace(const Mesh& mesh) const {
  for (int f : mesh.exterior_faces())
    if (dofs_[f] != Vec3::Zero()) return false;
  return true;
}

void CRField::zero_exterior(const Mesh& mesh) {
  for (int f : mesh.exterior_faces()) dofs_[f].setZero();
}

CRField project_V(const Mesh& mesh, const std::function<Vec3(const Vec3&)>& f,
                  Boundary boundary) {
  CRField out(mesh);
  const TriangleRule& rule = triangle_rule(2);
  for (int i = 0; i < mesh.num_faces(); ++i) {
    Vec3 sum = Vec3::Zero();
    for (std::size_t q = 0; q < rule.weights.size(); ++q)
      sum += rule.weights[q] * f(mesh.face_point(i, rule.bary[q]));
    out[i] = sum;
  }
  if (boundary == Boundary::zero) out.zero_exterior(mesh);
  return out;
}

QVector cell_average(const Mesh& mesh, const CRField& v) {
  QVector out(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& fs = mesh.cell_faces(c);
    out[c] = 0.25 * ((v[fs[0]] + v[fs[1]]) + (v[fs[2]] + v[fs[3]]));
  }
  return out;
}

QTensor broken_grad(const Mesh& mesh, const CRField& v) {
  QTensor out(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Mat3 g = Mat3::Zero();
    const auto& fs = mesh.cell_faces(c);
    for (int i = 0; i < 4; ++i) g += v[fs[i]] * cr_basis_gradient(mesh, c, i).transpose();
    out[c] = g;
  }
  return out;
}

QScalar broken_div(const Mesh& mesh, const CRField& v) {
  QScalar out(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    double d = 0.0;
    const auto& fs = mesh.cell_faces(c);
    for (int i = 0; i < 4; ++i) d += v[fs[i]].dot(cr_basis_gradient(mesh, c, i));
    out[c] = d;
  }
  return out;
}

namespace {

template <class T>
FaceTracePair<T> constant_traces(const Mesh& mesh, const CellField<T>& v, int face,
                                 int degree) {
  const Face& f = mesh.face(face);
  const int points = static_cast<int>(triangle_rule(degree).weights.size());
  std::vector<T> in(points, v[f.owner]);
  std::vector<T> out;
  if (f.interior()) out.assign(points, v[f.neighbor]);
  return FaceTracePair<T>(std::move(in), std::move(out), f.interior());
}

void check_exponent(double p) {
  if (!(p >= 1.0)) throw InvalidInput("unsupported norm exponent " + std::to_string(p));
}

// Quadrature degree for |v|^p with v affine on a cell.
int power_degree(double p) {
  const double r = std::round(p);
  if (r == p && static_cast<int>(r) % 2 == 0) return static_cast<int>(r);
  return 8;
}

double finish(double sum, double p) { return std::pow(sum, 1.0 / p); }

}  // namespace

FaceTracePair<double> traces(const Mesh& mesh, const QScalar& v, int face, int degree) {
  return constant_traces(mesh, v, face, degree);
}

FaceTracePair<Vec3> traces(const Mesh& mesh, const QVector& v, int face, int degree) {
  return constant_traces(mesh, v, face, degree);
}

FaceTracePair<Vec3> traces(const Mesh& mesh, const CRField& v, int face, int degree) {
  const Face& f = mesh.face(face);
  const TriangleRule& rule = triangle_rule(degree);
  std::vector<Vec3> in, out;
  for (const auto& b : rule.bary) {
    const Vec3 x = mesh.face_point(face, b);
    in.push_back(v.value(mesh, f.owner, x));
    if (f.interior()) out.push_back(v.value(mesh, f.neighbor, x));
  }
  return FaceTracePair<Vec3>(std::move(in), std::move(out), f.interior());
}

Vec3 face_average_in(const Mesh& mesh, const CRField& v, int face) {
  const Face& f = mesh.face(face);
  return v.value(mesh, f.owner, f.centroid);
}

double lp_norm(const Mesh& mesh, const QScalar& v, double p) {
  check_exponent(p);
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v.values()) m = std::max(m, std::abs(x));
    return m;
  }
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) sum += mesh.volume(c) * std::pow(std::abs(v[c]), p);
  return finish(sum, p);
}

double lp_norm(const Mesh& mesh, const QVector& v, double p) {
  QScalar mag(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) mag[c] = v[c].norm();
  return lp_norm(mesh, mag, p);
}

double lp_norm_cell(const Mesh& mesh, const CRField& v, int cell, double p) {
  check_exponent(p);
  if (std::isinf(p)) {
    // The maximum of an affine function sits at a vertex.
    double m = 0.0;
    for (int i = 0; i < 4; ++i) {
      std::array<double, 4> b{0.0, 0.0, 0.0, 0.0};
      b[i] = 1.0;
      m = std::max(m, v.value(mesh, cell, b).norm());
    }
    return m;
  }
  const TetrahedronRule& rule = tetrahedron_rule(power_degree(p));
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.weights.size(); ++q)
    sum += rule.weights[q] * std::pow(v.value(mesh, cell, rule.bary[q]).norm(), p);
  return finish(mesh.volume(cell) * sum, p);
}

double lp_norm(const Mesh& mesh, const CRField& v, double p) {
  check_exponent(p);
  if (std::isinf(p)) {
    double m = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) m = std::max(m, lp_norm_cell(mesh, v, c, p));
    return m;
  }
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) sum += std::pow(lp_norm_cell(mesh, v, c, p), p);
  return finish(sum, p);
}

double broken_h1_seminorm(const Mesh& mesh, const CRField& v) {
  const QTensor g = broken_grad(mesh, v);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) sum += mesh.volume(c) * g[c].squaredNorm();
  return std::sqrt(sum);
}

double face_jump_seminorm(const Mesh& mesh, const QScalar& v) {
  double sum = 0.0;
  for (int f : mesh.interior_faces()) {
    const Face& face = mesh.face(f);
    const double j = v[face.neighbor] - v[face.owner];
    sum += face.area * j * j;
  }
  return std::sqrt(sum / mesh.h());
}

namespace {
void require_two(NormKind kind, double p) {
  if (kind != NormKind::lp && p != 2.0)
    throw InvalidInput("broken-H1 and face-jump seminorms are defined for p = 2 only");
}
}  // namespace

double broken_norm(const Mesh& mesh, const QScalar& v, NormKind kind, double p) {
  require_two(kind, p);
  switch (kind) {
    case NormKind::lp: return lp_norm(mesh, v, p);
    case NormKind::broken_h1: return 0.0;  // piecewise constants have zero broken gradient
    case NormKind::face_jump: return face_jump_seminorm(mesh, v);
  }
  return 0.0;
}

double broken_norm(const Mesh& mesh, const CRField& v, NormKind kind, double p) {
  require_two(kind, p);
  switch (kind) {
    case NormKind::lp: return lp_norm(mesh, v, p);
    case NormKind::broken_h1: return broken_h1_seminorm(mesh, v);
    case NormKind::face_jump: {
      double sum = 0.0;
      for (int f : mesh.interior_faces()) {
        const auto tr = traces(mesh, v, f, 2);
        const auto& rule = triangle_rule(2);
        double s = 0.0;
        for (int q = 0; q < tr.points(); ++q) s += rule.weights[q] * tr.jump(q).squaredNorm();
        sum += mesh.face(f).area * s;
      }
      return std::sqrt(sum / mesh.h());
    }
  }
  return 0.0;
}

}  // namespace isoflow
