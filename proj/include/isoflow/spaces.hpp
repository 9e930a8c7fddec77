#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

#include "isoflow/error.hpp"
#include "isoflow/geometry.hpp"
#include "isoflow/mesh.hpp"
#include "isoflow/quadrature.hpp"

namespace isoflow {

namespace detail {
template <class T>
T zero() {
  if constexpr (std::is_arithmetic_v<T>) return T{0};
  else return T::Zero();
}
}  // namespace detail

/// Piecewise-constant field: one value per cell.
template <class T>
class CellField {
 public:
  using value_type = T;

  CellField() = default;
  explicit CellField(int cells) : values_(static_cast<std::size_t>(cells), detail::zero<T>()) {}
  CellField(int cells, const T& fill) : values_(static_cast<std::size_t>(cells), fill) {}
  explicit CellField(std::vector<T> values) : values_(std::move(values)) {}

  int size() const { return static_cast<int>(values_.size()); }
  T& operator[](int c) { return values_[c]; }
  const T& operator[](int c) const { return values_[c]; }
  std::vector<T>& values() { return values_; }
  const std::vector<T>& values() const { return values_; }

  bool operator==(const CellField& o) const { return values_ == o.values_; }

 private:
  std::vector<T> values_;
};

using QScalar = CellField<double>;
using QVector = CellField<Vec3>;
using QTensor = CellField<Mat3>;

/// Crouzeix-Raviart vector field: per cell affine, one 3-vector per face equal
/// to the face mean. A field in V_{0,h} has zero exterior DOFs.
///
/// On cell E the basis function of local face i is 1 - 3 lambda_i, where
/// lambda_i is the barycentric coordinate of the opposite vertex.
class CRField {
 public:
  CRField() = default;
  explicit CRField(const Mesh& mesh) : dofs_(mesh.num_faces(), Vec3::Zero()) {}

  int size() const { return static_cast<int>(dofs_.size()); }
  Vec3& operator[](int f) { return dofs_[f]; }
  const Vec3& operator[](int f) const { return dofs_[f]; }
  const std::vector<Vec3>& dofs() const { return dofs_; }

  /// Value of the affine representative on `cell` at barycentric point.
  Vec3 value(const Mesh& mesh, int cell, const std::array<double, 4>& bary) const {
    Vec3 v = Vec3::Zero();
    const auto& fs = mesh.cell_faces(cell);
    for (int i = 0; i < 4; ++i) v += (1.0 - 3.0 * bary[i]) * dofs_[fs[i]];
    return v;
  }
  Vec3 value(const Mesh& mesh, int cell, const Vec3& x) const {
    return value(mesh, cell, mesh.barycentric(cell, x));
  }

  /// True when every exterior DOF is exactly zero (V_{0,h} membership).
  bool has_zero_trace(const Mesh& mesh) const;
  void zero_exterior(const Mesh& mesh);

  bool operator==(const CRField& o) const { return dofs_ == o.dofs_; }

 private:
  std::vector<Vec3> dofs_;
};

/// Gradient of the CR basis function of local face i on cell c (constant).
inline Vec3 cr_basis_gradient(const Mesh& mesh, int c, int i) {
  return -3.0 * mesh.grad_lambda(c)[i];
}

/// Cell average by the degree-2 cell rule. Equal-weight points are summed
/// pairwise, so constants are reproduced bit for bit.
template <class F>
auto cell_mean(const Mesh& mesh, int c, F&& f) {
  const TetrahedronRule& rule = tetrahedron_rule(2);
  using R = std::decay_t<decltype(f(std::declval<const Vec3&>()))>;
  std::array<R, 4> v;
  for (int q = 0; q < 4; ++q) v[q] = f(mesh.point(c, rule.bary[q]));
  R sum = (v[0] + v[1]) + (v[2] + v[3]);
  return R(sum * 0.25);
}

/// Pi^Q: cell averages of f (degree-2 cell quadrature).
template <class F>
auto project_Q(const Mesh& mesh, F&& f) {
  using R = std::decay_t<decltype(cell_mean(mesh, 0, f))>;
  CellField<R> out(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) out[c] = cell_mean(mesh, c, f);
  return out;
}

enum class Boundary { zero, keep };

/// Pi^V: face means of f (degree-2 face quadrature). With Boundary::zero the
/// exterior DOFs are cleared, giving a V_{0,h} field.
CRField project_V(const Mesh& mesh, const std::function<Vec3(const Vec3&)>& f,
                  Boundary boundary = Boundary::zero);

/// Pi^Q of a CR field: the mean of the four face DOFs on each cell.
QVector cell_average(const Mesh& mesh, const CRField& v);

/// Per-cell gradient, entry (a, b) = d v_a / d x_b.
QTensor broken_grad(const Mesh& mesh, const CRField& v);
QScalar broken_div(const Mesh& mesh, const CRField& v);

/// In/out traces at the points of a face rule. On exterior faces only the
/// inner trace exists; out(), jump() and average() throw InvalidInput.
template <class T>
class FaceTracePair {
 public:
  FaceTracePair(std::vector<T> in, std::vector<T> out, bool interior)
      : in_(std::move(in)), out_(std::move(out)), interior_(interior) {}

  bool interior() const { return interior_; }
  int points() const { return static_cast<int>(in_.size()); }
  const std::vector<T>& in() const { return in_; }
  const std::vector<T>& out() const {
    require_interior();
    return out_;
  }
  /// v^out - v^in at point q.
  T jump(int q) const {
    require_interior();
    return T(out_[q] - in_[q]);
  }
  /// (v^out + v^in) / 2 at point q.
  T average(int q) const {
    require_interior();
    return T(0.5 * (out_[q] + in_[q]));
  }

 private:
  void require_interior() const {
    if (!interior_) throw InvalidInput("outer trace requested on an exterior face");
  }
  std::vector<T> in_, out_;
  bool interior_;
};

FaceTracePair<double> traces(const Mesh& mesh, const QScalar& v, int face, int degree = 2);
FaceTracePair<Vec3> traces(const Mesh& mesh, const QVector& v, int face, int degree = 2);
FaceTracePair<Vec3> traces(const Mesh& mesh, const CRField& v, int face, int degree = 2);

/// Mean of a CR field over a face, computed from the owner-side trace.
Vec3 face_average_in(const Mesh& mesh, const CRField& v, int face);

enum class NormKind { lp, broken_h1, face_jump };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// ||v||_{L^p}; p >= 1 or kInfinity.
double lp_norm(const Mesh& mesh, const QScalar& v, double p);
double lp_norm(const Mesh& mesh, const QVector& v, double p);
/// Quadrature of |v|^p on each cell; exact for even integer p.
double lp_norm(const Mesh& mesh, const CRField& v, double p);
/// ||v||_{L^p(E)} restricted to one cell.
double lp_norm_cell(const Mesh& mesh, const CRField& v, int cell, double p);

/// ||grad_h v||_{L^2}.
double broken_h1_seminorm(const Mesh& mesh, const CRField& v);

/// (sum over interior faces of int_Gamma [[v]]^2 / h)^(1/2).
double face_jump_seminorm(const Mesh& mesh, const QScalar& v);

/// Dispatching front end. Accepted exponents: p >= 1 (including gamma) or
/// kInfinity for kind lp; kind broken_h1 and face_jump require p == 2.
double broken_norm(const Mesh& mesh, const QScalar& v, NormKind kind, double p);
double broken_norm(const Mesh& mesh, const CRField& v, NormKind kind, double p);

}  // namespace isoflow
