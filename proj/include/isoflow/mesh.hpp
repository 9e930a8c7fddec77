#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "isoflow/geometry.hpp"

namespace isoflow {

enum class FaceKind { interior, exterior };

/// Triangular face of the tetrahedral partition.
///
/// The owner is the lower-indexed adjacent cell and `normal` points from the
/// owner ("in" side) towards the neighbor ("out" side). Exterior faces have
/// neighbor == -1 and an outward normal.
struct Face {
  std::array<int, 3> vertex_ids{};
  int owner = -1;
  int neighbor = -1;
  Vec3 normal = Vec3::Zero();
  double area = 0.0;
  Vec3 centroid = Vec3::Zero();
  FaceKind kind = FaceKind::exterior;

  bool interior() const { return kind == FaceKind::interior; }
};

/// Axis-aligned box [lower, upper].
struct Box {
  Vec3 lower = Vec3::Zero();
  Vec3 upper = Vec3::Ones();

  double volume() const { return (upper - lower).prod(); }
  bool contains(const Vec3& x, double tol = 0.0) const {
    return (x.array() >= lower.array() - tol).all() && (x.array() <= upper.array() + tol).all();
  }
};

struct MeshOptions {
  /// Upper bound on cond(A_E) of the per-cell affine reference map.
  double shape_cap = 10.0;
};

/// Conforming tetrahedral mesh of a polyhedral domain. Immutable once built.
///
/// Cell E is the image of the reference tetrahedron co{0, e1, e2, e3} under
/// x = h A_E x_ref + a_E. Local face i of a cell is the face opposite its
/// local vertex i.
class Mesh {
 public:
  /// Builds connectivity and geometry; negatively oriented cells are
  /// reoriented. Throws ConformityError on non-conforming input and
  /// InvalidInput on degenerate cells or a violated shape cap.
  static Mesh from_cells(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> cells,
                         const MeshOptions& options = {});

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 4>>& cells() const { return cells_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(int f) const { return faces_[f]; }

  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_interior_faces() const { return static_cast<int>(interior_.size()); }

  /// Maximum cell diameter.
  double h() const { return h_; }
  double domain_volume() const { return domain_volume_; }

  double volume(int c) const { return volume_[c]; }
  const Vec3& centroid(int c) const { return centroid_[c]; }
  double diameter(int c) const { return diameter_[c]; }
  const Mat3& affine_matrix(int c) const { return affine_[c]; }
  const Vec3& affine_offset(int c) const { return vertices_[cells_[c][0]]; }
  /// cond(A_E) in the spectral norm.
  double shape_condition(int c) const { return condition_[c]; }
  double max_shape_condition() const;

  const std::array<int, 4>& cell_faces(int c) const { return cell_faces_[c]; }
  /// +1 when cell c owns its local face, -1 otherwise.
  double face_sign(int c, int local) const { return face_sign_[c][local]; }
  /// Cell across local face, or -1 on the boundary.
  int across(int c, int local) const;
  Vec3 outward_normal(int c, int local) const {
    return face_sign(c, local) * faces_[cell_faces_[c][local]].normal;
  }
  /// Gradients of the barycentric coordinates of cell c.
  const std::array<Vec3, 4>& grad_lambda(int c) const { return grad_lambda_[c]; }
  /// Barycentric coordinates of x with respect to cell c.
  std::array<double, 4> barycentric(int c, const Vec3& x) const;
  Vec3 point(int c, const std::array<double, 4>& bary) const;
  /// Physical point of a face given barycentric weights of its three vertices.
  Vec3 face_point(int f, const std::array<double, 3>& bary) const;

  std::span<const int> interior_faces() const { return interior_; }
  std::span<const int> exterior_faces() const { return exterior_; }
  /// Position of face f in interior_faces(), or -1 for exterior faces.
  int interior_index(int f) const { return interior_index_[f]; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> cells_;
  std::vector<Face> faces_;
  std::vector<std::array<int, 4>> cell_faces_;
  std::vector<std::array<double, 4>> face_sign_;
  std::vector<std::array<Vec3, 4>> grad_lambda_;
  std::vector<double> volume_;
  std::vector<Vec3> centroid_;
  std::vector<double> diameter_;
  std::vector<Mat3> affine_;
  std::vector<double> condition_;
  std::vector<int> interior_;
  std::vector<int> exterior_;
  std::vector<int> interior_index_;
  double h_ = 0.0;
  double domain_volume_ = 0.0;
};

/// Kuhn subdivision of an n[0] x n[1] x n[2] hexahedral grid of `box` into
/// 6 n[0] n[1] n[2] tetrahedra.
Mesh build_box_mesh(const Box& box, std::array<int, 3> n, const MeshOptions& options = {});

/// ASCII mesh format:
///   tetmesh 1
///   vertices N
///   x y z            (N lines)
///   cells M
///   i j k l          (M lines, zero-based vertex indices)
/// Tokens are whitespace-delimited; '#' starts a comment.
Mesh read_mesh(const std::filesystem::path& path, const MeshOptions& options = {});
Mesh parse_mesh(std::istream& in, const MeshOptions& options = {});
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh(const std::filesystem::path& path, const Mesh& mesh);

/// Quadrature point on a face or cell, with the weight already scaled by the
/// measure.
struct QuadPoint {
  Vec3 point;
  double weight;
};

/// Face rule exact for polynomials of total degree `degree` (1 or 2).
/// Throws InvalidInput for other degrees.
std::vector<QuadPoint> face_quadrature(const Mesh& mesh, int face, int degree);

/// Same as face_quadrature but accepting any degree >= 1.
std::vector<QuadPoint> face_quadrature_any(const Mesh& mesh, int face, int degree);
std::vector<QuadPoint> cell_quadrature(const Mesh& mesh, int cell, int degree);

}  // namespace isoflow
