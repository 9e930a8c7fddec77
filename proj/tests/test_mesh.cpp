#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "isoflow/error.hpp"
#include "isoflow/mesh.hpp"

using namespace isoflow;

namespace {

Mesh unit_cube(int n) { return build_box_mesh(Box{}, {n, n, n}); }

// Concatenates two meshes, merging coincident vertices.
Mesh glue(const Mesh& a, const Mesh& b) {
  std::map<std::array<long long, 3>, int> index;
  std::vector<Vec3> verts;
  std::vector<std::array<int, 4>> cells;
  auto id = [&](const Vec3& x) {
    std::array<long long, 3> key{std::llround(x[0] * 1e9), std::llround(x[1] * 1e9),
                                 std::llround(x[2] * 1e9)};
    auto [it, fresh] = index.emplace(key, static_cast<int>(verts.size()));
    if (fresh) verts.push_back(x);
    return it->second;
  };
  for (const Mesh* m : {&a, &b})
    for (const auto& c : m->cells())
      cells.push_back({id(m->vertices()[c[0]]), id(m->vertices()[c[1]]),
                       id(m->vertices()[c[2]]), id(m->vertices()[c[3]])});
  return Mesh::from_cells(verts, cells);
}

std::set<std::array<int, 3>> face_set(const Mesh& m) {
  std::set<std::array<int, 3>> s;
  for (const auto& f : m.faces()) {
    auto v = f.vertex_ids;
    std::sort(v.begin(), v.end());
    s.insert(v);
  }
  return s;
}

}  // namespace

TEST_CASE("single-cube Kuhn mesh counts") {
  const Mesh m = unit_cube(1);
  CHECK(m.num_cells() == 6);
  CHECK(m.num_faces() == 18);
  CHECK(m.num_interior_faces() == 6);
  CHECK(m.exterior_faces().size() == 12);
  CHECK(m.domain_volume() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(unit_cube(2).num_cells() == 48);
}

TEST_CASE("face counts, volume and shape regularity across refinements") {
  for (int n : {1, 2, 3, 4}) {
    const Mesh m = unit_cube(n);
    const int ext = static_cast<int>(m.exterior_faces().size());
    CHECK(4 * m.num_cells() == 2 * m.num_interior_faces() + ext);
    CHECK(ext == 12 * n * n);
    double vol = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
      CHECK(m.volume(c) > 0.0);
      vol += m.volume(c);
    }
    CHECK(std::abs(vol - 1.0) <= 1e-12);
    CHECK(m.max_shape_condition() <= 10.0);
    CHECK(m.h() == doctest::Approx(std::sqrt(3.0) / n).epsilon(1e-14));
  }
}

TEST_CASE("refinement halves h") {
  for (int n : {1, 2, 4}) CHECK(std::abs(unit_cube(2 * n).h() / unit_cube(n).h() - 0.5) <= 1e-12);
}

TEST_CASE("faces are oriented from owner to neighbor with unit normals") {
  const Mesh m = build_box_mesh(Box{Vec3(-1, 0, 0), Vec3(1, 0.5, 2)}, {3, 2, 4});
  for (int f = 0; f < m.num_faces(); ++f) {
    const Face& face = m.face(f);
    CHECK(std::abs(face.normal.norm() - 1.0) <= 1e-14);
    const Vec3 d = face.centroid - m.centroid(face.owner);
    CHECK(d.dot(face.normal) > 0.0);
    if (face.interior()) {
      CHECK(face.owner < face.neighbor);
      CHECK((m.centroid(face.neighbor) - face.centroid).dot(face.normal) > 0.0);
    } else {
      CHECK(face.neighbor == -1);
      CHECK(m.interior_index(f) == -1);
    }
  }
}

TEST_CASE("discrete divergence theorem for constant vectors") {
  const Mesh m = unit_cube(3);
  const Vec3 c(0.3, -1.7, 2.2);
  for (int e = 0; e < m.num_cells(); ++e) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += m.face(m.cell_faces(e)[i]).area * c.dot(m.outward_normal(e, i));
    CHECK(std::abs(s) <= 1e-13);
  }
}

TEST_CASE("cell geometry: barycentrics, affine map and gradients") {
  const Mesh m = unit_cube(2);
  for (int e = 0; e < m.num_cells(); ++e) {
    const auto b = m.barycentric(e, m.centroid(e));
    for (double x : b) CHECK(x == doctest::Approx(0.25));
    const auto& g = m.grad_lambda(e);
    CHECK((g[0] + g[1] + g[2] + g[3]).norm() <= 1e-12);
    // x = h A x_ref + a maps reference vertex e1 to the second cell vertex.
    const Vec3 x1 = m.h() * m.affine_matrix(e) * Vec3::UnitX() + m.affine_offset(e);
    CHECK((x1 - m.vertices()[m.cells()[e][1]]).norm() <= 1e-14);
  }
}

TEST_CASE("mesh file round trip") {
  const Mesh m = unit_cube(1);
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = parse_mesh(ss);
  CHECK(r.num_cells() == 6);
  CHECK(r.num_faces() == m.num_faces());
  CHECK(face_set(r) == face_set(m));
  CHECK(r.vertices() == m.vertices());
}

TEST_CASE("mesh parser errors") {
  std::stringstream empty;
  CHECK_THROWS_AS(parse_mesh(empty), ParseError);
  std::stringstream bad("tetmesh 1\nvertices 2\n0 0 0\n1 x 0\n");
  try {
    parse_mesh(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  std::stringstream range(
      "tetmesh 1 # comment\nvertices 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\ncells 1\n0 1 2 7\n");
  CHECK_THROWS_AS(parse_mesh(range), ParseError);
  std::stringstream ok("tetmesh 1\n# single cell\nvertices 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\ncells 1\n0 2 1 3\n");
  const Mesh one = parse_mesh(ok);
  CHECK(one.num_cells() == 1);
  CHECK(one.volume(0) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("non-conforming inputs are rejected") {
  // A coarse cube next to a refined one: the refined side has a hanging vertex
  // at the centre of the shared square.
  const Mesh coarse = build_box_mesh(Box{Vec3(0, 0, 0), Vec3(1, 1, 1)}, {1, 1, 1});
  const Mesh fine = build_box_mesh(Box{Vec3(1, 0, 0), Vec3(2, 1, 1)}, {2, 2, 2});
  CHECK_THROWS_AS(glue(coarse, fine), ConformityError);
  // Conforming neighbour for comparison.
  const Mesh other = build_box_mesh(Box{Vec3(1, 0, 0), Vec3(2, 1, 1)}, {1, 1, 1});
  const Mesh joined = glue(coarse, other);
  CHECK(joined.num_cells() == 12);
  CHECK(joined.domain_volume() == doctest::Approx(2.0));
  // Three cells on one face.
  std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1),
                      Vec3(0, 0, -1), Vec3(1, 1, 1)};
  CHECK_THROWS_AS(Mesh::from_cells(v, {{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 2, 5}}), ConformityError);
}

TEST_CASE("degenerate input is rejected") {
  CHECK_THROWS_AS(build_box_mesh(Box{Vec3(0, 0, 0), Vec3(1, 0, 1)}, {1, 1, 1}), InvalidInput);
  CHECK_THROWS_AS(build_box_mesh(Box{}, {0, 1, 1}), InvalidInput);
  std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0, 0, 1)};
  CHECK_THROWS_AS(Mesh::from_cells(v, {{0, 1, 2, 3}}), InvalidInput);
  // Strongly anisotropic cells violate the default shape cap.
  CHECK_THROWS_AS(build_box_mesh(Box{Vec3(0, 0, 0), Vec3(100, 1, 1)}, {1, 1, 1}), InvalidInput);
}

TEST_CASE("face quadrature") {
  // Unit right triangle in the plane z = 0.
  std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  const Mesh m = Mesh::from_cells(v, {{0, 1, 2, 3}});
  int tri = -1;
  for (int f = 0; f < m.num_faces(); ++f)
    if (std::abs(m.face(f).centroid.z()) < 1e-15) tri = f;
  REQUIRE(tri >= 0);
  const auto q1 = face_quadrature(m, tri, 1);
  REQUIRE(q1.size() == 1);
  CHECK(q1[0].weight == doctest::Approx(0.5));
  CHECK((q1[0].point - Vec3(1.0 / 3, 1.0 / 3, 0)).norm() < 1e-15);
  const auto q2 = face_quadrature(m, tri, 2);
  REQUIRE(q2.size() == 3);
  double integral = 0.0;
  for (const auto& q : q2) {
    CHECK(q.weight == doctest::Approx(0.5 / 3));
    integral += q.weight * (q.point.x() + q.point.y());
  }
  CHECK(integral == doctest::Approx(1.0 / 3).epsilon(1e-15));
  double x2 = 0.0;
  for (const auto& q : q2) x2 += q.weight * q.point.x() * q.point.x();
  CHECK(x2 == doctest::Approx(1.0 / 12));
  CHECK_THROWS_AS(face_quadrature(m, tri, 3), InvalidInput);
  CHECK(face_quadrature_any(m, tri, 5).size() > 3);
}
