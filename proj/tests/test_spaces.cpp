#include <random>

#include "doctest.h"
#include "isoflow/error.hpp"
#include "isoflow/spaces.hpp"

using namespace isoflow;

namespace {

Mesh unit_cube(int n) { return build_box_mesh(Box{}, {n, n, n}); }

CRField random_cr(const Mesh& m, unsigned seed, bool zero_boundary = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  CRField v(m);
  for (int f = 0; f < m.num_faces(); ++f) v[f] = Vec3(d(rng), d(rng), d(rng));
  if (zero_boundary) v.zero_exterior(m);
  return v;
}

}  // namespace

TEST_CASE("Pi^Q: constants, affine functions and the x^2 integral") {
  const Mesh m = unit_cube(2);
  const QScalar c = project_Q(m, [](const Vec3&) { return 2.5; });
  for (double x : c.values()) CHECK(x == 2.5);
  const QScalar a = project_Q(m, [](const Vec3& x) { return 1.0 + 2 * x[0] - x[1] + 0.5 * x[2]; });
  for (int e = 0; e < m.num_cells(); ++e) {
    const Vec3& x = m.centroid(e);
    CHECK(a[e] == doctest::Approx(1.0 + 2 * x[0] - x[1] + 0.5 * x[2]).epsilon(1e-14));
  }
  const Mesh one = unit_cube(1);
  const QScalar sq = project_Q(one, [](const Vec3& x) { return x[0] * x[0]; });
  double integral = 0.0;
  for (int e = 0; e < one.num_cells(); ++e) integral += one.volume(e) * sq[e];
  CHECK(integral == doctest::Approx(1.0 / 3).epsilon(1e-14));
  const QVector vec = project_Q(m, [](const Vec3& x) { return Vec3(x[0], 1.0, -x[2]); });
  CHECK(vec[0][1] == 1.0);
}

TEST_CASE("Pi^Q reproduces piecewise constants bit for bit") {
  const Mesh m = unit_cube(3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  for (int e = 0; e < m.num_cells(); ++e) {
    const double value = d(rng) * 1.000000000000123;
    CHECK(cell_mean(m, e, [&](const Vec3&) { return value; }) == value);
  }
}

TEST_CASE("Pi^V reproduces affine fields") {
  const Mesh m = unit_cube(2);
  Mat3 B;
  B << 1, 2, 3, -1, 0.5, 0, 2, -2, 1;
  const Vec3 c(0.1, -0.2, 0.3);
  auto f = [&](const Vec3& x) -> Vec3 { return B * x + c; };
  const CRField v = project_V(m, f, Boundary::keep);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double err = 0.0;
  for (int e = 0; e < m.num_cells(); ++e) {
    std::array<double, 4> b{u(rng), u(rng), u(rng), u(rng)};
    const double s = b[0] + b[1] + b[2] + b[3];
    for (double& x : b) x /= s;
    err = std::max(err, (v.value(m, e, b) - f(m.point(e, b))).cwiseAbs().maxCoeff());
  }
  CHECK(err <= 1e-13);
  const QTensor g = broken_grad(m, v);
  for (int e = 0; e < m.num_cells(); ++e) CHECK((g[e] - B).cwiseAbs().maxCoeff() <= 1e-12);
  const QScalar dv = broken_div(m, v);
  for (int e = 0; e < m.num_cells(); ++e) CHECK(dv[e] == doctest::Approx(B.trace()).epsilon(1e-12));
  const CRField z = project_V(m, [](const Vec3&) { return Vec3::Zero(); });
  CHECK(z.has_zero_trace(m));
  CHECK(lp_norm(m, z, 2.0) == 0.0);
  const CRField zero_bc = project_V(m, f);
  CHECK(zero_bc.has_zero_trace(m));
}

TEST_CASE("discrete divergence theorem for V_0h fields") {
  const Mesh m = unit_cube(3);
  const CRField v = random_cr(m, 11);
  const QScalar d = broken_div(m, v);
  double total = 0.0;
  for (int e = 0; e < m.num_cells(); ++e) total += m.volume(e) * d[e];
  CHECK(std::abs(total) <= 1e-13);
  // Oracle: per-cell face sums of |Gamma| v . n_out.
  for (int e = 0; e < m.num_cells(); ++e) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
      const int f = m.cell_faces(e)[i];
      s += m.face(f).area * v[f].dot(m.outward_normal(e, i));
    }
    CHECK(s == doctest::Approx(m.volume(e) * d[e]).epsilon(1e-12));
  }
}

TEST_CASE("cell_average equals the cell mean of the affine representative") {
  const Mesh m = unit_cube(2);
  const CRField v = random_cr(m, 2, false);
  const QVector avg = cell_average(m, v);
  for (int e = 0; e < m.num_cells(); ++e)
    CHECK((avg[e] - v.value(m, e, m.centroid(e))).norm() <= 1e-14);
}

TEST_CASE("traces, jumps and averages") {
  const Mesh m = unit_cube(1);
  const int f = m.interior_faces()[0];
  QScalar q(m.num_cells(), 0.0);
  q[m.face(f).owner] = 1.0;
  q[m.face(f).neighbor] = 3.0;
  const auto tr = traces(m, q, f);
  for (int i = 0; i < tr.points(); ++i) {
    CHECK(tr.jump(i) == 2.0);
    CHECK(tr.average(i) == 2.0);
    CHECK(tr.jump(i) + 2 * tr.in()[i] == 2 * tr.average(i));
  }
  const QScalar c(m.num_cells(), 4.0);
  const auto tc = traces(m, c, f);
  CHECK(tc.jump(0) == 0.0);
  CHECK(tc.average(0) == 4.0);
  const auto ext = traces(m, c, m.exterior_faces()[0]);
  CHECK_FALSE(ext.interior());
  CHECK_THROWS_AS(ext.out(), InvalidInput);
  CHECK_THROWS_AS(ext.jump(0), InvalidInput);

  const Mesh m2 = unit_cube(2);
  const CRField v = random_cr(m2, 3);
  const auto& rule = triangle_rule(2);
  for (int g : m2.interior_faces()) {
    const auto t = traces(m2, v, g);
    Vec3 in = Vec3::Zero(), out = Vec3::Zero();
    for (int i = 0; i < t.points(); ++i) {
      in += rule.weights[i] * t.in()[i];
      out += rule.weights[i] * t.out()[i];
      CHECK((t.jump(i) + 2 * t.in()[i] - 2 * t.average(i)).norm() <= 1e-14);
    }
    CHECK((in - out).norm() <= 1e-13);
    CHECK((in - v[g]).norm() <= 1e-13);
  }
}

TEST_CASE("broken norms") {
  const Mesh m = unit_cube(2);
  const QScalar c(m.num_cells(), -3.0);
  CHECK(lp_norm(m, c, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(lp_norm(m, c, 1.4) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(lp_norm(m, c, kInfinity) == 3.0);
  CHECK(face_jump_seminorm(m, c) == 0.0);
  CHECK_THROWS_AS(lp_norm(m, c, 0.5), InvalidInput);
  CHECK_THROWS_AS(broken_norm(m, c, NormKind::face_jump, 3.0), InvalidInput);

  const CRField k = project_V(m, [](const Vec3&) { return Vec3(3.0, 0.0, 4.0); }, Boundary::keep);
  CHECK(lp_norm(m, k, 2.0) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(lp_norm(m, k, 6.0) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(lp_norm(m, k, kInfinity) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(broken_h1_seminorm(m, k) <= 1e-12);

  // ||x||_{L^2} of the affine field (x, 0, 0): sqrt(1/3).
  const CRField x = project_V(m, [](const Vec3& p) { return Vec3(p[0], 0, 0); }, Boundary::keep);
  CHECK(lp_norm(m, x, 2.0) == doctest::Approx(std::sqrt(1.0 / 3)).epsilon(1e-13));
  CHECK(broken_norm(m, x, NormKind::broken_h1, 2.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(broken_norm(m, x, NormKind::face_jump, 2.0) <= 1e-12);
  // ||x||_{L^4}^4 = 1/5
  CHECK(lp_norm(m, x, 4.0) == doctest::Approx(std::pow(0.2, 0.25)).epsilon(1e-13));
}
