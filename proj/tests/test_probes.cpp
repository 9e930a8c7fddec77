#include <cmath>

#include "doctest.h"
#include "isoflow/diagnostics.hpp"
#include "isoflow/error.hpp"
#include "isoflow/probes.hpp"

using namespace isoflow;

TEST_CASE("inverse estimate probe: single-cell spike value") {
  // Kuhn cells have |E| = 1/(6 n^3) and h = sqrt(3)/n, so the spike gives
  // ||v||_inf / (h^{-3/2} ||v||_2) = sqrt(h^3 / |E|) = sqrt(6 * 3^{3/2}).
  const Mesh m = build_box_mesh(Box{}, {3, 3, 3});
  CHECK(inverse_constant(m, kInfinity, 2.0, 1) ==
        doctest::Approx(std::sqrt(6.0 * std::pow(3.0, 1.5))).epsilon(1e-12));
  CHECK(inverse_constant(m, 2.0, 2.0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(inverse_constant(m, 1.0, 2.0, 1), InvalidInput);
}

TEST_CASE("trace and Poincare probes against direct evaluation") {
  const Mesh m = build_box_mesh(Box{Vec3(0, 0, 0), Vec3(1, 2, 1)}, {2, 3, 2});
  double worst = 0.0;
  for (int c = 0; c < m.num_cells(); ++c)
    for (int f : m.cell_faces(c))
      worst = std::max(worst, std::sqrt(m.face(f).area * m.h() / m.volume(c)));
  CHECK(trace_constant(m, 2.0) == doctest::Approx(worst).epsilon(1e-13));
  CHECK(trace_constant(m, kInfinity) == 1.0);

  // Any affine field stays below the exact per-cell supremum.
  const double cp = poincare_constant(m);
  const CRField v = project_V(m, [](const Vec3& x) { return Vec3(x[0] + 2 * x[1], -x[2], 3 * x[0]); },
                              Boundary::keep);
  const QVector mean = cell_average(m, v);
  const QTensor g = broken_grad(m, v);
  for (int c = 0; c < m.num_cells(); ++c) {
    double dev = 0.0;
    for (const auto& q : cell_quadrature(m, c, 2))
      dev += q.weight * (v.value(m, c, m.barycentric(c, q.point)) - mean[c]).squaredNorm();
    const double grad = m.volume(c) * g[c].squaredNorm();
    CHECK(std::sqrt(dev / grad) / m.h() <= cp * (1 + 1e-12));
  }
}

TEST_CASE("probe constants are stable under refinement") {
  for (const auto& s : run_inequality_probes({2, 4}, 7)) {
    CAPTURE(s.name);
    CHECK(s.constants.size() == 2);
    CHECK(s.variation() < 0.25);
  }
}

TEST_CASE("projection error decays at least linearly") {
  std::vector<double> h, e;
  for (int n : {2, 4, 8}) {
    const Mesh m = build_box_mesh(Box{}, {n, n, n});
    h.push_back(m.h());
    e.push_back(projection_error(m, projection_sample_field));
  }
  const LogLogFit fit = loglog_fit(h, e);
  CHECK(fit.slope >= 1.0);
  CHECK(fit.r2 >= 0.95);
  // affine fields are reproduced
  const Mesh m = build_box_mesh(Box{}, {2, 2, 2});
  CHECK(projection_error(m, [](const Vec3& x) { return Vec3(x[0] - x[2], 1.0, 2 * x[1]); }) <= 1e-13);
}
