#include <cmath>
#include <random>

#include "doctest.h"
#include "isoflow/error.hpp"
#include "isoflow/manufactured.hpp"

using namespace isoflow;

TEST_CASE("jet derivatives of a composite expression") {
  // f = exp(x y) sin(t) / (1 + z^2) + (x + 1)^1.5 cos(y)
  auto f = [](const std::array<double, 4>& z) {
    return std::exp(z[1] * z[2]) * std::sin(z[0]) / (1 + z[3] * z[3]) +
           std::pow(z[1] + 1, 1.5) * std::cos(z[2]);
  };
  const std::array<double, 4> z0{0.3, 0.7, -0.4, 1.2};
  std::array<Jet, 4> v;
  for (int i = 0; i < 4; ++i) v[i] = Jet::variable(i, z0[i]);
  const Jet j = exp(v[1] * v[2]) * sin(v[0]) / (Jet(1.0) + v[3] * v[3]) +
                pow(v[1] + Jet(1.0), 1.5) * cos(v[2]);
  CHECK(j.v == doctest::Approx(f(z0)).epsilon(1e-15));
  const double d = 1e-4;
  for (int a = 0; a < 4; ++a) {
    auto za = z0, zb = z0;
    za[a] += d;
    zb[a] -= d;
    CHECK(j.g[a] == doctest::Approx((f(za) - f(zb)) / (2 * d)).epsilon(1e-7));
    for (int b = 0; b < 4; ++b) {
      auto pp = z0, pm = z0, mp = z0, mm = z0;
      pp[a] += d, pp[b] += d;
      pm[a] += d, pm[b] -= d;
      mp[a] -= d, mp[b] += d;
      mm[a] -= d, mm[b] -= d;
      const double fd = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * d * d);
      CHECK(j.H[a][b] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      CHECK(j.H[a][b] == j.H[b][a]);
    }
  }
}

TEST_CASE("manufactured cases satisfy the equations") {
  for (double gamma : {1.2, 1.4, 1.8}) {
    SchemeParams p;
    p.gamma = gamma;
    p.eta = 0.05;
    for (const auto& name : manufactured_case_names()) {
      const ManufacturedCase c = manufactured_case(name);
      CAPTURE(name);
      CAPTURE(gamma);
      CHECK(c.finite_difference_residual(p, 20, 3) <= 1e-8);
    }
  }
}

TEST_CASE("manufactured cases: positive density, no-slip boundary") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& name : manufactured_case_names()) {
    const ManufacturedCase c = manufactured_case(name);
    CAPTURE(name);
    for (int i = 0; i < 200; ++i) {
      const double t = u(rng);
      Vec3 x(u(rng), u(rng), u(rng));
      CHECK(c.density(t, x) >= 0.4);
      x[i % 3] = (i / 3) % 2;  // move onto a boundary plane
      CHECK(c.velocity(t, x).norm() <= 1e-14);
    }
  }
  CHECK_THROWS_AS(manufactured_case("vortex"), InvalidInput);
}
