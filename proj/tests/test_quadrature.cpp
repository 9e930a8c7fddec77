#include <cmath>

#include "doctest.h"
#include "isoflow/quadrature.hpp"

using namespace isoflow;

namespace {

// Exact integral of l1^a l2^b l3^c over a triangle divided by its area:
// 2 a! b! c! / (a+b+c+2)!
double tri_moment(int a, int b, int c) {
  return 2.0 * std::tgamma(a + 1) * std::tgamma(b + 1) * std::tgamma(c + 1) /
         std::tgamma(a + b + c + 3);
}

// Tetrahedron analogue: 6 a! b! c! d! / (a+b+c+d+3)!
double tet_moment(int a, int b, int c, int d) {
  return 6.0 * std::tgamma(a + 1) * std::tgamma(b + 1) * std::tgamma(c + 1) *
         std::tgamma(d + 1) / std::tgamma(a + b + c + d + 4);
}

}  // namespace

TEST_CASE("triangle rules integrate monomials of their degree exactly") {
  for (int deg = 1; deg <= 8; ++deg) {
    const auto& rule = triangle_rule(deg);
    CHECK(rule.degree >= deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) {
        const int c = deg - a - b;
        double s = 0.0;
        for (std::size_t q = 0; q < rule.weights.size(); ++q)
          s += rule.weights[q] * std::pow(rule.bary[q][0], a) * std::pow(rule.bary[q][1], b) *
               std::pow(rule.bary[q][2], c);
        CHECK(s == doctest::Approx(tri_moment(a, b, c)).epsilon(1e-13));
      }
  }
}

TEST_CASE("tetrahedron rules integrate monomials of their degree exactly") {
  for (int deg = 1; deg <= 8; ++deg) {
    const auto& rule = tetrahedron_rule(deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b)
        for (int c = 0; a + b + c <= deg; ++c) {
          const int d = deg - a - b - c;
          double s = 0.0;
          for (std::size_t q = 0; q < rule.weights.size(); ++q)
            s += rule.weights[q] * std::pow(rule.bary[q][0], a) * std::pow(rule.bary[q][1], b) *
                 std::pow(rule.bary[q][2], c) * std::pow(rule.bary[q][3], d);
          CHECK(s == doctest::Approx(tet_moment(a, b, c, d)).epsilon(1e-13));
        }
  }
}

TEST_CASE("low-degree rules have the classical layout") {
  CHECK(triangle_rule(1).weights.size() == 1);
  CHECK(triangle_rule(2).weights.size() == 3);
  CHECK(tetrahedron_rule(1).weights.size() == 1);
  CHECK(tetrahedron_rule(2).weights.size() == 4);
}

TEST_CASE("Gauss-Legendre on [0,1]") {
  for (int n = 1; n <= 10; ++n) {
    const LineRule r = gauss_legendre(n);
    for (int k = 0; k < 2 * n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}
