#pragma once

#include <array>
#include <vector>

namespace isoflow {

/// Quadrature on the reference triangle in barycentric coordinates.
/// Weights sum to one; scale by the face area.
struct TriangleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
  int degree = 0;
};

/// Quadrature on the reference tetrahedron in barycentric coordinates.
/// Weights sum to one; scale by the cell volume.
struct TetrahedronRule {
  std::vector<std::array<double, 4>> bary;
  std::vector<double> weights;
  int degree = 0;
};

/// Rule exact for polynomials of total degree `degree` (>= 1).
/// Degree 1 is the centroid rule, degree 2 the three edge-midpoint rule; higher
/// degrees use a collapsed tensor-product Gauss rule.
const TriangleRule& triangle_rule(int degree);

/// Degree 1 is the centroid rule, degree 2 the symmetric four-point rule;
/// higher degrees use a collapsed tensor-product Gauss rule.
const TetrahedronRule& tetrahedron_rule(int degree);

/// Gauss-Legendre nodes and weights on [0, 1].
struct LineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
LineRule gauss_legendre(int points);

}  // namespace isoflow
