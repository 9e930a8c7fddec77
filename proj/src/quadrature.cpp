#include "isoflow/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

#include "isoflow/error.hpp"

namespace isoflow {

LineRule gauss_legendre(int points) {
  if (points < 1) throw InvalidInput("Gauss-Legendre rule needs at least one point");
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(points, points);
  for (int k = 1; k < points; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  LineRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  for (int k = 0; k < points; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    rule.nodes[k] = 0.5 * (eig.eigenvalues()(k) + 1.0);
    rule.weights[k] = v0 * v0;  // total mass 2 on [-1,1] -> 1 on [0,1]
  }
  return rule;
}

namespace {

TriangleRule make_triangle_rule(int degree) {
  TriangleRule r;
  r.degree = degree;
  if (degree == 1) {
    r.bary = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    r.weights = {1.0};
    return r;
  }
  if (degree == 2) {
    r.bary = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    r.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    return r;
  }
  // (a, b) in [0,1]^2 -> (x, y) = (a (1 - b), b), Jacobian (1 - b); area 1/2.
  const int m = (degree + 2 + 1) / 2;
  const LineRule g = gauss_legendre(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double a = g.nodes[i], b = g.nodes[j];
      const double x = a * (1.0 - b), y = b;
      r.bary.push_back({1.0 - x - y, x, y});
      r.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - b));
    }
  }
  return r;
}

TetrahedronRule make_tetrahedron_rule(int degree) {
  TetrahedronRule r;
  r.degree = degree;
  if (degree == 1) {
    r.bary = {{0.25, 0.25, 0.25, 0.25}};
    r.weights = {1.0};
    return r;
  }
  if (degree == 2) {
    const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
    const double b = (5.0 - std::sqrt(5.0)) / 20.0;
    r.bary = {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
    r.weights = {0.25, 0.25, 0.25, 0.25};
    return r;
  }
  // (a, b, c) -> (a (1-b)(1-c), b (1-c), c), Jacobian (1-b)(1-c)^2; volume 1/6.
  const int m = (degree + 3 + 1) / 2;
  const LineRule g = gauss_legendre(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        const double a = g.nodes[i], b = g.nodes[j], c = g.nodes[k];
        const double x = a * (1.0 - b) * (1.0 - c), y = b * (1.0 - c), z = c;
        r.bary.push_back({1.0 - x - y - z, x, y, z});
        r.weights.push_back(6.0 * g.weights[i] * g.weights[j] * g.weights[k] * (1.0 - b) *
                            (1.0 - c) * (1.0 - c));
      }
    }
  }
  return r;
}

template <class Rule, class Make>
const Rule& cached(std::map<int, Rule>& cache, std::mutex& mu, int degree, Make make) {
  if (degree < 1) throw InvalidInput("quadrature degree must be >= 1");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make(degree)).first;
  return it->second;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  static std::map<int, TriangleRule> cache;
  static std::mutex mu;
  return cached(cache, mu, degree, make_triangle_rule);
}

const TetrahedronRule& tetrahedron_rule(int degree) {
  static std::map<int, TetrahedronRule> cache;
  static std::mutex mu;
  return cached(cache, mu, degree, make_tetrahedron_rule);
}

}  // namespace isoflow
