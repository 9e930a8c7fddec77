#include "isoflow/probes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "isoflow/error.hpp"
#include "isoflow/quadrature.hpp"

namespace isoflow {

namespace {

constexpr int kRandomFields = 4;

// Cell whose centroid is closest to the domain centre; all its faces are
// interior on the box meshes used by the probes.
int central_cell(const Mesh& mesh) {
  Vec3 mid = Vec3::Zero();
  for (const auto& x : mesh.vertices()) mid += x;
  mid /= static_cast<double>(mesh.vertices().size());
  int best = 0;
  for (int c = 1; c < mesh.num_cells(); ++c)
    if ((mesh.centroid(c) - mid).norm() < (mesh.centroid(best) - mid).norm()) best = c;
  return best;
}

int central_interior_face(const Mesh& mesh) {
  const int c = central_cell(mesh);
  for (int f : mesh.cell_faces(c))
    if (mesh.face(f).interior()) return f;
  throw InvalidInput("mesh has no interior face");
}

std::vector<QScalar> scalar_family(const Mesh& mesh, std::uint64_t seed) {
  std::vector<QScalar> fam;
  fam.emplace_back(mesh.num_cells(), 1.0);
  QScalar spike(mesh.num_cells(), 0.0);
  spike[central_cell(mesh)] = 1.0;
  fam.push_back(spike);
  fam.push_back(project_Q(mesh, [](const Vec3& x) {
    return std::sin(std::numbers::pi * x[0]) * std::cos(2 * x[1]) + x[2];
  }));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int i = 0; i < kRandomFields; ++i) {
    QScalar v(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) v[c] = d(rng);
    fam.push_back(v);
  }
  return fam;
}

double face_lp(double value, double area, double p) {
  return std::isinf(p) ? std::abs(value) : std::abs(value) * std::pow(area, 1.0 / p);
}

}  // namespace

double inverse_constant(const Mesh& mesh, double p, double q, std::uint64_t seed) {
  if (!(q >= 1.0) || !(p >= q)) throw InvalidInput("inverse estimate needs 1 <= q <= p");
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double scale = std::pow(mesh.h(), 3.0 * (inv_p - 1.0 / q));
  double best = 0.0;
  for (const QScalar& v : scalar_family(mesh, seed))
    best = std::max(best, lp_norm(mesh, v, p) / (scale * lp_norm(mesh, v, q)));
  return best;
}

double trace_constant(const Mesh& mesh, double p) {
  if (!(p >= 1.0)) throw InvalidInput("trace estimate needs p >= 1");
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double scale = std::pow(mesh.h(), -inv_p);
  double best = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double cell = std::isinf(p) ? 1.0 : std::pow(mesh.volume(c), inv_p);
    for (int f : mesh.cell_faces(c))
      best = std::max(best, face_lp(1.0, mesh.face(f).area, p) / (scale * cell));
  }
  return best;
}

double poincare_constant(const Mesh& mesh) {
  // For v(x) = G (x - x_E) + <v>: ||v - <v>||^2 = tr(G M G^T) with the second
  // moment M = int (x - x_E)(x - x_E)^T, and ||grad v||^2 = |E| |G|_F^2.
  // The supremum of the ratio is lambda_max(M) / |E|.
  const TetrahedronRule& rule = tetrahedron_rule(2);
  const double h = mesh.h();
  double best = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Mat3 m = Mat3::Zero();
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Vec3 d = mesh.point(c, rule.bary[q]) - mesh.centroid(c);
      m += rule.weights[q] * d * d.transpose();
    }
    // weights sum to 1, so m is already M / |E|
    const double lmax = Eigen::SelfAdjointEigenSolver<Mat3>(m, Eigen::EigenvaluesOnly).eigenvalues()(2);
    best = std::max(best, std::sqrt(lmax) / h);
  }
  return best;
}

double broken_sobolev_constant(const Mesh& mesh, std::uint64_t seed) {
  double best = 0.0;
  for (const QScalar& v : scalar_family(mesh, seed)) {
    const double l6 = lp_norm(mesh, v, 6.0), l2 = lp_norm(mesh, v, 2.0);
    const double jump = face_jump_seminorm(mesh, v);
    best = std::max(best, l6 * l6 / (jump * jump + l2 * l2));
  }
  return best;
}

double cr_sobolev_constant(const Mesh& mesh, std::uint64_t seed) {
  std::vector<CRField> fam;
  const double pi = std::numbers::pi;
  auto s = [pi](double t) { return std::sin(pi * t); };
  fam.push_back(project_V(mesh, [&](const Vec3& x) {
    const double b = s(x[0]) * s(x[1]) * s(x[2]);
    return Vec3(b, 0.5 * b, -b);
  }));
  fam.push_back(project_V(mesh, [&](const Vec3& x) {
    return Vec3(s(2 * x[0]) * s(x[1]) * s(x[2]), s(x[0]) * s(x[1]) * s(x[2]) * x[0], 0.0);
  }));
  CRField spike(mesh);
  spike[central_interior_face(mesh)] = Vec3(1.0, 0.0, 0.0);
  fam.push_back(spike);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < kRandomFields; ++i) {
    CRField v(mesh);
    for (int f : mesh.interior_faces()) v[f] = Vec3(d(rng), d(rng), d(rng));
    fam.push_back(v);
  }
  double best = 0.0;
  for (const CRField& v : fam) {
    const double l6 = lp_norm(mesh, v, 6.0), g = broken_h1_seminorm(mesh, v);
    best = std::max(best, l6 * l6 / (g * g));
  }
  return best;
}

Vec3 projection_sample_field(const Vec3& x) {
  return Vec3(std::sin(2 * x[0] + x[1]), std::cos(x[1] - x[2]) * x[0], std::exp(0.5 * x[2]) * x[1]);
}

double projection_error(const Mesh& mesh, const std::function<Vec3(const Vec3&)>& f) {
  const CRField v = project_V(mesh, f, Boundary::keep);
  const TetrahedronRule& rule = tetrahedron_rule(6);
  double e = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q)
      s += rule.weights[q] *
           (v.value(mesh, c, rule.bary[q]) - f(mesh.point(c, rule.bary[q]))).squaredNorm();
    e += mesh.volume(c) * s;
  }
  return std::sqrt(e);
}

double ProbeSeries::variation() const {
  if (constants.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(constants.begin(), constants.end());
  return *hi / *lo - 1.0;
}

std::vector<ProbeSeries> run_inequality_probes(const std::vector<int>& levels, std::uint64_t seed) {
  std::vector<ProbeSeries> out{
      {"inverse_inf_2", {}, {}}, {"inverse_6_2", {}, {}}, {"inverse_2_1", {}, {}},
      {"trace_1", {}, {}},       {"trace_2", {}, {}},     {"poincare", {}, {}},
      {"broken_sobolev", {}, {}}, {"cr_sobolev", {}, {}}};
  for (int n : levels) {
    const Mesh mesh = build_box_mesh(Box{}, {n, n, n});
    const double values[] = {inverse_constant(mesh, kInfinity, 2.0, seed),
                             inverse_constant(mesh, 6.0, 2.0, seed),
                             inverse_constant(mesh, 2.0, 1.0, seed),
                             trace_constant(mesh, 1.0),
                             trace_constant(mesh, 2.0),
                             poincare_constant(mesh),
                             broken_sobolev_constant(mesh, seed),
                             cr_sobolev_constant(mesh, seed)};
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].levels.push_back(n);
      out[i].constants.push_back(values[i]);
    }
  }
  return out;
}

}  // namespace isoflow
