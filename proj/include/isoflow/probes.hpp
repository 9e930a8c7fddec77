#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "isoflow/mesh.hpp"
#include "isoflow/spaces.hpp"

namespace isoflow {

/// Empirical constants of the discrete functional inequalities. Each probe
/// returns the largest ratio lhs / (scaled rhs) over a fixed family of fields:
/// seeded random fields, smooth projections, and single-cell or single-face
/// spikes (the spikes realise the worst case of the local estimates).

/// ||v||_{L^p} / (h^{3(1/p - 1/q)} ||v||_{L^q}) over piecewise constants, q <= p.
double inverse_constant(const Mesh& mesh, double p, double q, std::uint64_t seed);

/// max over cells E and faces G of E of ||v||_{L^p(G)} / (h^{-1/p} ||v||_{L^p(E)})
/// for v constant on E (the ratio does not depend on the value).
double trace_constant(const Mesh& mesh, double p);

/// max over cells of sup_v ||v - <v>||_{L^2(E)} / (h ||grad v||_{L^2(E)}) for
/// affine v, computed exactly from the second-moment matrix of the cell.
double poincare_constant(const Mesh& mesh);

/// ||v||_{L^6}^2 / (sum_G int [[v]]^2 / h + ||v||_{L^2}^2) over piecewise constants.
double broken_sobolev_constant(const Mesh& mesh, std::uint64_t seed);

/// ||v||_{L^6}^2 / ||grad_h v||_{L^2}^2 over Crouzeix-Raviart fields with zero
/// boundary face means.
double cr_sobolev_constant(const Mesh& mesh, std::uint64_t seed);

/// ||Pi^V f - f||_{L^2} with the boundary face means kept.
double projection_error(const Mesh& mesh, const std::function<Vec3(const Vec3&)>& f);

/// Smooth field used by the projection-order measurement.
Vec3 projection_sample_field(const Vec3& x);

struct ProbeSeries {
  std::string name;
  std::vector<int> levels;
  std::vector<double> constants;
  /// max / min - 1 over the levels.
  double variation() const;
};

/// All inequality probes on unit-cube meshes with n cells per axis.
std::vector<ProbeSeries> run_inequality_probes(const std::vector<int>& levels, std::uint64_t seed);

}  // namespace isoflow
