#pragma once

#include <Eigen/Sparse>

#include "isoflow/scheme.hpp"

namespace isoflow::detail {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

struct AssemblyOptions {
  bool jacobian = false;
  /// Use `transport` for the face normal velocities and drop their derivatives.
  const CRField* transport = nullptr;
  /// Precomputed forcing_load() for the step; computed on the fly when null.
  const Eigen::VectorXd* load = nullptr;
};

struct System {
  Eigen::VectorXd residual;
  RowMatrix jacobian;
};

/// Residual of the coupled step equations at `cur`, optionally with Jacobian.
void assemble_system(const Mesh& mesh, const State& cur, const State& old, double dt,
                     const SchemeParams& p, const AssemblyOptions& opt, System& out);

/// Integral of f(t, .) against each interior CR basis function, 3 entries
/// per interior face; empty without forcing.
Eigen::VectorXd forcing_load(const Mesh& mesh, const SchemeParams& p, double t);

/// Per-row scales: |E| rho_ref / dt for continuity rows, w rho_ref U / dt for
/// momentum rows with w the averaging weight of the face.
Eigen::VectorXd residual_scales(const Mesh& mesh, const State& old, double dt,
                                const SchemeParams& p);

}  // namespace isoflow::detail
