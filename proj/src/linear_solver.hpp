#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <memory>
#include <unsupported/Eigen/IterativeSolvers>

#include "assembly.hpp"

namespace isoflow::detail {

/// Incomplete LU whose factors can be kept across several matrices, so one
/// factorization preconditions all Newton iterations of a time step.
class ReusableIlut {
 public:
  using Factor = Eigen::IncompleteLUT<double>;

  ReusableIlut() = default;
  template <class M>
  ReusableIlut& analyzePattern(const M&) {
    return *this;
  }
  template <class M>
  ReusableIlut& factorize(const M& a) {
    return compute(a);
  }
  template <class M>
  ReusableIlut& compute(const M& a) {
    if (!factor_ || refresh_) {
      factor_ = std::make_shared<Factor>();
      factor_->setDroptol(1e-2);
      factor_->setFillfactor(1);
      factor_->compute(a);
      refresh_ = false;
    }
    return *this;
  }
  template <class Rhs>
  Rhs solve(const Rhs& b) const {
    return factor_->solve(b);
  }
  Eigen::ComputationInfo info() const { return factor_ ? factor_->info() : Eigen::Success; }
  void request_refresh() { refresh_ = true; }

 private:
  std::shared_ptr<Factor> factor_;
  bool refresh_ = true;
};

/// Factorize-then-solve wrapper over the configured sparse solver.
class LinearSolver {
 public:
  LinearSolver(LinearSolverKind kind, double tol) : kind_(kind), tol_(tol) {}

  /// Returns false when the factorization fails.
  bool compute(const RowMatrix& a);
  /// Returns false when the solve fails or does not reach the tolerance.
  bool solve(const Eigen::VectorXd& b, Eigen::VectorXd& x);
  /// Forces a fresh preconditioner on the next compute().
  void refresh() { gmres_.preconditioner().request_refresh(); }

  /// Unknown count up to which `automatic` picks the direct solver.
  static constexpr int direct_limit = 10000;

 private:
  using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  bool use_direct(int n) const {
    return kind_ == LinearSolverKind::direct ||
           (kind_ == LinearSolverKind::automatic && n <= direct_limit);
  }
  LinearSolverKind kind_;
  double tol_;
  bool direct_ = true;
  RowMatrix a_;
  std::unique_ptr<Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>> lu_;
  Eigen::GMRES<RowMatrix, ReusableIlut> gmres_;
};

}  // namespace isoflow::detail
