#include "linear_solver.hpp"

namespace isoflow::detail {

bool LinearSolver::compute(const RowMatrix& a) {
  direct_ = use_direct(static_cast<int>(a.rows()));
  if (direct_) {
    lu_ = std::make_unique<Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>>();
    ColMatrix col = a;
    lu_->analyzePattern(col);
    lu_->factorize(col);
    return lu_->info() == Eigen::Success;
  }
  a_ = a;
  gmres_.setTolerance(tol_);
  gmres_.setMaxIterations(1000);
  gmres_.set_restart(100);
  gmres_.compute(a_);
  return gmres_.info() == Eigen::Success;
}

bool LinearSolver::solve(const Eigen::VectorXd& b, Eigen::VectorXd& x) {
  if (direct_) {
    x = lu_->solve(b);
    return lu_->info() == Eigen::Success && x.allFinite();
  }
  x = gmres_.solve(b);
  if (gmres_.info() != Eigen::Success || !x.allFinite()) {
    // A stale preconditioner may be too weak; retry once with a fresh one.
    refresh();
    gmres_.compute(a_);
    x = gmres_.solve(b);
  }
  return gmres_.info() == Eigen::Success && x.allFinite();
}

}  // namespace isoflow::detail
