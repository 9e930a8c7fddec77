#include <algorithm>
#include <cmath>
#include <limits>

#include "assembly.hpp"
#include "isoflow/scheme.hpp"
#include "linear_solver.hpp"

namespace isoflow {

namespace {

using detail::AssemblyOptions;
using detail::System;

double scaled_max(const Eigen::VectorXd& r, const Eigen::VectorXd& s) {
  return r.size() ? (r.array() / s.array()).abs().maxCoeff() : 0.0;
}

double scaled_l2(const Eigen::VectorXd& r, const Eigen::VectorXd& s) {
  return (r.array() / s.array()).matrix().norm();
}

double min_density(const Eigen::VectorXd& x, int cells) { return x.head(cells).minCoeff(); }

struct Tracker {
  State best;
  double best_residual = std::numeric_limits<double>::infinity();
  std::vector<double> history;

  void record(const State& s, double r) {
    history.push_back(r);
    if (r < best_residual) {
      best_residual = r;
      best = s;
    }
  }
};

// Alternating frozen-transport solves. With the face velocities frozen the
// continuity equation is linear in rho and the momentum equation is linear in
// u, so each half step is one linear solve.
bool picard(const Mesh& mesh, const State& old, double dt, const SchemeParams& p,
            const Eigen::VectorXd& scales, const Eigen::VectorXd& load, double rho_floor,
            State& cur, Tracker& tracker, SolveInfo& info) {
  const int nc = mesh.num_cells();
  const Layout layout(mesh);
  detail::LinearSolver rho_solver(p.linear_solver, p.linear_tol);
  detail::LinearSolver u_solver(p.linear_solver, p.linear_tol);
  System sys;
  for (int it = 0; it < p.max_newton; ++it) {
    const CRField transport = cur.u;
    AssemblyOptions opt{true, &transport, &load};
    detail::assemble_system(mesh, cur, old, dt, p, opt, sys);
    const double r = scaled_max(sys.residual, scales);
    tracker.record(cur, r);
    if (r <= p.tol) {
      info.residual = r;
      return true;
    }
    ++info.picard_iterations;
    Eigen::VectorXd x = layout.pack(cur);

    detail::RowMatrix jrr = sys.jacobian.topLeftCorner(nc, nc);
    Eigen::VectorXd delta;
    if (!rho_solver.compute(jrr) || !rho_solver.solve(-sys.residual.head(nc), delta)) return false;
    x.head(nc) += delta;
    if (min_density(x, nc) < rho_floor)
      throw PositivityFailure("density lost positivity in the fixed-point iteration", tracker.best,
                              tracker.history);
    layout.unpack(x, cur);

    detail::assemble_system(mesh, cur, old, dt, p, opt, sys);
    const int nu = static_cast<int>(x.size()) - nc;
    detail::RowMatrix juu = sys.jacobian.bottomRightCorner(nu, nu);
    if (!u_solver.compute(juu) || !u_solver.solve(-sys.residual.tail(nu), delta)) return false;
    x.tail(nu) += delta;
    layout.unpack(x, cur);
  }
  return false;
}

}  // namespace

State solve_time_step(const Mesh& mesh, const State& old, double dt, const SchemeParams& p,
                      SolveInfo* info_out) {
  if (!(dt > 0.0)) throw InvalidInput("time step must be positive");
  const int nc = mesh.num_cells();
  const Layout layout(mesh);
  const Eigen::VectorXd scales = detail::residual_scales(mesh, old, dt, p);
  if (old.rho.size() != nc) throw InvalidInput("state does not match the mesh");
  const double rho_floor =
      1e-12 * *std::min_element(old.rho.values().begin(), old.rho.values().end());
  const Eigen::VectorXd load = detail::forcing_load(mesh, p, old.t + dt);
  SolveInfo info;
  Tracker tracker;
  State cur = old;
  cur.t = old.t + dt;
  cur.k = old.k + 1;

  detail::LinearSolver solver(p.linear_solver, p.linear_tol);
  System sys, trial_sys;
  bool converged = false;
  int failed_searches = 0;
  for (int it = 0; it < p.max_newton && !p.fixed_point_only; ++it) {
    detail::assemble_system(mesh, cur, old, dt, p, {true, nullptr, &load}, sys);
    const double r = scaled_max(sys.residual, scales);
    tracker.record(cur, r);
    if (r <= p.tol) {
      converged = true;
      info.residual = r;
      break;
    }
    ++info.newton_iterations;
    Eigen::VectorXd delta;
    if (!solver.compute(sys.jacobian) || !solver.solve(-sys.residual, delta)) {
      failed_searches = 3;
      break;
    }
    const Eigen::VectorXd x = layout.pack(cur);
    const double r0 = scaled_l2(sys.residual, scales);
    double step = 1.0;
    bool accepted = false;
    bool have_positive = false;
    Eigen::VectorXd last_positive;
    State trial = cur;
    for (int halving = 0; halving < 30; ++halving, step *= 0.5) {
      const Eigen::VectorXd xt = x + step * delta;
      if (min_density(xt, nc) < rho_floor) continue;
      layout.unpack(xt, trial);
      have_positive = true;
      last_positive = xt;
      detail::assemble_system(mesh, trial, old, dt, p, {false, nullptr, &load}, trial_sys);
      if (scaled_l2(trial_sys.residual, scales) <= (1.0 - 1e-4 * step) * r0) {
        accepted = true;
        break;
      }
    }
    if (accepted) {
      cur = trial;
      continue;
    }
    ++info.failed_line_searches;
    if (++failed_searches >= 3) break;
    if (have_positive) layout.unpack(last_positive, cur);
  }

  if (!converged && (failed_searches >= 3 || p.fixed_point_only))
    converged = picard(mesh, old, dt, p, scales, load, rho_floor, cur, tracker, info);

  info.history = tracker.history;
  if (info_out) *info_out = info;
  if (!converged) {
    State best = tracker.best;
    throw StepFailure("nonlinear solver did not converge (best scaled residual " +
                          std::to_string(tracker.best_residual) + ")",
                      std::move(best), tracker.history);
  }
  if (*std::min_element(cur.rho.values().begin(), cur.rho.values().end()) <= 0.0)
    throw PositivityFailure("converged density is not positive", cur, tracker.history);
  return cur;
}

Trajectory run(const Mesh& mesh, const State& initial, const SchemeParams& p,
               const RunOptions& options) {
  p.validate();
  Trajectory tr;
  tr.states.push_back(initial);
  const double t_stop = options.t_end;
  const double slack = 1e-9 * mesh.h();
  while (true) {
    const State& cur = tr.states.back();
    if (options.steps > 0) {
      if (cur.k - initial.k >= options.steps) break;
    } else if (cur.t >= t_stop - slack) {
      break;
    }
    const double dt = p.dt_rule == DtRule::cfl ? adapt_dt(mesh, cur, p) : p.fixed_dt(mesh.h());
    SolveInfo info;
    State next;
    try {
      next = solve_time_step(mesh, cur, dt, p, &info);
    } catch (const StepFailure& e) {
      tr.failure = "step " + std::to_string(cur.k + 1) + ": " + e.what();
      break;
    }
    if (options.on_step) options.on_step(cur, next, dt, info);
    tr.dts.push_back(dt);
    tr.solves.push_back(std::move(info));
    tr.states.push_back(std::move(next));
  }
  return tr;
}

}  // namespace isoflow
