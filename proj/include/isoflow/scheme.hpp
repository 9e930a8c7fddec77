#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isoflow/error.hpp"
#include "isoflow/mesh.hpp"
#include "isoflow/spaces.hpp"

namespace isoflow {

enum class DtRule { fixed, cfl };
/// `automatic` uses the direct solver for small systems and GMRES otherwise.
enum class LinearSolverKind { automatic, direct, iterative };

/// Momentum source f(t, x), used by manufactured-solution runs only.
using Forcing = std::function<Vec3(double t, const Vec3& x)>;

struct SchemeParams {
  double a = 1.0;
  double gamma = 1.4;
  double mu = 0.1;
  double eta = 0.0;
  /// Upwind dissipation exponent; unset means min(0.5, gamma - 1).
  std::optional<double> alpha;
  /// Fixed step dt = ct * h unless `dt` is given explicitly.
  double ct = 0.5;
  std::optional<double> dt;
  DtRule dt_rule = DtRule::fixed;
  double cfl = 0.5;

  double tol = 1e-10;
  int max_newton = 50;
  LinearSolverKind linear_solver = LinearSolverKind::automatic;
  double linear_tol = 1e-12;
  /// Skip Newton and use the frozen-transport fixed-point iteration only.
  bool fixed_point_only = false;

  Forcing forcing;

  // Term switches for verification; all on in the scheme proper.
  bool convection = true;
  bool pressure_term = true;

  double alpha_value() const;
  /// h^alpha, the width of the extra upwind dissipation.
  double eps(double h) const;
  double fixed_dt(double h) const;
  /// Throws InvalidInput naming the offending field.
  void validate() const;
};

/// Discrete solution at one time level.
struct State {
  QScalar rho;
  CRField u;
  double t = 0.0;
  int k = 0;
};

/// p(rho) = a rho^gamma.
double pressure(double rho, const SchemeParams& p);
/// p'(rho) = a gamma rho^(gamma-1).
double pressure_derivative(double rho, const SchemeParams& p);
/// P(rho) = a rho^gamma / (gamma - 1).
double pressure_potential(double rho, const SchemeParams& p);
/// P'(rho) = a gamma rho^(gamma-1) / (gamma - 1).
double pressure_potential_derivative(double rho, const SchemeParams& p);
/// P''(rho) = a gamma rho^(gamma-2); rho must be positive.
double pressure_potential_second(double rho, const SchemeParams& p);

/// Hat function: 0 outside [-1,1], z+1 on [-1,0], 1-z on (0,1].
double chi(double z);

/// Upwind flux on one interior face, with both algebraic forms kept.
struct UpwindFlux {
  double s = 0.0;    ///< face average of u . n
  double eps = 0.0;  ///< h^alpha
  double r_in = 0.0, r_out = 0.0;
  double convective = 0.0;   ///< {{r}} s
  double dissipative = 0.0;  ///< max(eps, |s|) [[r]]
  double standard = 0.0;     ///< r_out s^- + r_in s^+
  double cutoff = 0.0;       ///< (eps/2) [[r]] chi(s/eps)

  double form1() const { return convective - 0.5 * dissipative; }
  double form2() const { return standard - cutoff; }
  double value() const { return form2(); }
};

/// Evaluates both forms from scalar inputs.
UpwindFlux upwind_flux(double r_in, double r_out, double s, double eps);
/// Flux of the cell field r on an interior face; throws on exterior faces.
UpwindFlux upwind(const Mesh& mesh, const QScalar& r, const CRField& u, int face,
                  const SchemeParams& p);

/// Unknown layout of the coupled system: x = [rho (cells); u (3 per interior face)].
class Layout {
 public:
  explicit Layout(const Mesh& mesh) : mesh_(&mesh) {}
  int cells() const { return mesh_->num_cells(); }
  int faces() const { return mesh_->num_interior_faces(); }
  int size() const { return cells() + 3 * faces(); }
  int rho(int c) const { return c; }
  int u(int interior_index, int comp) const { return cells() + 3 * interior_index + comp; }

  Eigen::VectorXd pack(const State& s) const;
  /// Writes x into rho and the interior DOFs of u; exterior DOFs are zeroed.
  void unpack(const Eigen::VectorXd& x, State& s) const;

 private:
  const Mesh* mesh_;
};

/// Per-cell residual of the continuity equation tested with cell indicators:
///   |E| (rho_E - rho_E^old)/dt + sum_{interior faces} sign * |Gamma| Up[rho, u].
Eigen::VectorXd assemble_continuity_residual(const Mesh& mesh, const State& state_new,
                                             const State& state_old, double dt,
                                             const SchemeParams& p);

/// Momentum residual tested with the CR basis function of each interior face
/// times each unit vector; entry 3*i + a belongs to interior face i.
Eigen::VectorXd assemble_momentum_residual(const Mesh& mesh, const State& state_new,
                                           const State& state_old, double dt,
                                           const SchemeParams& p);

class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, State best, std::vector<double> history)
      : Error(what), best_(std::move(best)), history_(std::move(history)) {}
  const State& best_iterate() const { return best_; }
  const std::vector<double>& residual_history() const { return history_; }

 private:
  State best_;
  std::vector<double> history_;
};

class PositivityFailure : public StepFailure {
 public:
  using StepFailure::StepFailure;
};

struct SolveInfo {
  int newton_iterations = 0;
  int picard_iterations = 0;
  int failed_line_searches = 0;
  double residual = 0.0;  ///< final scaled max-norm residual
  std::vector<double> history;
};

/// One implicit step from `old` with step dt. The previous state is the
/// initial guess, so the returned solution is a deterministic function of the
/// input.
State solve_time_step(const Mesh& mesh, const State& old, double dt, const SchemeParams& p,
                      SolveInfo* info = nullptr);

/// CFL time step: cfl * h / max_E(|<u>_E| + sqrt(p'(rho_E))), or ct * h when
/// the wave speed vanishes.
double adapt_dt(const Mesh& mesh, const State& s, const SchemeParams& p);

/// Initial state Pi^Q rho0, Pi^V u0 (exterior means zeroed).
State initial_state(const Mesh& mesh, const std::function<double(const Vec3&)>& rho0,
                    const std::function<Vec3(const Vec3&)>& u0);

struct RunOptions {
  double t_end = 0.0;
  /// If positive, stop after this many steps (takes precedence over t_end).
  int steps = 0;
  /// Called after each accepted step; may be empty.
  std::function<void(const State& old, const State& next, double dt, const SolveInfo&)> on_step;
};

struct Trajectory {
  std::vector<State> states;
  std::vector<double> dts;
  std::vector<SolveInfo> solves;
  /// Non-empty when the run stopped on a step failure.
  std::string failure;
};

/// Steps until t_end (or the requested step count). Step failures end the
/// run; the trajectory keeps every accepted state and records the error.
Trajectory run(const Mesh& mesh, const State& initial, const SchemeParams& p,
               const RunOptions& options);

/// Total mass and energy of a state.
double total_mass(const Mesh& mesh, const QScalar& rho);
double total_energy(const Mesh& mesh, const State& s, const SchemeParams& p);

}  // namespace isoflow
