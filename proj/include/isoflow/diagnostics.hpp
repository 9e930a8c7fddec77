#pragma once

#include <functional>
#include <string>
#include <vector>

#include "isoflow/mesh.hpp"
#include "isoflow/scheme.hpp"
#include "isoflow/spaces.hpp"

namespace isoflow {

/// Numerical dissipation of one step in energy units (each term carries the
/// factor dt). The pressure-potential terms use the gamma/2-power lower
/// bounds; all five are nonnegative for exact discrete solutions.
struct DissipationTerms {
  /// (a gamma/2) int ((rho^k)^(gamma/2) - (rho^(k-1))^(gamma/2))^2
  double time_density = 0.0;
  /// (1/2) int rho^(k-1) |<u^k> - <u^(k-1)>|^2
  double time_velocity = 0.0;
  /// dt (a gamma h^alpha / 2) sum_Gamma int [[rho^(gamma/2)]]^2 chi
  double chi_density = 0.0;
  /// dt (a gamma / 2) sum_Gamma int [[rho^(gamma/2)]]^2 |s|
  double flux_density = 0.0;
  /// dt sum_Gamma int ((h^alpha/2) {{rho}} chi + (rho_in s^+ - rho_out s^-)/2) |[[<u>]]|^2
  double velocity_jump = 0.0;

  double sum() const {
    return time_density + time_velocity + chi_density + flux_density + velocity_jump;
  }
};

/// Per-step mass and energy ledger.
struct StepReport {
  int k = 0;
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  /// (mass - mass at step 0) / mass at step 0
  double mass_drift = 0.0;
  /// int 1/2 rho |<u>|^2 + P(rho)
  double energy = 0.0;
  /// dt int mu |grad_h u|^2 + (mu/3 + eta) |div_h u|^2
  double viscous_dissipation = 0.0;
  DissipationTerms dissipation;
  /// dt int f(t_k) . u^k, zero without forcing
  double forcing_work = 0.0;
  /// E^k - E^(k-1) + viscous + dissipation - forcing work; <= 0 up to the
  /// solver tolerance.
  double slack = 0.0;
};

/// Ledger row of the initial state (k = 0, no increments).
StepReport initial_report(const Mesh& mesh, const State& s, const SchemeParams& p);

/// Ledger of the step old -> next taken with step dt.
StepReport step_ledger(const Mesh& mesh, const State& old, const State& next, double dt,
                       const SchemeParams& p, double initial_mass);

/// Ledger rows for every state of a trajectory, starting with k = 0.
std::vector<StepReport> trajectory_ledger(const Mesh& mesh, const Trajectory& tr,
                                          const SchemeParams& p);

/// Smooth scalar function with its gradient.
struct ScalarTest {
  std::string name;
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> grad;
};

/// Smooth vector function with its Jacobian, entry (a, b) = d phi_a / d x_b.
struct VectorTest {
  std::string name;
  std::function<Vec3(const Vec3&)> value;
  std::function<Mat3(const Vec3&)> grad;
};

/// The terms of the upwind consistency identity
///   int r u . grad phi = upwind + cutoff + downwind + normal + divergence.
struct UpwindIdentity {
  double lhs = 0.0;
  double upwind = 0.0;      ///< sum_Gamma int Up[r,u] [[F]]
  double cutoff = 0.0;      ///< (h^alpha/2) sum_Gamma int [[r]] [[F]] chi
  double downwind = 0.0;    ///< sum_E sum_{Gamma in dE} int (F - phi) [[r]] [s]^-
  double normal = 0.0;      ///< sum_E sum_{Gamma in dE} int phi r (u.n - <u.n>)
  double divergence = 0.0;  ///< int r (F - phi) div_h u

  double rhs() const { return upwind + cutoff + downwind + normal + divergence; }
  double residual() const { return lhs - rhs(); }
};

/// Evaluates both sides of the identity with quadrature of the given degree
/// (degree 2 is exact for affine phi).
UpwindIdentity upwind_identity_check(const Mesh& mesh, const QScalar& r, const QScalar& F,
                                     const CRField& u, const ScalarTest& phi,
                                     const SchemeParams& p, int degree = 2);

/// psi(t) = exp(1 - 1/(1 - (t/T)^2)) on [0, T), zero afterwards; psi(0) = 1
/// and all derivatives vanish at T.
struct TimeBump {
  double support = 1.0;
  double operator()(double t) const;
  /// int_{t0}^{t1} psi dt by composite Gauss-Legendre.
  double integral(double t0, double t1) const;
};

/// Space parts of the consistency tests. Scalar and vector parts share a
/// compactly supported profile inside `domain`; the vector part is the
/// profile times a fixed direction.
struct TestFunctionPair {
  ScalarTest scalar;
  VectorTest vector;
};
std::vector<TestFunctionPair> default_test_functions(const Box& domain);

/// Residuals of the weak forms of the continuity and momentum equations for
/// the piecewise-constant-in-time interpolant of a trajectory, tested with
/// psi(t) phi(x). The trajectory must reach the end of the time support.
struct ConsistencyResiduals {
  double continuity = 0.0;
  double momentum = 0.0;
};
ConsistencyResiduals consistency_residuals(const Mesh& mesh, const Trajectory& tr,
                                           const TimeBump& psi, const TestFunctionPair& phi,
                                           const SchemeParams& p, int degree = 2);

/// Least-squares fit log(v) = slope * log(h) + c with coefficient of
/// determination. Needs at least three positive points.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LogLogFit loglog_fit(const std::vector<double>& h, const std::vector<double>& v);

using ScalarReference = std::function<double(double t, const Vec3& x)>;
using VectorReference = std::function<Vec3(double t, const Vec3& x)>;

/// ||rho_h - rho*||_{L^gamma((0,T) x K)} and ||u_h - u*||_{L^2((0,T) x K)}
/// with T the final time of the trajectory. K collects the cells whose
/// centroid lies in `subbox`, which must lie inside the mesh.
struct ErrorNorms {
  double density = 0.0;
  double velocity = 0.0;
};
ErrorNorms error_vs_reference(const Mesh& mesh, const Trajectory& tr, const ScalarReference& rho,
                              const VectorReference& u, const Box& subbox,
                              const SchemeParams& p);

}  // namespace isoflow
