#include "isoflow/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isoflow {

namespace {
void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}
}  // namespace

double SchemeParams::alpha_value() const { return alpha ? *alpha : std::min(0.5, gamma - 1.0); }

double SchemeParams::eps(double h) const { return std::pow(h, alpha_value()); }

double SchemeParams::fixed_dt(double h) const { return dt ? *dt : ct * h; }

void SchemeParams::validate() const {
  require(a > 0.0, "a must be positive");
  require(gamma > 1.0 && gamma < 2.0, "gamma must lie in (1, 2)");
  require(mu > 0.0, "mu must be positive");
  require(eta >= 0.0, "eta must be nonnegative");
  const double al = alpha_value();
  require(al > 0.0 && al < 2.0 * (gamma - 1.0), "alpha must lie in (0, 2(gamma-1))");
  require(ct > 0.0, "ct must be positive");
  require(!dt || *dt > 0.0, "dt must be positive");
  require(cfl > 0.0 && cfl <= 1.0, "cfl must lie in (0, 1]");
  require(tol > 0.0, "tol must be positive");
  require(max_newton >= 1, "max_newton must be at least 1");
  require(linear_tol > 0.0, "linear_tol must be positive");
}

double pressure(double rho, const SchemeParams& p) {
  if (!(rho >= 0.0)) throw InvalidInput("pressure of a negative density");
  return p.a * std::pow(rho, p.gamma);
}

double pressure_derivative(double rho, const SchemeParams& p) {
  if (!(rho >= 0.0)) throw InvalidInput("pressure of a negative density");
  return p.a * p.gamma * std::pow(rho, p.gamma - 1.0);
}

double pressure_potential(double rho, const SchemeParams& p) {
  if (!(rho >= 0.0)) throw InvalidInput("pressure potential of a negative density");
  return p.a / (p.gamma - 1.0) * std::pow(rho, p.gamma);
}

double pressure_potential_derivative(double rho, const SchemeParams& p) {
  if (!(rho >= 0.0)) throw InvalidInput("pressure potential of a negative density");
  return p.a * p.gamma / (p.gamma - 1.0) * std::pow(rho, p.gamma - 1.0);
}

double pressure_potential_second(double rho, const SchemeParams& p) {
  if (!(rho > 0.0)) throw InvalidInput("P'' is undefined at nonpositive density");
  return p.a * p.gamma * std::pow(rho, p.gamma - 2.0);
}

double chi(double z) {
  if (z < -1.0) return 0.0;
  if (z <= 0.0) return z + 1.0;
  if (z <= 1.0) return 1.0 - z;
  return 0.0;
}

UpwindFlux upwind_flux(double r_in, double r_out, double s, double eps) {
  UpwindFlux f;
  f.s = s;
  f.eps = eps;
  f.r_in = r_in;
  f.r_out = r_out;
  const double jump = r_out - r_in;
  f.convective = 0.5 * (r_in + r_out) * s;
  f.dissipative = std::max(eps, std::abs(s)) * jump;
  f.standard = r_out * std::min(s, 0.0) + r_in * std::max(s, 0.0);
  f.cutoff = 0.5 * eps * jump * chi(s / eps);
  return f;
}

UpwindFlux upwind(const Mesh& mesh, const QScalar& r, const CRField& u, int face,
                  const SchemeParams& p) {
  const Face& f = mesh.face(face);
  if (!f.interior()) throw InvalidInput("upwind flux requested on an exterior face");
  return upwind_flux(r[f.owner], r[f.neighbor], u[face].dot(f.normal), p.eps(mesh.h()));
}

Eigen::VectorXd Layout::pack(const State& s) const {
  Eigen::VectorXd x(size());
  for (int c = 0; c < cells(); ++c) x[rho(c)] = s.rho[c];
  const auto faces_int = mesh_->interior_faces();
  for (int i = 0; i < faces(); ++i)
    for (int a = 0; a < 3; ++a) x[u(i, a)] = s.u[faces_int[i]][a];
  return x;
}

void Layout::unpack(const Eigen::VectorXd& x, State& s) const {
  if (s.rho.size() != cells()) s.rho = QScalar(cells());
  if (s.u.size() != mesh_->num_faces()) s.u = CRField(*mesh_);
  for (int c = 0; c < cells(); ++c) s.rho[c] = x[rho(c)];
  s.u.zero_exterior(*mesh_);
  const auto faces_int = mesh_->interior_faces();
  for (int i = 0; i < faces(); ++i)
    for (int a = 0; a < 3; ++a) s.u[faces_int[i]][a] = x[u(i, a)];
}

double adapt_dt(const Mesh& mesh, const State& s, const SchemeParams& p) {
  if (p.dt_rule != DtRule::cfl) throw InvalidInput("adapt_dt requires the cfl time-step rule");
  const QVector avg = cell_average(mesh, s.u);
  double speed = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c)
    speed = std::max(speed, avg[c].norm() + std::sqrt(pressure_derivative(s.rho[c], p)));
  if (!(speed > 0.0)) return p.ct * mesh.h();
  return p.cfl * mesh.h() / speed;
}

State initial_state(const Mesh& mesh, const std::function<double(const Vec3&)>& rho0,
                    const std::function<Vec3(const Vec3&)>& u0) {
  State s;
  s.rho = project_Q(mesh, rho0);
  for (int c = 0; c < mesh.num_cells(); ++c)
    if (!(s.rho[c] > 0.0)) throw InvalidInput("initial density must be positive");
  s.u = project_V(mesh, u0, Boundary::zero);
  return s;
}

double total_mass(const Mesh& mesh, const QScalar& rho) {
  double m = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) m += mesh.volume(c) * rho[c];
  return m;
}

double total_energy(const Mesh& mesh, const State& s, const SchemeParams& p) {
  const QVector avg = cell_average(mesh, s.u);
  double e = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c)
    e += mesh.volume(c) * (0.5 * s.rho[c] * avg[c].squaredNorm() + pressure_potential(s.rho[c], p));
  return e;
}

}  // namespace isoflow
