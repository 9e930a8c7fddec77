#include "isoflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isoflow/error.hpp"
#include "isoflow/kernels.hpp"
#include "isoflow/quadrature.hpp"

namespace isoflow {

namespace {

double viscous_rate(const Mesh& mesh, const CRField& u, const SchemeParams& p) {
  const QTensor g = broken_grad(mesh, u);
  const double lambda = p.mu / 3.0 + p.eta;
  double v = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double div = g[c].trace();
    v += mesh.volume(c) * (p.mu * g[c].squaredNorm() + lambda * div * div);
  }
  return v;
}

// int f(t, x) . u(x) dx with the cell rule used for the forcing load.
double forcing_power(const Mesh& mesh, const CRField& u, const SchemeParams& p, double t) {
  if (!p.forcing) return 0.0;
  const TetrahedronRule& rule = tetrahedron_rule(4);
  double w = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q)
      s += rule.weights[q] *
           p.forcing(t, mesh.point(c, rule.bary[q])).dot(u.value(mesh, c, rule.bary[q]));
    w += mesh.volume(c) * s;
  }
  return w;
}

}  // namespace

StepReport initial_report(const Mesh& mesh, const State& s, const SchemeParams& p) {
  StepReport r;
  r.k = s.k;
  r.t = s.t;
  r.mass = total_mass(mesh, s.rho);
  r.energy = total_energy(mesh, s, p);
  return r;
}

StepReport step_ledger(const Mesh& mesh, const State& old, const State& next, double dt,
                       const SchemeParams& p, double initial_mass) {
  const int nc = mesh.num_cells();
  if (old.rho.size() != nc || next.rho.size() != nc || old.u.size() != mesh.num_faces() ||
      next.u.size() != mesh.num_faces())
    throw InvalidInput("states do not match the mesh");
  StepReport r;
  r.k = next.k;
  r.t = next.t;
  r.dt = dt;
  r.mass = total_mass(mesh, next.rho);
  r.mass_drift = (r.mass - initial_mass) / initial_mass;
  r.energy = total_energy(mesh, next, p);
  r.viscous_dissipation = dt * viscous_rate(mesh, next.u, p);
  r.forcing_work = dt * forcing_power(mesh, next.u, p, next.t);

  const double half_gamma = 0.5 * p.gamma;
  const double ag = p.a * p.gamma;
  const QVector avg = cell_average(mesh, next.u), avg_old = cell_average(mesh, old.u);

  DissipationTerms& d = r.dissipation;
  {
    std::vector<double> a(nc), b(nc), w(nc);
    for (int c = 0; c < nc; ++c) {
      a[c] = std::pow(old.rho[c], half_gamma);
      b[c] = std::pow(next.rho[c], half_gamma);
      w[c] = mesh.volume(c);
    }
    d.time_density = 0.5 * ag * kernels::weighted_jump_squares(a, b, w);
    for (int c = 0; c < nc; ++c) w[c] = mesh.volume(c) * old.rho[c];
    double tv = 0.0;
    for (int comp = 0; comp < 3; ++comp) {
      for (int c = 0; c < nc; ++c) {
        a[c] = avg_old[c][comp];
        b[c] = avg[c][comp];
      }
      tv += kernels::weighted_jump_squares(a, b, w);
    }
    d.time_velocity = 0.5 * tv;
  }

  const auto faces = mesh.interior_faces();
  const std::size_t nf = faces.size();
  const double eps = p.eps(mesh.h());
  std::vector<double> pin(nf), pout(nf), wchi(nf), wflux(nf), wvel(nf);
  std::array<std::vector<double>, 3> vin, vout;
  for (auto& v : vin) v.resize(nf);
  for (auto& v : vout) v.resize(nf);
  for (std::size_t j = 0; j < nf; ++j) {
    const Face& f = mesh.face(faces[j]);
    const double s = next.u[faces[j]].dot(f.normal);
    const double ri = next.rho[f.owner], ro = next.rho[f.neighbor];
    const double c = chi(s / eps);
    pin[j] = std::pow(ri, half_gamma);
    pout[j] = std::pow(ro, half_gamma);
    wchi[j] = f.area * c;
    wflux[j] = f.area * std::abs(s);
    wvel[j] = f.area * (0.5 * eps * 0.5 * (ri + ro) * c +
                        0.5 * (ri * std::max(s, 0.0) - ro * std::min(s, 0.0)));
    for (int comp = 0; comp < 3; ++comp) {
      vin[comp][j] = avg[f.owner][comp];
      vout[comp][j] = avg[f.neighbor][comp];
    }
  }
  d.chi_density = dt * 0.5 * ag * eps * kernels::weighted_jump_squares(pin, pout, wchi);
  d.flux_density = dt * 0.5 * ag * kernels::weighted_jump_squares(pin, pout, wflux);
  double vj = 0.0;
  for (int comp = 0; comp < 3; ++comp) vj += kernels::weighted_jump_squares(vin[comp], vout[comp], wvel);
  d.velocity_jump = dt * vj;

  const double e_old = total_energy(mesh, old, p);
  r.slack = (r.energy - e_old) + r.viscous_dissipation + d.sum() - r.forcing_work;
  return r;
}

std::vector<StepReport> trajectory_ledger(const Mesh& mesh, const Trajectory& tr,
                                          const SchemeParams& p) {
  std::vector<StepReport> rows;
  if (tr.states.empty()) return rows;
  rows.push_back(initial_report(mesh, tr.states[0], p));
  const double m0 = rows[0].mass;
  for (std::size_t k = 1; k < tr.states.size(); ++k)
    rows.push_back(step_ledger(mesh, tr.states[k - 1], tr.states[k], tr.dts[k - 1], p, m0));
  return rows;
}

UpwindIdentity upwind_identity_check(const Mesh& mesh, const QScalar& r, const QScalar& F,
                                     const CRField& u, const ScalarTest& phi,
                                     const SchemeParams& p, int degree) {
  UpwindIdentity out;
  const double eps = p.eps(mesh.h());
  const TetrahedronRule& cell_rule = tetrahedron_rule(degree);
  const QScalar div = broken_div(mesh, u);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    double lhs = 0.0, phi_mean = 0.0;
    for (std::size_t q = 0; q < cell_rule.weights.size(); ++q) {
      const Vec3 x = mesh.point(c, cell_rule.bary[q]);
      lhs += cell_rule.weights[q] * u.value(mesh, c, cell_rule.bary[q]).dot(phi.grad(x));
      phi_mean += cell_rule.weights[q] * phi.value(x);
    }
    out.lhs += mesh.volume(c) * r[c] * lhs;
    out.divergence += mesh.volume(c) * r[c] * (F[c] - phi_mean) * div[c];
  }
  for (int f : mesh.interior_faces()) {
    const Face& face = mesh.face(f);
    const double s = u[f].dot(face.normal);
    const UpwindFlux up = upwind_flux(r[face.owner], r[face.neighbor], s, eps);
    const double jf = F[face.neighbor] - F[face.owner];
    const double jr = r[face.neighbor] - r[face.owner];
    out.upwind += face.area * up.value() * jf;
    out.cutoff += 0.5 * eps * face.area * jr * jf * chi(s / eps);
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.cell_faces(c)[i];
      const Vec3 n = mesh.outward_normal(c, i);
      const double s = u[f].dot(n);
      const auto quad = face_quadrature_any(mesh, f, degree);
      double phi_int = 0.0, normal = 0.0;
      for (const auto& q : quad) {
        const double ph = phi.value(q.point);
        phi_int += q.weight * ph;
        normal += q.weight * ph * (u.value(mesh, c, q.point).dot(n) - s);
      }
      out.normal += r[c] * normal;
      const int other = mesh.across(c, i);
      if (other >= 0) {
        const double area = mesh.face(f).area;
        out.downwind += (F[c] * area - phi_int) * (r[other] - r[c]) * std::min(s, 0.0);
      }
    }
  }
  return out;
}

double TimeBump::operator()(double t) const {
  const double tau = t / support;
  if (tau <= -1.0 || tau >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - tau * tau));
}

double TimeBump::integral(double t0, double t1) const {
  const double a = std::max(t0, 0.0), b = std::min(t1, support);
  if (!(b > a)) return 0.0;
  // psi is flat but not analytic at T; panels keep the rule accurate there.
  constexpr int panels = 16;
  const LineRule rule = gauss_legendre(8);
  const double w = (b - a) / panels;
  double s = 0.0;
  for (int j = 0; j < panels; ++j)
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      s += rule.weights[i] * (*this)(a + w * (j + rule.nodes[i]));
  return w * s;
}

namespace {

// exp(1 - 1/(1 - z^2)) on (-1, 1) and its derivative.
double bump(double z) { return std::abs(z) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - z * z)) : 0.0; }
double bump_derivative(double z) {
  if (std::abs(z) >= 1.0) return 0.0;
  const double d = 1.0 - z * z;
  return bump(z) * (-2.0 * z / (d * d));
}

struct Profile {
  Vec3 center, radius;
  std::function<double(const Vec3&)> mod;
  std::function<Vec3(const Vec3&)> mod_grad;

  double value(const Vec3& x) const {
    double b = 1.0;
    for (int i = 0; i < 3; ++i) b *= bump((x[i] - center[i]) / radius[i]);
    return b == 0.0 ? 0.0 : b * mod(x);
  }
  Vec3 grad(const Vec3& x) const {
    std::array<double, 3> b, db;
    for (int i = 0; i < 3; ++i) {
      const double z = (x[i] - center[i]) / radius[i];
      b[i] = bump(z);
      db[i] = bump_derivative(z) / radius[i];
    }
    const double prod = b[0] * b[1] * b[2];
    if (prod == 0.0) return Vec3::Zero();
    const Vec3 gb(db[0] * b[1] * b[2], b[0] * db[1] * b[2], b[0] * b[1] * db[2]);
    return gb * mod(x) + prod * mod_grad(x);
  }
};

TestFunctionPair make_pair(const std::string& name, const Profile& prof, const Vec3& direction) {
  auto shared = std::make_shared<Profile>(prof);
  const Vec3 d = direction.normalized();
  TestFunctionPair t;
  t.scalar = {name, [shared](const Vec3& x) { return shared->value(x); },
              [shared](const Vec3& x) { return shared->grad(x); }};
  t.vector = {name, [shared, d](const Vec3& x) -> Vec3 { return shared->value(x) * d; },
              [shared, d](const Vec3& x) -> Mat3 { return d * shared->grad(x).transpose(); }};
  return t;
}

}  // namespace

std::vector<TestFunctionPair> default_test_functions(const Box& domain) {
  const Vec3 lo = domain.lower, ext = domain.upper - domain.lower;
  auto at = [&](double a, double b, double c) { return Vec3(lo + Vec3(a, b, c).cwiseProduct(ext)); };
  auto rad = [&](double r) { return Vec3(r * ext); };
  const double pi = std::numbers::pi;
  auto one = [](const Vec3&) { return 1.0; };
  auto zero = [](const Vec3&) { return Vec3(Vec3::Zero()); };
  // Centres and directions avoid the symmetries of box-centred data, which
  // would make some residuals vanish identically.
  std::vector<TestFunctionPair> out;
  out.push_back(make_pair("bump_plain", Profile{at(0.45, 0.5, 0.55), rad(0.4), one, zero},
                          Vec3(1, 0.5, 0)));
  out.push_back(make_pair(
      "bump_cosx",
      Profile{at(0.45, 0.55, 0.5), rad(0.4),
              [=](const Vec3& x) { return std::cos(2 * pi * (x[0] - lo[0]) / ext[0]); },
              [=](const Vec3& x) {
                return Vec3(-2 * pi / ext[0] * std::sin(2 * pi * (x[0] - lo[0]) / ext[0]), 0, 0);
              }},
      Vec3(0.3, 1, 0)));
  out.push_back(make_pair("bump_offset", Profile{at(0.6, 0.45, 0.55), rad(0.35), one, zero},
                          Vec3(1, 1, 1)));
  out.push_back(make_pair(
      "bump_siny",
      Profile{at(0.5, 0.55, 0.45), rad(0.42),
              [=](const Vec3& x) { return std::sin(pi * (x[1] - lo[1]) / ext[1]); },
              [=](const Vec3& x) {
                return Vec3(0, pi / ext[1] * std::cos(pi * (x[1] - lo[1]) / ext[1]), 0);
              }},
      Vec3(0, 0.3, 1)));
  out.push_back(make_pair(
      "bump_bilinear",
      Profile{at(0.55, 0.5, 0.5), rad(0.44),
              [=](const Vec3& x) { return 1.0 + 2.0 * (x[0] - lo[0]) * (x[1] - lo[1]); },
              [=](const Vec3& x) { return Vec3(2.0 * (x[1] - lo[1]), 2.0 * (x[0] - lo[0]), 0); }},
      Vec3(1, -1, 0.5)));
  return out;
}

ConsistencyResiduals consistency_residuals(const Mesh& mesh, const Trajectory& tr,
                                           const TimeBump& psi, const TestFunctionPair& phi,
                                           const SchemeParams& p, int degree) {
  if (tr.states.empty() || tr.states.back().t < psi.support * (1.0 - 1e-12))
    throw InvalidInput("trajectory ends before the time support of the test function");
  const TetrahedronRule& rule = tetrahedron_rule(degree);
  const double lambda = p.mu / 3.0 + p.eta;
  const int nc = mesh.num_cells();

  // Per-cell quadrature of the test function values and derivatives.
  std::vector<double> phi_mean(nc), grad_div(nc);
  std::vector<Vec3> vphi_mean(nc), sgrad_mean(nc);
  std::vector<Mat3> vgrad_mean(nc);
  for (int c = 0; c < nc; ++c) {
    double pm = 0.0;
    Vec3 vm = Vec3::Zero(), gm = Vec3::Zero();
    Mat3 jm = Mat3::Zero();
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Vec3 x = mesh.point(c, rule.bary[q]);
      const double w = rule.weights[q];
      pm += w * phi.scalar.value(x);
      gm += w * phi.scalar.grad(x);
      vm += w * phi.vector.value(x);
      jm += w * phi.vector.grad(x);
    }
    phi_mean[c] = pm;
    sgrad_mean[c] = gm;
    vphi_mean[c] = vm;
    vgrad_mean[c] = jm;
    grad_div[c] = jm.trace();
  }

  ConsistencyResiduals res;
  double rc = 0.0, rm = 0.0;
  const std::size_t n = tr.states.size();
  for (std::size_t k = 0; k < n; ++k) {
    const State& s = tr.states[k];
    const double t0 = s.t;
    if (t0 >= psi.support) break;
    const double t1 = k + 1 < n ? tr.states[k + 1].t : psi.support;
    const double dpsi = psi(t1) - psi(t0);
    const double ipsi = psi.integral(t0, t1);
    const QVector avg = cell_average(mesh, s.u);
    const QTensor grad = broken_grad(mesh, s.u);
    double mass_phi = 0.0, flux_phi = 0.0;
    double mom_phi = 0.0, conv = 0.0, pres = 0.0, visc = 0.0;
    for (int c = 0; c < nc; ++c) {
      const double vol = mesh.volume(c);
      const double rho = s.rho[c];
      mass_phi += vol * rho * phi_mean[c];
      mom_phi += vol * rho * avg[c].dot(vphi_mean[c]);
      double fl = 0.0, cv = 0.0;
      for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const Vec3 x = mesh.point(c, rule.bary[q]);
        const Vec3 uq = s.u.value(mesh, c, rule.bary[q]);
        fl += rule.weights[q] * uq.dot(phi.scalar.grad(x));
        // (rho <u> (x) u) : grad phi = sum_ab rho <u>_a u_b d_b phi_a
        cv += rule.weights[q] * avg[c].dot(phi.vector.grad(x) * uq);
      }
      flux_phi += vol * rho * fl;
      conv += vol * rho * cv;
      pres += vol * pressure(rho, p) * grad_div[c];
      visc += vol * (p.mu * (grad[c].array() * vgrad_mean[c].array()).sum() +
                     lambda * grad[c].trace() * grad_div[c]);
    }
    if (k == 0) {
      rc += psi(t0) * mass_phi;
      rm += psi(t0) * mom_phi;
    }
    rc += dpsi * mass_phi + ipsi * flux_phi;
    rm += dpsi * mom_phi + ipsi * (conv + pres - visc);
    if (p.forcing) {
      // int_{t0}^{t1} psi(t) int f(t, x) . phi(x) dx dt, Gauss in time.
      const LineRule lr = gauss_legendre(4);
      const double b = std::min(t1, psi.support);
      for (std::size_t i = 0; i < lr.nodes.size(); ++i) {
        const double t = t0 + (b - t0) * lr.nodes[i];
        double fphi = 0.0;
        for (int c = 0; c < nc; ++c) {
          double v = 0.0;
          for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const Vec3 x = mesh.point(c, rule.bary[q]);
            v += rule.weights[q] * p.forcing(t, x).dot(phi.vector.value(x));
          }
          fphi += mesh.volume(c) * v;
        }
        rm += (b - t0) * lr.weights[i] * psi(t) * fphi;
      }
    }
  }
  res.continuity = std::abs(rc);
  res.momentum = std::abs(rm);
  return res;
}

LogLogFit loglog_fit(const std::vector<double>& h, const std::vector<double>& v) {
  if (h.size() != v.size()) throw InvalidInput("fit needs matching h and value sequences");
  if (h.size() < 3) throw InvalidInput("fit needs at least 3 levels");
  const std::size_t n = h.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0) || !(v[i] > 0.0)) throw InvalidInput("fit needs positive values");
    x[i] = std::log(h[i]);
    y[i] = std::log(v[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

ErrorNorms error_vs_reference(const Mesh& mesh, const Trajectory& tr, const ScalarReference& rho,
                              const VectorReference& u, const Box& subbox,
                              const SchemeParams& p) {
  Box bounds{mesh.vertices().front(), mesh.vertices().front()};
  for (const auto& x : mesh.vertices()) {
    bounds.lower = bounds.lower.cwiseMin(x);
    bounds.upper = bounds.upper.cwiseMax(x);
  }
  const double tol = 1e-12 * (bounds.upper - bounds.lower).norm();
  if (!bounds.contains(subbox.lower, tol) || !bounds.contains(subbox.upper, tol) ||
      (subbox.upper.array() <= subbox.lower.array()).any())
    throw InvalidInput("error sub-box is empty or not inside the domain");
  if (tr.states.size() < 2) throw InvalidInput("trajectory needs at least one step");

  std::vector<int> cells;
  for (int c = 0; c < mesh.num_cells(); ++c)
    if (subbox.contains(mesh.centroid(c))) cells.push_back(c);

  const TetrahedronRule& rule = tetrahedron_rule(4);
  const LineRule time = gauss_legendre(3);
  double ed = 0.0, ev = 0.0;
  for (std::size_t k = 0; k + 1 < tr.states.size(); ++k) {
    const State& s = tr.states[k];
    const double t0 = s.t, t1 = tr.states[k + 1].t;
    for (std::size_t i = 0; i < time.nodes.size(); ++i) {
      const double t = t0 + (t1 - t0) * time.nodes[i];
      const double wt = (t1 - t0) * time.weights[i];
      for (int c : cells) {
        double sd = 0.0, sv = 0.0;
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
          const Vec3 x = mesh.point(c, rule.bary[q]);
          sd += rule.weights[q] * std::pow(std::abs(s.rho[c] - rho(t, x)), p.gamma);
          sv += rule.weights[q] * (s.u.value(mesh, c, rule.bary[q]) - u(t, x)).squaredNorm();
        }
        ed += wt * mesh.volume(c) * sd;
        ev += wt * mesh.volume(c) * sv;
      }
    }
  }
  return {std::pow(ed, 1.0 / p.gamma), std::sqrt(ev)};
}

}  // namespace isoflow
