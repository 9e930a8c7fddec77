#include "assembly.hpp"

#include <algorithm>
#include <cmath>

#include "isoflow/kernels.hpp"

namespace isoflow {

namespace detail {
namespace {

// Per-face quantities gathered into contiguous arrays for the flux kernels.
struct FaceBatch {
  std::vector<double> s, r_in, r_out, flux, d_in, d_out, d_s;
  std::array<std::vector<double>, 3> m_in, m_out, m_flux, m_ds;
};

struct CellData {
  QVector avg;       // <u>_E
  QVector momentum;  // rho_E <u>_E
  QVector momentum_old;
  // Interior index of each local face, -1 on the boundary.
  std::vector<std::array<int, 4>> interior;
};

CellData cell_data(const Mesh& mesh, const State& cur, const State& old) {
  CellData d;
  d.avg = cell_average(mesh, cur.u);
  const QVector avg_old = cell_average(mesh, old.u);
  const int nc = mesh.num_cells();
  d.momentum = QVector(nc);
  d.momentum_old = QVector(nc);
  d.interior.resize(nc);
  for (int c = 0; c < nc; ++c) {
    d.momentum[c] = cur.rho[c] * d.avg[c];
    d.momentum_old[c] = old.rho[c] * avg_old[c];
    for (int i = 0; i < 4; ++i) d.interior[c][i] = mesh.interior_index(mesh.cell_faces(c)[i]);
  }
  return d;
}

FaceBatch face_batch(const Mesh& mesh, const State& cur, const CRField& transport,
                     const CellData& cd, double eps, bool derivatives) {
  const auto faces = mesh.interior_faces();
  const std::size_t n = faces.size();
  FaceBatch b;
  b.s.resize(n);
  b.r_in.resize(n);
  b.r_out.resize(n);
  b.flux.resize(n);
  for (int a = 0; a < 3; ++a) {
    b.m_in[a].resize(n);
    b.m_out[a].resize(n);
    b.m_flux[a].resize(n);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const Face& f = mesh.face(faces[j]);
    b.s[j] = transport[faces[j]].dot(f.normal);
    b.r_in[j] = cur.rho[f.owner];
    b.r_out[j] = cur.rho[f.neighbor];
    for (int a = 0; a < 3; ++a) {
      b.m_in[a][j] = cd.momentum[f.owner][a];
      b.m_out[a][j] = cd.momentum[f.neighbor][a];
    }
  }
  kernels::upwind_flux(b.r_in, b.r_out, b.s, eps, b.flux);
  for (int a = 0; a < 3; ++a) kernels::upwind_flux(b.m_in[a], b.m_out[a], b.s, eps, b.m_flux[a]);
  if (derivatives) {
    b.d_in.resize(n);
    b.d_out.resize(n);
    b.d_s.resize(n);
    kernels::upwind_flux_derivatives(b.r_in, b.r_out, b.s, eps, b.d_in, b.d_out, b.d_s);
    std::vector<double> scratch_in(n), scratch_out(n);
    for (int a = 0; a < 3; ++a) {
      b.m_ds[a].resize(n);
      kernels::upwind_flux_derivatives(b.m_in[a], b.m_out[a], b.s, eps, scratch_in, scratch_out,
                                       b.m_ds[a]);
    }
  }
  return b;
}

// Forcing load: integral of f(t, x) times the CR basis function, per interior
// face and component.
}  // namespace

Eigen::VectorXd forcing_load(const Mesh& mesh, const SchemeParams& p, double t) {
  if (!p.forcing) return {};
  Eigen::VectorXd out = Eigen::VectorXd::Zero(3 * static_cast<Eigen::Index>(mesh.num_interior_faces()));
  const TetrahedronRule& rule = tetrahedron_rule(4);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    std::array<Vec3, 4> load;
    load.fill(Vec3::Zero());
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Vec3 fx = p.forcing(t, mesh.point(c, rule.bary[q]));
      for (int i = 0; i < 4; ++i) load[i] += (rule.weights[q] * (1.0 - 3.0 * rule.bary[q][i])) * fx;
    }
    for (int i = 0; i < 4; ++i) {
      const int j = mesh.interior_index(mesh.cell_faces(c)[i]);
      if (j < 0) continue;
      out.segment<3>(3 * j) += mesh.volume(c) * load[i];
    }
  }
  return out;
}

namespace {

// Small column-keyed accumulators for one block row of the Jacobian.
template <class V>
struct Accumulator {
  std::vector<std::pair<int, V>> entries;
  void clear() { entries.clear(); }
  void add(int col, const V& v) {
    for (auto& e : entries)
      if (e.first == col) {
        e.second += v;
        return;
      }
    entries.emplace_back(col, v);
  }
  void sort() {
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
  }
};

struct CsrBuilder {
  std::vector<int> outer{0};
  std::vector<int> inner;
  std::vector<double> values;
  void push(int col, double v) {
    inner.push_back(col);
    values.push_back(v);
  }
  void end_row() { outer.push_back(static_cast<int>(inner.size())); }
};

}  // namespace

Eigen::VectorXd residual_scales(const Mesh& mesh, const State& old, double dt,
                                const SchemeParams& p) {
  const int nc = mesh.num_cells();
  const int nf = mesh.num_interior_faces();
  double mass = 0.0;
  for (int c = 0; c < nc; ++c) mass += mesh.volume(c) * old.rho[c];
  const double rho_ref = mass / mesh.domain_volume();
  double speed = std::sqrt(pressure_derivative(rho_ref, p));
  for (int f : mesh.interior_faces()) speed = std::max(speed, old.u[f].cwiseAbs().maxCoeff());
  Eigen::VectorXd s(nc + 3 * nf);
  for (int c = 0; c < nc; ++c) s[c] = mesh.volume(c) * rho_ref / dt;
  const auto faces = mesh.interior_faces();
  for (int j = 0; j < nf; ++j) {
    const Face& f = mesh.face(faces[j]);
    const double w = 0.25 * (mesh.volume(f.owner) + mesh.volume(f.neighbor));
    s.segment<3>(nc + 3 * j).setConstant(w * rho_ref * speed / dt);
  }
  return s;
}

void assemble_system(const Mesh& mesh, const State& cur, const State& old, double dt,
                     const SchemeParams& p, const AssemblyOptions& opt, System& out) {
  const int nc = mesh.num_cells();
  const int nf = mesh.num_interior_faces();
  if (cur.rho.size() != nc || old.rho.size() != nc || cur.u.size() != mesh.num_faces() ||
      old.u.size() != mesh.num_faces())
    throw InvalidInput("state does not match the mesh");
  const auto faces = mesh.interior_faces();
  const double eps = p.eps(mesh.h());
  const double lambda = p.mu / 3.0 + p.eta;
  const bool frozen = opt.transport != nullptr;
  const CRField& transport = frozen ? *opt.transport : cur.u;

  const CellData cd = cell_data(mesh, cur, old);
  const FaceBatch fb = face_batch(mesh, cur, transport, cd, eps, opt.jacobian);

  Eigen::VectorXd& r = out.residual;
  r.setZero(nc + 3 * nf);

  // Continuity rows.
  for (int c = 0; c < nc; ++c) r[c] = mesh.volume(c) * (cur.rho[c] - old.rho[c]) / dt;
  // Cell momentum balances C_E (time derivative plus outgoing fluxes).
  std::vector<Vec3> balance(nc);
  for (int c = 0; c < nc; ++c)
    balance[c] = mesh.volume(c) * (cd.momentum[c] - cd.momentum_old[c]) / dt;
  if (p.convection) {
    for (int j = 0; j < nf; ++j) {
      const Face& f = mesh.face(faces[j]);
      const double q = f.area * fb.flux[j];
      r[f.owner] += q;
      r[f.neighbor] -= q;
      const Vec3 g = f.area * Vec3(fb.m_flux[0][j], fb.m_flux[1][j], fb.m_flux[2][j]);
      balance[f.owner] += g;
      balance[f.neighbor] -= g;
    }
  }
  // Momentum rows: cell contributions distributed to the interior faces.
  for (int c = 0; c < nc; ++c) {
    const double vol = mesh.volume(c);
    const auto& fs = mesh.cell_faces(c);
    Mat3 grad = Mat3::Zero();
    std::array<Vec3, 4> g;
    for (int i = 0; i < 4; ++i) {
      g[i] = cr_basis_gradient(mesh, c, i);
      grad += cur.u[fs[i]] * g[i].transpose();
    }
    const double div = grad.trace();
    const double pr = p.pressure_term ? pressure(cur.rho[c], p) : 0.0;
    for (int i = 0; i < 4; ++i) {
      const int j = cd.interior[c][i];
      if (j < 0) continue;
      Vec3 v = 0.25 * balance[c] - pr * vol * g[i] + p.mu * vol * (grad * g[i]) +
               lambda * vol * div * g[i];
      r.segment<3>(nc + 3 * j) += v;
    }
  }
  if (p.forcing) {
    if (opt.load)
      r.segment(nc, opt.load->size()) -= *opt.load;
    else
      r.segment(nc, 3 * static_cast<Eigen::Index>(mesh.num_interior_faces())) -=
          forcing_load(mesh, p, old.t + dt);
  }

  if (!opt.jacobian) return;

  CsrBuilder csr;
  csr.inner.reserve(static_cast<std::size_t>(nc) * 17 + static_cast<std::size_t>(nf) * 3 * 80);
  csr.values.reserve(csr.inner.capacity());

  // Continuity rows.
  Accumulator<double> arho;
  Accumulator<Vec3> au;
  for (int c = 0; c < nc; ++c) {
    arho.clear();
    au.clear();
    arho.add(c, mesh.volume(c) / dt);
    if (p.convection) {
      for (int i = 0; i < 4; ++i) {
        const int j = cd.interior[c][i];
        if (j < 0) continue;
        const Face& f = mesh.face(faces[j]);
        const double w = mesh.face_sign(c, i) * f.area;
        arho.add(f.owner, w * fb.d_in[j]);
        arho.add(f.neighbor, w * fb.d_out[j]);
        if (!frozen) au.add(j, w * fb.d_s[j] * f.normal);
      }
    }
    arho.sort();
    au.sort();
    for (const auto& [col, v] : arho.entries) csr.push(col, v);
    for (const auto& [k, v] : au.entries)
      for (int b = 0; b < 3; ++b) csr.push(nc + 3 * k + b, v[b]);
    csr.end_row();
  }

  // Momentum rows.
  Accumulator<Vec3> mrho;
  Accumulator<Mat3> mu;
  const Mat3 I = Mat3::Identity();
  // Derivative of 1/4 * sign * |Gamma| * Up[m](s) with respect to the momentum
  // of cell `y`, weighted by `d`.
  auto add_momentum_dependence = [&](int y, double d) {
    mrho.add(y, d * cd.avg[y]);
    const Mat3 block = (d * cur.rho[y] * 0.25) * I;
    for (int i = 0; i < 4; ++i) {
      const int k = cd.interior[y][i];
      if (k >= 0) mu.add(k, block);
    }
  };
  for (int j = 0; j < nf; ++j) {
    mrho.clear();
    mu.clear();
    const Face& fj = mesh.face(faces[j]);
    for (int c : {fj.owner, fj.neighbor}) {
      const double vol = mesh.volume(c);
      int l = 0;
      while (cd.interior[c][l] != j) ++l;
      const Vec3 gl = cr_basis_gradient(mesh, c, l);
      // Time derivative of the cell momentum.
      mrho.add(c, (0.25 * vol / dt) * cd.avg[c]);
      const Mat3 time_block = (0.25 * vol / dt * cur.rho[c] * 0.25) * I;
      for (int i = 0; i < 4; ++i) {
        const int k = cd.interior[c][i];
        if (k < 0) continue;
        const Vec3 gi = cr_basis_gradient(mesh, c, i);
        mu.add(k, time_block + p.mu * vol * gi.dot(gl) * I + lambda * vol * gl * gi.transpose());
      }
      if (p.pressure_term) mrho.add(c, -pressure_derivative(cur.rho[c], p) * vol * gl);
      if (!p.convection) continue;
      for (int i = 0; i < 4; ++i) {
        const int k = cd.interior[c][i];
        if (k < 0) continue;
        const Face& g = mesh.face(faces[k]);
        const double w = 0.25 * mesh.face_sign(c, i) * g.area;
        add_momentum_dependence(g.owner, w * fb.d_in[k]);
        add_momentum_dependence(g.neighbor, w * fb.d_out[k]);
        if (!frozen) {
          const Vec3 ds(fb.m_ds[0][k], fb.m_ds[1][k], fb.m_ds[2][k]);
          mu.add(k, w * ds * g.normal.transpose());
        }
      }
    }
    mrho.sort();
    mu.sort();
    for (int a = 0; a < 3; ++a) {
      for (const auto& [col, v] : mrho.entries) csr.push(col, v[a]);
      for (const auto& [k, m] : mu.entries)
        for (int b = 0; b < 3; ++b) csr.push(nc + 3 * k + b, m(a, b));
      csr.end_row();
    }
  }

  const int n = nc + 3 * nf;
  out.jacobian = Eigen::Map<const RowMatrix>(n, n, static_cast<int>(csr.inner.size()),
                                             csr.outer.data(), csr.inner.data(),
                                             csr.values.data());
}

}  // namespace detail

Eigen::VectorXd assemble_continuity_residual(const Mesh& mesh, const State& state_new,
                                             const State& state_old, double dt,
                                             const SchemeParams& p) {
  detail::System sys;
  detail::assemble_system(mesh, state_new, state_old, dt, p, {}, sys);
  return sys.residual.head(mesh.num_cells());
}

Eigen::VectorXd assemble_momentum_residual(const Mesh& mesh, const State& state_new,
                                           const State& state_old, double dt,
                                           const SchemeParams& p) {
  detail::System sys;
  detail::assemble_system(mesh, state_new, state_old, dt, p, {}, sys);
  return sys.residual.tail(3 * mesh.num_interior_faces());
}

}  // namespace isoflow
