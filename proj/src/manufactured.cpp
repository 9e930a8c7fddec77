#include "isoflow/manufactured.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "isoflow/error.hpp"

namespace isoflow {

Jet Jet::variable(int i, double value) {
  Jet j(value);
  j.g[i] = 1.0;
  return j;
}

Jet operator+(const Jet& a, const Jet& b) {
  Jet r(a.v + b.v);
  for (int i = 0; i < 4; ++i) {
    r.g[i] = a.g[i] + b.g[i];
    for (int j = 0; j < 4; ++j) r.H[i][j] = a.H[i][j] + b.H[i][j];
  }
  return r;
}

Jet operator-(const Jet& a) {
  Jet r(-a.v);
  for (int i = 0; i < 4; ++i) {
    r.g[i] = -a.g[i];
    for (int j = 0; j < 4; ++j) r.H[i][j] = -a.H[i][j];
  }
  return r;
}

Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.v * b.v);
  for (int i = 0; i < 4; ++i) {
    r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int j = 0; j < 4; ++j)
      r.H[i][j] = a.H[i][j] * b.v + a.v * b.H[i][j] + a.g[i] * b.g[j] + b.g[i] * a.g[j];
  }
  return r;
}

namespace {

// f(a) given f, f', f'' at a.v
Jet chain(const Jet& a, double f0, double f1, double f2) {
  Jet r(f0);
  for (int i = 0; i < 4; ++i) {
    r.g[i] = f1 * a.g[i];
    for (int j = 0; j < 4; ++j) r.H[i][j] = f1 * a.H[i][j] + f2 * a.g[i] * a.g[j];
  }
  return r;
}

}  // namespace

Jet operator/(const Jet& a, const Jet& b) {
  const double inv = 1.0 / b.v;
  return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }

Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }

Jet pow(const Jet& a, double r) {
  return chain(a, std::pow(a.v, r), r * std::pow(a.v, r - 1.0), r * (r - 1.0) * std::pow(a.v, r - 2.0));
}

void ManufacturedCase::eval(double t, const Vec3& x, Jet& rho, std::array<Jet, 3>& m) const {
  const std::array<Jet, 4> tx{Jet::variable(0, t), Jet::variable(1, x[0]), Jet::variable(2, x[1]),
                              Jet::variable(3, x[2])};
  jet_(tx, rho, m);
}

double ManufacturedCase::density(double t, const Vec3& x) const {
  double rho;
  std::array<double, 3> m;
  value_({t, x[0], x[1], x[2]}, rho, m);
  return rho;
}

Vec3 ManufacturedCase::momentum(double t, const Vec3& x) const {
  double rho;
  std::array<double, 3> m;
  value_({t, x[0], x[1], x[2]}, rho, m);
  return Vec3(m[0], m[1], m[2]);
}

Vec3 ManufacturedCase::velocity(double t, const Vec3& x) const {
  double rho;
  std::array<double, 3> m;
  value_({t, x[0], x[1], x[2]}, rho, m);
  return Vec3(m[0], m[1], m[2]) / rho;
}

Vec3 ManufacturedCase::forcing(double t, const Vec3& x, const SchemeParams& p) const {
  Jet rho;
  std::array<Jet, 3> m;
  eval(t, x, rho, m);
  std::array<Jet, 3> u;
  for (int a = 0; a < 3; ++a) u[a] = m[a] / rho;
  const Jet pr = Jet(p.a) * pow(rho, p.gamma);
  const double lambda = p.mu / 3.0 + p.eta;
  Vec3 f;
  for (int a = 0; a < 3; ++a) {
    double conv = 0.0, lap = 0.0, graddiv = 0.0;
    for (int b = 0; b < 3; ++b) {
      // d_b (m_a u_b)
      conv += m[a].g[b + 1] * u[b].v + m[a].v * u[b].g[b + 1];
      lap += u[a].H[b + 1][b + 1];
      graddiv += u[b].H[a + 1][b + 1];
    }
    f[a] = m[a].g[0] + conv + pr.g[a + 1] - p.mu * lap - lambda * graddiv;
  }
  return f;
}

double ManufacturedCase::finite_difference_residual(const SchemeParams& p, int samples,
                                                    std::uint64_t seed, double t_max) const {
  const double d = 1e-3;
  // fourth-order central first and second differences along coordinate i of (t, x)
  using Fn = std::function<double(const std::array<double, 4>&)>;
  auto shift = [](std::array<double, 4> z, int i, double s) {
    z[i] += s;
    return z;
  };
  auto d1 = [&](const Fn& f, const std::array<double, 4>& z, int i) {
    return (-f(shift(z, i, 2 * d)) + 8 * f(shift(z, i, d)) - 8 * f(shift(z, i, -d)) +
            f(shift(z, i, -2 * d))) /
           (12 * d);
  };
  auto d2 = [&](const Fn& f, const std::array<double, 4>& z, int i, int j) {
    if (i == j)
      return (-f(shift(z, i, 2 * d)) + 16 * f(shift(z, i, d)) - 30 * f(z) + 16 * f(shift(z, i, -d)) -
              f(shift(z, i, -2 * d))) /
             (12 * d * d);
    const Fn fi = [&](const std::array<double, 4>& w) { return d1(f, w, i); };
    return d1(fi, z, j);
  };
  auto at = [](const std::array<double, 4>& z) { return Vec3(z[1], z[2], z[3]); };
  const Fn rho = [&](const std::array<double, 4>& z) { return density(z[0], at(z)); };
  std::array<Fn, 3> m, u, pu;
  for (int a = 0; a < 3; ++a) {
    m[a] = [&, a](const std::array<double, 4>& z) { return momentum(z[0], at(z))[a]; };
    u[a] = [&, a](const std::array<double, 4>& z) { return velocity(z[0], at(z))[a]; };
  }
  const Fn pr = [&](const std::array<double, 4>& z) { return pressure(density(z[0], at(z)), p); };
  const double lambda = p.mu / 3.0 + p.eta;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.05, 0.95), time(0.05, t_max);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const std::array<double, 4> z{time(rng), pos(rng), pos(rng), pos(rng)};
    double cont = d1(rho, z, 0);
    for (int b = 0; b < 3; ++b) cont += d1(m[b], z, b + 1);
    worst = std::max(worst, std::abs(cont));
    const Vec3 f = forcing(z[0], at(z), p);
    for (int a = 0; a < 3; ++a) {
      double r = d1(m[a], z, 0) + d1(pr, z, a + 1) - f[a];
      for (int b = 0; b < 3; ++b) {
        const Fn flux = [&, a, b](const std::array<double, 4>& w) { return m[a](w) * u[b](w); };
        r += d1(flux, z, b + 1);
        r -= p.mu * d2(u[a], z, b + 1, b + 1);
        r -= lambda * d2(u[b], z, a + 1, b + 1);
      }
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

namespace {

const double pi = std::numbers::pi;

using std::cos;
using std::exp;
using std::sin;

// Components of curl(0, 0, Psi) = (d_y Psi, -d_x Psi, 0) with
// Psi = (x(1-x) y(1-y))^2 z(1-z), which vanish on the boundary of the cube.
template <class T>
std::array<T, 2> swirl(const std::array<T, 4>& tx) {
  const T &x = tx[1], &y = tx[2], &z = tx[3];
  const T px = x * (T(1.0) - x), py = y * (T(1.0) - y), zeta = z * (T(1.0) - z);
  const T dpx = T(1.0) - T(2.0) * x, dpy = T(1.0) - T(2.0) * y;
  return {T(2.0) * px * px * py * dpy * zeta, -(T(2.0) * px * dpx * py * py * zeta)};
}

// Each case has momentum m = g'(t) M + w with div w = 0 and density
// rho0 - g(t) div M, so the continuity equation holds exactly.

struct Acoustic {
  // M = s(x) s(y) s(z) (1, 1, 1) with s = sin(pi .)^2, rho0 = 1.
  template <class T>
  void operator()(const std::array<T, 4>& tx, T& rho, std::array<T, 3>& m) const {
    const T& t = tx[0];
    std::array<T, 3> s, ds;
    for (int i = 0; i < 3; ++i) {
      const T sn = sin(T(pi) * tx[i + 1]);
      s[i] = sn * sn;
      ds[i] = T(pi) * sin(T(2 * pi) * tx[i + 1]);
    }
    const double amp = 0.05 / pi;
    const T g = T(amp) * sin(T(2 * pi) * t);
    const T dg = T(2 * pi * amp) * cos(T(2 * pi) * t);
    const T b = s[0] * s[1] * s[2];
    const T divm = ds[0] * s[1] * s[2] + s[0] * ds[1] * s[2] + s[0] * s[1] * ds[2];
    rho = T(1.0) - g * divm;
    for (int a = 0; a < 3; ++a) m[a] = dg * b;
  }
};

struct RotatingBump {
  // Steady density bump, momentum swirling about the vertical axis through
  // the bump centre with a time-modulated amplitude.
  template <class T>
  void operator()(const std::array<T, 4>& tx, T& rho, std::array<T, 3>& m) const {
    T r2 = T(0.0);
    for (int i = 1; i <= 3; ++i) {
      const T d = tx[i] - T(0.5);
      r2 = r2 + d * d;
    }
    rho = T(1.0) + T(0.5) * exp(-r2 / T(0.05));
    const T amp = T(80.0) * (T(1.0) + T(0.5) * sin(T(pi) * tx[0]));
    const auto w = swirl(tx);
    m[0] = amp * w[0];
    m[1] = amp * w[1];
    m[2] = T(0.0);
  }
};

struct Polynomial {
  // M = q(x) q(y) q(z) (1, 2, -1) with q = x(1 - x); g = 4 t;
  // rho0 = 1 + 0.2 x y.
  template <class T>
  void operator()(const std::array<T, 4>& tx, T& rho, std::array<T, 3>& m) const {
    std::array<T, 3> q, dq;
    for (int i = 0; i < 3; ++i) {
      q[i] = tx[i + 1] * (T(1.0) - tx[i + 1]);
      dq[i] = T(1.0) - T(2.0) * tx[i + 1];
    }
    const T b = q[0] * q[1] * q[2];
    const std::array<double, 3> dir{1.0, 2.0, -1.0};
    const T divm = T(dir[0]) * dq[0] * q[1] * q[2] + T(dir[1]) * q[0] * dq[1] * q[2] +
                   T(dir[2]) * q[0] * q[1] * dq[2];
    const T g = T(4.0) * tx[0];
    rho = T(1.0) + T(0.2) * tx[1] * tx[2] - g * divm;
    for (int a = 0; a < 3; ++a) m[a] = T(4.0 * dir[a]) * b;
  }
};

}  // namespace

ManufacturedCase manufactured_case(const std::string& name) {
  if (name == "acoustic") return ManufacturedCase(name, Acoustic{});
  if (name == "rotating_bump") return ManufacturedCase(name, RotatingBump{});
  if (name == "polynomial") return ManufacturedCase(name, Polynomial{});
  throw InvalidInput("unknown manufactured case '" + name + "'");
}

std::vector<std::string> manufactured_case_names() { return {"acoustic", "rotating_bump", "polynomial"}; }

}  // namespace isoflow
