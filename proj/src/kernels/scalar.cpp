#include "isoflow/kernels.hpp"

namespace isoflow::kernels::scalar {

namespace {

double chi(double z) {
  if (z < -1.0) return 0.0;
  if (z <= 0.0) return z + 1.0;
  if (z <= 1.0) return 1.0 - z;
  return 0.0;
}

}  // namespace

void upwind_flux(const double* r_in, const double* r_out, const double* s, double eps,
                 double* out, std::size_t n) {
  const double half_eps = 0.5 * eps;
  for (std::size_t i = 0; i < n; ++i) {
    const double sp = s[i] > 0.0 ? s[i] : 0.0;
    const double sm = s[i] < 0.0 ? s[i] : 0.0;
    const double c = chi(s[i] / eps);
    const double upw = r_out[i] * sm + r_in[i] * sp;
    out[i] = upw - half_eps * (r_out[i] - r_in[i]) * c;
  }
}

void upwind_flux_derivatives(const double* r_in, const double* r_out, const double* s,
                             double eps, double* d_in, double* d_out, double* d_s,
                             std::size_t n) {
  const double half_eps = 0.5 * eps;
  for (std::size_t i = 0; i < n; ++i) {
    const double sp = s[i] > 0.0 ? s[i] : 0.0;
    const double sm = s[i] < 0.0 ? s[i] : 0.0;
    const double c = chi(s[i] / eps);
    d_in[i] = sp + half_eps * c;
    d_out[i] = sm - half_eps * c;
    const double avg = 0.5 * (r_in[i] + r_out[i]);
    const double jump = r_out[i] - r_in[i];
    double sgn = 0.0;
    if (s[i] > eps) sgn = 1.0;
    else if (s[i] < -eps) sgn = -1.0;
    d_s[i] = avg - 0.5 * jump * sgn;
  }
}

double weighted_jump_squares(const double* a, const double* b, const double* w, std::size_t n) {
  double p[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) {
      const double d = b[i + l] - a[i + l];
      p[l] = p[l] + w[i + l] * (d * d);
    }
  }
  double sum = (p[0] + p[1]) + (p[2] + p[3]);
  for (; i < n; ++i) {
    const double d = b[i] - a[i];
    sum = sum + w[i] * (d * d);
  }
  return sum;
}

double dot(const double* a, const double* b, std::size_t n) {
  double p[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) p[l] = p[l] + a[i + l] * b[i + l];
  }
  double sum = (p[0] + p[1]) + (p[2] + p[3]);
  for (; i < n; ++i) sum = sum + a[i] * b[i];
  return sum;
}

}  // namespace isoflow::kernels::scalar
