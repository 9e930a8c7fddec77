#include <atomic>
#include <cstdlib>
#include <string>

#include "isoflow/error.hpp"
#include "isoflow/kernels.hpp"

namespace isoflow::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("ISOFLOW_ISA")) {
    if (std::string(env) == "scalar") return Isa::scalar;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void check_sizes(std::size_t n, std::initializer_list<std::size_t> others) {
  for (auto m : others)
    if (m != n) throw InvalidInput("kernel spans differ in length");
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(ISOFLOW_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_supported(isa))
    throw InvalidInput("instruction set not available: " + std::string(isa_name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

#if defined(ISOFLOW_HAVE_AVX2)
#define ISOFLOW_DISPATCH(call) \
  (active_isa() == Isa::avx2 ? avx2::call : scalar::call)
#else
#define ISOFLOW_DISPATCH(call) scalar::call
#endif

void upwind_flux(std::span<const double> r_in, std::span<const double> r_out,
                 std::span<const double> s, double eps, std::span<double> out) {
  check_sizes(s.size(), {r_in.size(), r_out.size(), out.size()});
  ISOFLOW_DISPATCH(upwind_flux(r_in.data(), r_out.data(), s.data(), eps, out.data(), s.size()));
}

void upwind_flux_derivatives(std::span<const double> r_in, std::span<const double> r_out,
                             std::span<const double> s, double eps, std::span<double> d_in,
                             std::span<double> d_out, std::span<double> d_s) {
  check_sizes(s.size(), {r_in.size(), r_out.size(), d_in.size(), d_out.size(), d_s.size()});
  ISOFLOW_DISPATCH(upwind_flux_derivatives(r_in.data(), r_out.data(), s.data(), eps, d_in.data(),
                                           d_out.data(), d_s.data(), s.size()));
}

double weighted_jump_squares(std::span<const double> a, std::span<const double> b,
                             std::span<const double> w) {
  check_sizes(a.size(), {b.size(), w.size()});
  return ISOFLOW_DISPATCH(weighted_jump_squares(a.data(), b.data(), w.data(), a.size()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), {b.size()});
  return ISOFLOW_DISPATCH(dot(a.data(), b.data(), a.size()));
}

#undef ISOFLOW_DISPATCH

}  // namespace isoflow::kernels
