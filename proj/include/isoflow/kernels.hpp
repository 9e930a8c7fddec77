#pragma once

// Data-parallel inner loops used by the scheme and the diagnostics.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant is picked once at runtime from the CPU feature bits;
// ISOFLOW_ISA=scalar in the environment (or force_isa) pins the reference
// path. Both paths evaluate the same operation sequence without fused
// multiply-add, so they agree bit for bit.

#include <span>
#include <string_view>

namespace isoflow::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Instruction set used by the dispatching entry points.
Isa active_isa();
/// Overrides the runtime choice; requesting an unsupported ISA throws InvalidInput.
void force_isa(Isa isa);
bool isa_supported(Isa isa);

/// Dissipative upwind flux per face:
///   out[i] = r_out[i]*min(s,0) + r_in[i]*max(s,0) - eps/2*(r_out-r_in)*chi(s/eps)
/// with chi the unit hat on [-1,1]. All spans must have equal length.
void upwind_flux(std::span<const double> r_in, std::span<const double> r_out,
                 std::span<const double> s, double eps, std::span<double> out);

/// Partial derivatives of upwind_flux with respect to r_in, r_out and s.
/// The s-derivative takes the one-sided value 0 at |s| == eps.
void upwind_flux_derivatives(std::span<const double> r_in, std::span<const double> r_out,
                             std::span<const double> s, double eps, std::span<double> d_in,
                             std::span<double> d_out, std::span<double> d_s);

// Reductions accumulate in four interleaved partial sums combined as
// (p0 + p1) + (p2 + p3), followed by the tail in index order.

/// sum_i w[i] * (b[i] - a[i])^2
double weighted_jump_squares(std::span<const double> a, std::span<const double> b,
                             std::span<const double> w);

/// sum_i a[i] * b[i]
double dot(std::span<const double> a, std::span<const double> b);

namespace scalar {
void upwind_flux(const double* r_in, const double* r_out, const double* s, double eps,
                 double* out, std::size_t n);
void upwind_flux_derivatives(const double* r_in, const double* r_out, const double* s,
                             double eps, double* d_in, double* d_out, double* d_s,
                             std::size_t n);
double weighted_jump_squares(const double* a, const double* b, const double* w, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
void upwind_flux(const double* r_in, const double* r_out, const double* s, double eps,
                 double* out, std::size_t n);
void upwind_flux_derivatives(const double* r_in, const double* r_out, const double* s,
                             double eps, double* d_in, double* d_out, double* d_s,
                             std::size_t n);
double weighted_jump_squares(const double* a, const double* b, const double* w, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace isoflow::kernels
