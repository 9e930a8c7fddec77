#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "isoflow/geometry.hpp"
#include "isoflow/scheme.hpp"

namespace isoflow {

/// Value, gradient and Hessian with respect to (t, x, y, z).
struct Jet {
  double v = 0.0;
  std::array<double, 4> g{};
  std::array<std::array<double, 4>, 4> H{};

  Jet() = default;
  Jet(double c) : v(c) {}  // NOLINT: constants convert implicitly
  static Jet variable(int i, double value);
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet exp(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet pow(const Jet& a, double r);

/// Closed-form density and momentum on the unit cube satisfying
/// d_t rho + div m = 0, with rho >= rho_min > 0 and m = 0 on the boundary.
/// The forcing makes (rho, m / rho) an exact solution of the momentum equation.
class ManufacturedCase {
 public:
  template <class T>
  using Generator = std::function<void(const std::array<T, 4>& tx, T& rho, std::array<T, 3>& m)>;

  /// `gen` is callable with both double and Jet coordinates (t, x, y, z).
  template <class G>
  ManufacturedCase(std::string name, G gen) : name_(std::move(name)), value_(gen), jet_(gen) {}

  const std::string& name() const { return name_; }
  double density(double t, const Vec3& x) const;
  Vec3 momentum(double t, const Vec3& x) const;
  Vec3 velocity(double t, const Vec3& x) const;
  /// d_t m + div(m (x) u) + grad p(rho) - mu Lap u - (mu/3 + eta) grad div u
  Vec3 forcing(double t, const Vec3& x, const SchemeParams& p) const;
  /// Largest pointwise residual of both equations at random points, with all
  /// derivatives taken by fourth-order central differences of density() and
  /// velocity().
  double finite_difference_residual(const SchemeParams& p, int samples, std::uint64_t seed,
                                    double t_max = 1.0) const;

 private:
  void eval(double t, const Vec3& x, Jet& rho, std::array<Jet, 3>& m) const;

  std::string name_;
  Generator<double> value_;
  Generator<Jet> jet_;
};

/// Built-in cases: "acoustic" (density oscillating around 1), "rotating_bump"
/// (steady density bump in a swirling flow), "polynomial" (polynomial data,
/// density drifting linearly in time).
ManufacturedCase manufactured_case(const std::string& name);
std::vector<std::string> manufactured_case_names();

}  // namespace isoflow
