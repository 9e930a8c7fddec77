#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "isoflow/mesh.hpp"
#include "isoflow/scheme.hpp"

namespace isoflow {

enum class StudyKind { none, energy, consistency, mms_convergence, probes };

/// Run and study settings read from a `key = value` file. Blank lines and
/// text after '#' are ignored; unknown keys are errors.
struct RunConfig {
  /// Mesh file; when empty a Kuhn box mesh with `n` cells per axis on
  /// [0, extents] is built.
  std::string mesh;
  std::array<int, 3> n{4, 4, 4};
  Vec3 extents = Vec3::Ones();

  /// Scheme parameters except the forcing, which is attached for
  /// manufactured runs.
  SchemeParams params;

  /// Stop at t_end, or after `steps` steps when t_end is zero.
  double t_end = 0.0;
  int steps = 10;

  /// constant | gaussian_bump | random | manufactured
  std::string initial = "gaussian_bump";
  double initial_density = 1.0;
  /// Gaussian bump variance relative to the mean squared extent.
  double bump_width = 0.02;
  std::string mms_case = "acoustic";

  std::string output_dir = "out";
  /// Write a snapshot every save_every steps plus the last state; 0 writes
  /// no snapshots.
  int save_every = 0;
  /// VTK dumps at the snapshot cadence, or of the first and last states
  /// when save_every is 0.
  bool vtk = false;
  /// Pin the scalar kernels so outputs are bit-identical across machines.
  bool reproducible = true;
  std::uint64_t seed = 1;

  StudyKind study = StudyKind::none;
  std::vector<int> levels;
  std::vector<double> gammas;
  /// Sub-box K of the error norms; defaults to the middle half of the domain.
  Box subbox{Vec3::Constant(0.25), Vec3::Constant(0.75)};
  bool subbox_set = false;

  Box domain() const { return Box{Vec3::Zero(), extents}; }
  /// Checks cross-field consistency; throws InvalidInput.
  void validate() const;
};

RunConfig parse_config(std::istream& in);
RunConfig read_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(write_config(c)) reproduces c.
std::string write_config(const RunConfig& c);

const char* to_string(StudyKind k);

}  // namespace isoflow
