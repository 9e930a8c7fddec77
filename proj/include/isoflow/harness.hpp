#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "isoflow/config.hpp"
#include "isoflow/diagnostics.hpp"
#include "isoflow/manufactured.hpp"
#include "isoflow/mesh.hpp"
#include "isoflow/scheme.hpp"

namespace isoflow {

/// Everything needed to start scheme::run from a configuration.
struct RunSetup {
  Mesh mesh;
  SchemeParams params;  ///< with the manufactured forcing attached
  State initial;
  std::shared_ptr<const ManufacturedCase> reference;  ///< manufactured runs only
  RunOptions options;
};

/// Box mesh of the config, or the mesh file when `mesh` is set; `n`
/// overrides the cells per axis (all three) when positive.
Mesh make_mesh(const RunConfig& c, int n = 0);
/// 1 + 0.5 exp(-|x - centre|^2 / (width L^2)) with L^2 the mean squared extent.
double gaussian_bump_density(const Box& domain, const Vec3& x, double width = 0.02);
RunSetup prepare_run(const RunConfig& c, int n = 0);

/// steps.csv
std::string steps_csv_header();
std::string steps_csv_row(const StepReport& r);
void write_steps_csv(std::ostream& out, const std::vector<StepReport>& rows);

struct RunOutcome {
  Trajectory trajectory;
  std::vector<StepReport> ledger;
};

/// Runs the configuration, writing into output_dir: config.txt (canonical
/// config), mesh.txt, steps.csv (appended per step), snapshots/ and vtk/.
/// A step failure stops the run; the partial outputs stay and
/// trajectory.failure is set.
RunOutcome run_to_directory(const RunConfig& c, std::ostream& log);

/// Recomputes the ledger of a run directory from its config, mesh and
/// snapshots; the snapshots must be consecutive steps starting at 0.
std::vector<StepReport> ledger_from_directory(const std::filesystem::path& dir);

// Study levels. Each runs the configured initial data on an n^3 box mesh.

struct EnergyLevel {
  int n = 0;
  double gamma = 0.0;
  double alpha = 0.0;
  double h = 0.0;
  int steps = 0;
  double max_slack = 0.0;
  double min_dissipation = 0.0;  ///< smallest individual dissipation entry
  double max_mass_drift = 0.0;   ///< largest |mass_drift|
  double min_density = 0.0;
  std::string failure;
  std::vector<StepReport> ledger;
};
EnergyLevel energy_level(const RunConfig& c, int n, double gamma);

/// alpha = min(0.5, 0.9 * 2 (gamma - 1)) used by gamma sweeps.
double sweep_alpha(double gamma);

struct ConsistencyLevel {
  int n = 0;
  double h = 0.0;
  double t_final = 0.0;
  double min_density = 0.0;
  std::vector<std::string> functions;
  std::vector<double> continuity, momentum;
  std::string failure;
};
/// Test functions psi(t) phi(x) with psi supported on [0, t_end), or on
/// [0, t_final) for step-count runs.
ConsistencyLevel consistency_level(const RunConfig& c, int n);

struct ErrorLevel {
  int n = 0;
  double h = 0.0;
  double density = 0.0;
  double velocity = 0.0;
  double min_density = 0.0;
  std::string failure;
};
ErrorLevel mms_level(const RunConfig& c, int n);

/// Runs the configured study, writing its CSV files into output_dir and a
/// summary to `log`. Returns 0 on success, 3 when a level failed (rows of
/// earlier levels are kept).
int run_study(const RunConfig& c, std::ostream& log);

double min_density(const Trajectory& tr);

}  // namespace isoflow
