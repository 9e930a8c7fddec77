#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "isoflow/config.hpp"
#include "isoflow/error.hpp"
#include "isoflow/harness.hpp"
#include "isoflow/mesh.hpp"

using namespace isoflow;

namespace {

constexpr int kUsage = 2;
constexpr int kInputError = 1;
constexpr int kStepFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Implicit upwind finite volume / Crouzeix-Raviart solver for barotropic "
               "compressible Navier-Stokes flow"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("mesh-gen", "Write a Kuhn tetrahedral mesh of a box");
  std::vector<int> n;
  std::vector<double> box{1.0, 1.0, 1.0};
  std::string mesh_out;
  gen->add_option("--n", n, "cells per axis (1 or 3 values)")->required()->expected(1, 3)
      ->check(CLI::Range(1, 4096));
  gen->add_option("--box", box, "box extents lx ly lz")->expected(3)->check(CLI::PositiveNumber);
  gen->add_option("-o,--output", mesh_out, "output file (default: standard output)");

  auto* runc = app.add_subcommand("run", "Run a configuration and write steps.csv");
  std::string run_config, run_dir;
  runc->add_option("config", run_config, "config file")->required();
  runc->add_option("-d,--output-dir", run_dir, "override output_dir");

  auto* study = app.add_subcommand("study", "Run a refinement study");
  std::string study_config, study_dir;
  study->add_option("config", study_config, "config file")->required();
  study->add_option("-d,--output-dir", study_dir, "override output_dir");

  auto* ledger = app.add_subcommand("ledger", "Recompute steps.csv from a run directory");
  std::string ledger_dir, ledger_out;
  ledger->add_option("run_dir", ledger_dir, "directory written by 'run' with save_every = 1")->required();
  ledger->add_option("-o,--output", ledger_out, "output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) {
      if (n.size() == 2) {
        std::cerr << "--n takes 1 or 3 values\n";
        return kUsage;
      }
      if (n.size() == 1) n = {n[0], n[0], n[0]};
      const Mesh m = build_box_mesh(Box{Vec3::Zero(), Vec3(box[0], box[1], box[2])}, {n[0], n[1], n[2]});
      if (mesh_out.empty())
        write_mesh(std::cout, m);
      else
        write_mesh(std::filesystem::path(mesh_out), m);
      return 0;
    }
    if (*runc) {
      RunConfig c = read_config(run_config);
      if (!run_dir.empty()) c.output_dir = run_dir;
      if (!c.mesh.empty() && std::filesystem::path(c.mesh).is_relative())
        c.mesh = (std::filesystem::path(run_config).parent_path() / c.mesh).string();
      const RunOutcome out = run_to_directory(c, std::cout);
      if (!out.trajectory.failure.empty()) {
        std::cerr << "run stopped at t = " << out.trajectory.states.back().t << ": "
                  << out.trajectory.failure << "\n";
        return kStepFailure;
      }
      return 0;
    }
    if (*study) {
      RunConfig c = read_config(study_config);
      if (!study_dir.empty()) c.output_dir = study_dir;
      if (!c.mesh.empty() && std::filesystem::path(c.mesh).is_relative())
        c.mesh = (std::filesystem::path(study_config).parent_path() / c.mesh).string();
      return run_study(c, std::cout) == 0 ? 0 : kStepFailure;
    }
    if (*ledger) {
      const auto rows = ledger_from_directory(ledger_dir);
      if (ledger_out.empty()) {
        write_steps_csv(std::cout, rows);
      } else {
        std::ofstream out(ledger_out);
        if (!out) throw InvalidInput("cannot write '" + ledger_out + "'");
        write_steps_csv(out, rows);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kUsage;
}
